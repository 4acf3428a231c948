#include "logsmooth/cli.hpp"

int main(int argc, char** argv) { return logsmooth::cli::run(argc, argv); }
