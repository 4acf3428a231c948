#pragma once

// Command-line front end. run() is usable in-process; tools/logsmooth.cpp
// only forwards argv and the standard streams.
//
// Exit status: 0 affirmative verdict or successful computation,
// 1 negative verdict, 2 input or usage error.

#include "logsmooth/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace logsmooth::cli {

inline constexpr int kAffirmative = 0;
inline constexpr int kNegative = 1;
inline constexpr int kInputError = 2;

/// Search bound: explicit flag, then LOGSMOOTH_BOUND, then the default.
inline long long search_bound(std::optional<long long> flag) {
  if (flag) {
    if (*flag < 1) throw InputError("--bound must be positive");
    return *flag;
  }
  if (const char* env = std::getenv("LOGSMOOTH_BOUND"); env && *env) {
    Integer b;
    try {
      b = parse_integer(env);
    } catch (const InputError&) {
      throw InputError(std::string("LOGSMOOTH_BOUND is not an integer: '") + env + "'");
    }
    if (b < 1 || b > Integer(1'000'000)) throw InputError("LOGSMOOTH_BOUND must lie in [1, 1000000]");
    return static_cast<long long>(b);
  }
  return kDefaultSearchBound;
}

namespace detail {

inline std::string list(const std::vector<Integer>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].str();
  return out + "]";
}

inline std::string list(const std::vector<GroupElement>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].str();
  return out + "]";
}

inline std::string matrix_block(const IntMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) out += "  " + to_string(m.row(i)) + "\n";
  if (m.rows() == 0) out += "  (empty)\n";
  return out;
}

struct Report {
  io::Json json;
  std::string text;
  int status = kAffirmative;
};

inline Report cmd_snf(const std::string& file) {
  io::Json doc = io::read_document(file);
  io::Field f = io::Field(doc, "");
  IntMatrix a = io::read_matrix(doc.is_array() ? f : f["matrix"]);
  SmithForm snf = smith(a);
  Report r;
  r.json = {{"command", "snf"},
            {"rows", a.rows()},
            {"cols", a.cols()},
            {"invariant_factors", io::to_json(snf.invariant_factors)},
            {"rank", snf.rank()},
            {"U", io::to_json(snf.U)},
            {"S", io::to_json(snf.S)},
            {"V", io::to_json(snf.V)}};
  r.text = "invariant factors: " + list(snf.invariant_factors) + "\nrank: " + std::to_string(snf.rank()) +
           "\nU:\n" + matrix_block(snf.U) + "S:\n" + matrix_block(snf.S) + "V:\n" + matrix_block(snf.V);
  return r;
}

inline GroupElement parse_element(const std::string& text, const FgAbelianGroup& amb) {
  std::string t = text;
  if (t.find('[') == std::string::npos) t = "[" + t + "]";
  io::Json doc = io::parse_document(t, "--element");
  IntVector v = io::Field(doc, "--element").vector();
  if (v.size() != amb.dim())
    throw InputError("--element: expected " + std::to_string(amb.dim()) + " coordinates, got " + std::to_string(v.size()));
  return amb.reduce(std::move(v));
}

inline Report cmd_member(const std::string& file, const std::string& element) {
  io::Json doc = io::read_document(file);
  AffineMonoid m = io::read_monoid(io::Field(doc, ""));
  GroupElement v = parse_element(element, m.ambient());
  bool in = membership(m, v);
  Report r;
  r.json = {{"command", "member"}, {"monoid", io::to_json(m)}, {"element", io::to_json(v)}, {"member", in}};
  r.text = v.str() + (in ? " is in " : " is not in ") + m.str();
  r.status = in ? kAffirmative : kNegative;
  return r;
}

inline Report cmd_saturate(const std::string& file, bool check, const std::string& in_file, std::optional<long long> bound) {
  io::Json doc = io::read_document(file);
  AffineMonoid m = io::read_monoid(io::Field(doc, ""));
  Report r;
  if (!in_file.empty()) {
    io::Json outer_doc = io::read_document(in_file);
    AffineMonoid outer = io::read_monoid(io::Field(outer_doc, ""));
    SearchBounds b{search_bound(bound), kDefaultMultiplierBound};
    SaturatedInResult res = is_saturated_in(m, outer, b);
    r.json = {{"command", "saturate-in"},
              {"verdict", to_string(res.verdict)},
              {"holds", res.holds()},
              {"bound", io::to_json(res.bound)},
              {"multiplier_bound", io::to_json(res.multiplier_bound)},
              {"witness", res.witness ? io::to_json(*res.witness) : io::Json()},
              {"multiplier", res.witness ? io::to_json(res.multiplier) : io::Json()}};
    switch (res.verdict) {
      case SaturatedInResult::Verdict::ProvedTrue:
        r.text = "saturated in the outer monoid (proved)";
        break;
      case SaturatedInResult::Verdict::TrueWithinBound:
        r.text = "no witness found with coordinates bounded by " + res.bound.str() + " and multipliers up to " +
                 res.multiplier_bound.str() + " (true within bound)";
        break;
      case SaturatedInResult::Verdict::False:
        r.text = "not saturated in the outer monoid: witness " + res.witness->str() + ", " + res.multiplier.str() +
                 " times it lies in P";
        break;
    }
    r.status = res.holds() ? kAffirmative : kNegative;
    return r;
  }
  const AffineMonoid sat = saturate(m);
  if (check) {
    MembershipOracle in_m(m);
    std::optional<GroupElement> witness;
    Integer multiplier = 0;
    for (const auto& g : sat.generators())
      if (!in_m.contains(g)) {
        witness = g;
        for (long long n = 2;; ++n)
          if (in_m.contains(m.ambient().mul(n, g))) {
            multiplier = n;
            break;
          }
        break;
      }
    r.json = {{"command", "saturate-check"},
              {"saturated", !witness},
              {"witness", witness ? io::to_json(*witness) : io::Json()},
              {"multiplier", witness ? io::to_json(multiplier) : io::Json()}};
    r.text = witness ? "not saturated: witness " + witness->str() + ", " + multiplier.str() + " times it lies in M"
                     : "saturated";
    r.status = witness ? kNegative : kAffirmative;
    return r;
  }
  r.json = {{"command", "saturate"}, {"input", io::to_json(m)}, {"saturation", io::to_json(sat)}};
  r.text = "saturation: " + sat.str();
  return r;
}

inline Report cmd_hilbert(const std::string& file) {
  io::Json doc = io::read_document(file);
  AffineMonoid m = io::read_monoid(io::Field(doc, ""));
  auto basis = hilbert_basis(m);
  Report r;
  r.json = {{"command", "hilbert"}, {"hilbert_basis", io::to_json(basis)}, {"size", basis.size()}};
  r.text = "hilbert basis: " + list(basis);
  return r;
}

inline io::Json report_json(const SmoothnessReport& rep) {
  auto k = rep.ker_order();
  return io::Json{{"kernel",
                   {{"free_rank", rep.ker_free_rank},
                    {"torsion", io::to_json(rep.ker_torsion)},
                    {"order", k ? io::to_json(*k) : io::Json()}}},
                  {"cokernel",
                   {{"free_rank", rep.coker_free_rank},
                    {"torsion", io::to_json(rep.coker_torsion)},
                    {"torsion_order", io::to_json(rep.coker_torsion_order())}}}};
}

inline std::string report_text(const SmoothnessReport& rep) {
  auto k = rep.ker_order();
  return "kernel: rank " + std::to_string(rep.ker_free_rank) + ", torsion " + list(rep.ker_torsion) + ", order " +
         (k ? k->str() : std::string("infinite")) + "\ncokernel: rank " + std::to_string(rep.coker_free_rank) +
         ", torsion " + list(rep.coker_torsion) + ", torsion order " + rep.coker_torsion_order().str();
}

inline Report cmd_check_smooth(const std::string& file, long long p) {
  Characteristic ch = Characteristic::of(p);
  io::Json doc = io::read_document(file);
  MonoidHom h = io::read_hom(io::Field(doc, ""));
  SmoothnessReport rep = smoothness_report(h);
  bool ok = rep.verdict(ch);
  Report r;
  r.json = report_json(rep);
  r.json["command"] = "check-smooth";
  r.json["characteristic"] = ch.value;
  r.json["verdict"] = ok;
  r.json["reason"] = rep.failure_reason(ch);
  r.json["scope"] = "kernel/cokernel condition only; smoothness of the strict part is not decided";
  r.text = report_text(rep) + "\nchart condition in characteristic " + std::to_string(ch.value) + ": " +
           (ok ? "holds" : "fails, " + rep.failure_reason(ch)) +
           "\n(kernel/cokernel condition only; smoothness of the strict part is not decided)";
  r.status = ok ? kAffirmative : kNegative;
  return r;
}

inline Report cmd_omega(const std::string& file, std::optional<long long> p) {
  io::Json doc = io::read_document(file);
  MonoidHom h = io::read_hom(io::Field(doc, ""));
  DifferentialInvariants inv = differential_invariants(h);
  Report r;
  r.json = {{"command", "omega"}, {"rank", inv.rank}, {"torsion", io::to_json(inv.torsion)}};
  r.text = "relative log differentials: rank " + std::to_string(inv.rank) + ", torsion " + list(inv.torsion);
  if (p) {
    Characteristic ch = Characteristic::of(*p);
    Integer order = 1;
    for (const auto& t : inv.torsion) order *= t;
    bool invertible = ch.inverts(order);
    r.json["characteristic"] = ch.value;
    r.json["torsion_invertible"] = invertible;
    r.text += "\ntorsion order " + order.str() + (invertible ? " is" : " is not") + " invertible in characteristic " +
              std::to_string(ch.value);
  }
  return r;
}

inline std::pair<MonoidHom, MonoidHom> read_pair(const std::string& file) {
  io::Json doc = io::read_document(file);
  io::Field f = io::Field(doc, "");
  return {io::read_hom(f["first"]), io::read_hom(f["second"])};
}

inline Report cmd_pushout(const std::string& file) {
  auto [h1, h2] = read_pair(file);
  Amalgamation a = amalgamated_sum(h1, h2);
  Report r;
  r.json = {{"command", "pushout"},
            {"monoid", io::to_json(a.monoid)},
            {"first_images", io::to_json(a.first_images)},
            {"second_images", io::to_json(a.second_images)}};
  r.text = "pushout: " + a.monoid.str();
  return r;
}

inline Report cmd_fsfiber(const std::string& file) {
  auto [h1, h2] = read_pair(file);
  Amalgamation a = amalgamated_sum(h1, h2);
  AffineMonoid chart = saturate(a.monoid);
  Report r;
  r.json = {{"command", "fsfiber"}, {"pushout", io::to_json(a.monoid)}, {"monoid", io::to_json(chart)}};
  r.text = "integral pushout: " + a.monoid.str() + "\nfs fiber chart: " + chart.str();
  return r;
}

inline io::Json triple_json(const TripleVerdict& t) {
  return {{"charts", {t.charts[0], t.charts[1], t.charts[2]}},
          {"passed", t.passed},
          {"failing_index", t.failing_index ? io::Json(*t.failing_index) : io::Json()},
          {"reason", t.reason}};
}

inline std::string triple_text(const TripleVerdict& t) {
  std::string out = "triple (" + std::to_string(t.charts[0]) + "," + std::to_string(t.charts[1]) + "," +
                    std::to_string(t.charts[2]) + "): ";
  return out + (t.passed ? "pass" : "fail at " + t.reason);
}

inline Report cmd_dss_check(const std::string& file, const std::string& mode_name, bool show_triples) {
  io::Json doc = io::read_document(file);
  NCCover cover = io::read_cover(io::Field(doc, ""));
  CocycleMode mode = mode_name == "strict" ? CocycleMode::Strict : CocycleMode::ModBoundary;

  std::vector<OverlapVerdict> overlaps;
  std::vector<TripleVerdict> triples;
  bool holds = true;
  if (mode == CocycleMode::Strict) {
    DssReport rep = dss_report(cover);
    overlaps = rep.overlaps;
    triples = rep.triples;
    holds = rep.holds;
  } else {
    for (std::size_t c = 0; c < cover.charts.size(); ++c) {
      LogSystemCheck chk = validate_log_system(cover.charts[c]);
      if (!chk.valid) throw InputError("chart " + std::to_string(c) + ": " + chk.reason);
    }
    overlaps = cocycle_check(cover);
    for (const auto& v : overlaps) holds = holds && v.mod_boundary;
    if (show_triples) {
      NCCover full = complete_transitions(cover);
      for (const auto& t : triples_to_check(full)) {
        triples.push_back(triple_cocycle_check(full, t.charts[0], t.charts[1], t.charts[2], t.ring));
        holds = holds && triples.back().passed;
      }
    }
  }

  Report r;
  io::Json ov = io::Json::array();
  for (const auto& v : overlaps) {
    ov.push_back({{"pair", {v.first, v.second}},
                  {"product", io::to_json(v.product)},
                  {"deviation", io::to_json(v.deviation)},
                  {"strict", v.strict},
                  {"mod_d", v.mod_boundary},
                  {"passed", v.passed(mode)}});
    std::string line = "overlap (" + std::to_string(v.first) + "," + std::to_string(v.second) + "): product " +
                       v.product.str();
    if (v.strict)
      line += ", strict pass";
    else if (mode == CocycleMode::Strict)
      line += ", strict fail, residual " + v.product.str() + " (deviation " + v.deviation.str() + ")";
    else
      line += v.mod_boundary ? ", mod-D pass, strict normalization not attempted" : ", mod-D fail, deviation " + v.deviation.str();
    r.text += line + "\n";
  }
  io::Json tr = io::Json::array();
  for (const auto& t : triples) {
    tr.push_back(triple_json(t));
    if (show_triples || !t.passed) r.text += triple_text(t) + "\n";
  }
  r.json = {{"command", "dss check"}, {"mode", to_string(mode)}, {"verdict", holds}, {"overlaps", ov}, {"triples", tr}};
  if (mode == CocycleMode::Strict)
    r.text += holds ? "verdict: d-semistable" : "verdict: not d-semistable";
  else
    r.text += holds ? "verdict: cocycle holds modulo the double locus" : "verdict: cocycle fails modulo the double locus";
  r.status = holds ? kAffirmative : kNegative;
  return r;
}

}  // namespace detail

/// Parses `args` (without the program name), runs the command and writes
/// the report to `out` and diagnostics to `err`. Returns the exit status.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact computations with affine monoids, log smoothness charts and normal crossing covers", "logsmooth"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Emit a JSON report")->configurable(false);
  app.fallthrough();

  std::string file, element, in_file, mode = "strict";
  std::optional<long long> bound, omega_char;
  long long smooth_char = 0;
  bool check = false, triples = false;

  auto* snf = app.add_subcommand("snf", "Smith normal form of an integer matrix");
  snf->add_option("file", file, "Matrix document")->required();
  auto* member = app.add_subcommand("member", "Membership of an element in a monoid");
  member->add_option("file", file, "Monoid document")->required();
  member->add_option("--element", element, "Coordinates, e.g. [1,2] or 1,2")->required();
  auto* sat = app.add_subcommand("saturate", "Saturation and saturation tests");
  sat->add_option("file", file, "Monoid document")->required();
  sat->add_flag("--check", check, "Decide whether the monoid is saturated");
  sat->add_option("--in", in_file, "Decide whether the monoid is saturated in this outer monoid");
  sat->add_option("--bound", bound, "Coordinate bound for the witness search (default LOGSMOOTH_BOUND or 32)");
  auto* hilbert = app.add_subcommand("hilbert", "Hilbert basis of the cone of a monoid");
  hilbert->add_option("file", file, "Monoid document")->required();
  auto* smooth = app.add_subcommand("check-smooth", "Kernel/cokernel chart condition of a homomorphism");
  smooth->add_option("file", file, "Homomorphism document")->required();
  smooth->add_option("--char", smooth_char, "Characteristic (0 or a prime)")->required();
  auto* omega = app.add_subcommand("omega", "Rank and torsion of the relative log differentials");
  omega->add_option("file", file, "Homomorphism document")->required();
  omega->add_option("--char", omega_char, "Characteristic for the invertibility report");
  auto* pushout = app.add_subcommand("pushout", "Integral amalgamated sum of two homomorphisms");
  pushout->add_option("file", file, "Document with fields first and second")->required();
  auto* fsfiber = app.add_subcommand("fsfiber", "Saturated pushout chart");
  fsfiber->add_option("file", file, "Document with fields first and second")->required();
  auto* dss = app.add_subcommand("dss", "Normal crossing covers");
  dss->require_subcommand(1);
  auto* dss_check = dss->add_subcommand("check", "Cocycle verdict for a cover");
  dss_check->add_option("file", file, "Cover document")->required();
  dss_check->add_option("--mode", mode, "strict or mod-d")->check(CLI::IsMember({"strict", "mod-d"}));
  dss_check->add_flag("--triples", triples, "Report triple-overlap checks");

  if (!args.empty() && !args.front().empty() && args.front()[0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({}))
      if (sub->get_name() == args.front()) known = true;
    if (!known) {
      err << "error: unknown command '" << args.front() << "'\n";
      return kInputError;
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kAffirmative;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kAffirmative;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    detail::Report rep;
    if (snf->parsed())
      rep = detail::cmd_snf(file);
    else if (member->parsed())
      rep = detail::cmd_member(file, element);
    else if (sat->parsed()) {
      if (check && !in_file.empty()) throw InputError("--check and --in are mutually exclusive");
      rep = detail::cmd_saturate(file, check, in_file, bound);
    } else if (hilbert->parsed())
      rep = detail::cmd_hilbert(file);
    else if (smooth->parsed())
      rep = detail::cmd_check_smooth(file, smooth_char);
    else if (omega->parsed())
      rep = detail::cmd_omega(file, omega_char);
    else if (pushout->parsed())
      rep = detail::cmd_pushout(file);
    else if (fsfiber->parsed())
      rep = detail::cmd_fsfiber(file);
    else
      rep = detail::cmd_dss_check(file, mode, triples);
    if (json)
      out << rep.json.dump(2) << "\n";
    else
      out << rep.text << "\n";
    return rep.status;
  } catch (const NotPointedError& e) {
    if (json) {
      io::Json lin = io::Json::array();
      for (const auto& v : e.lineality()) lin.push_back(io::to_json(v));
      out << io::Json{{"error", e.what()}, {"lineality", lin}}.dump(2) << "\n";
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    if (json) out << io::Json{{"error", e.what()}}.dump(2) << "\n";
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace logsmooth::cli
