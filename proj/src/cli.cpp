#include "sbab/cli.hpp"

#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "sbab/classify.hpp"
#include "sbab/error.hpp"
#include "sbab/finite_oracle.hpp"
#include "sbab/invariants.hpp"
#include "sbab/witness_padic.hpp"
#include "sbab/witness_socle.hpp"

namespace sbab {

namespace {

struct Config {
  unsigned precision = 40;
  unsigned degree = 2;
  unsigned height = 2;
  std::size_t window = 50;
  std::size_t threshold = 5;
  std::uint64_t seed = 0;
  std::uint64_t order_bound = kDefaultOrderBound;
  std::string format = "json";
  std::string out;

  Json to_json() const {
    return Json{{"precision", precision}, {"degree", degree},   {"height", height},          {"window", window},
                {"threshold", threshold}, {"seed", seed},       {"order_bound", order_bound}};
  }
  PAdicWitnessParams padic() const {
    PAdicWitnessParams p;
    p.degree = degree;
    p.height = height;
    p.precision = precision;
    return p;
  }
  SocleParams socle() const {
    SocleParams p;
    p.degree = degree;
    p.height = height;
    p.threshold = threshold;
    return p;
  }
};

void render_text(const Json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) render_text(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array() && std::any_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); })) {
    for (std::size_t i = 0; i < j.size(); ++i) render_text(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

Json parse_json_arg(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(e.byte, what + " is not valid JSON");
  }
}

Json invariants_json(const GroupSpec& g) {
  return Json{{"spec", g.to_string()},
              {"szmielew", sz_invariants(g).to_json()},
              {"ulm", ulm_table(g).to_json()},
              {"divisible", divisible_invariants(g).to_json()}};
}

Json witness_json(const GroupSpec& g, const std::string& route_opt, const Config& cfg) {
  const auto c = classify(g);
  if (c.sb.has_sb) {
    throw precondition_error("RouteRefused", g.to_string() + " has the SB property (" +
                                                 std::string(stability_name(c.stability)) + "); no witness exists");
  }
  std::string route = route_opt;
  if (route == "auto") {
    switch (c.sb.route) {
      case SbRoute::PAdicWitness: route = "padic"; break;
      case SbRoute::SocleWitness: route = "socle"; break;
      default:
        throw precondition_error("RouteRefused", g.to_string() + " is not superstable; " + c.sb.reason);
    }
  }
  Json j{{"spec", g.to_string()}, {"route", route}, {"classification_route", route_name(c.sb.route)}};
  if (route == "padic") {
    const auto d = assemble_mixed_sum(g, cfg.seed, cfg.padic());
    Json probes = Json::array();
    for (const auto& w : d.k_witness.components) probes.push_back(run_padic_probes(w, 100, cfg.seed).to_json());
    j["witness"] = d.to_json();
    j["probes"] = probes;
  } else {
    const auto t = reduce_unbounded(g, cfg.window, cfg.seed, cfg.socle());
    j["transcript"] = t.to_json();
    j["probes"] = run_socle_probes(t.witness, 1000, 100, cfg.seed).to_json();
  }
  return j;
}

FiniteAbelianGroup::Element element_of(const FiniteAbelianGroup& g, const Json& coords) {
  if (!coords.is_array() || coords.size() != g.factors().size()) {
    throw precondition_error("ShapeMismatch", "generator " + coords.dump() + " needs " +
                                                  std::to_string(g.factors().size()) + " coordinates");
  }
  std::vector<std::uint64_t> c;
  for (const auto& v : coords) {
    if (!v.is_number_integer()) throw ParseError(0, "generator coordinates must be integers");
    const auto x = v.get<long long>();
    c.push_back(static_cast<std::uint64_t>(x < 0 ? 0 : x));
    if (x < 0) {
      const auto f = g.factors()[c.size() - 1];
      c.back() = static_cast<std::uint64_t>(((x % static_cast<long long>(f)) + static_cast<long long>(f)) %
                                            static_cast<long long>(f));
    }
  }
  return g.encode(c);
}

IntMatrix matrix_of(const Json& rows) {
  if (!rows.is_array() || rows.empty()) throw ParseError(0, "matrix must be a nonempty array of rows");
  std::vector<std::vector<BigInt>> out;
  for (const auto& r : rows) {
    if (!r.is_array() || r.size() != rows[0].size() || r.empty()) throw ParseError(0, "matrix rows must have equal length");
    std::vector<BigInt> row;
    for (const auto& v : r) {
      if (v.is_number_integer()) {
        row.emplace_back(v.get<long long>());
      } else if (v.is_string()) {
        try {
          row.emplace_back(v.get<std::string>());
        } catch (const std::exception&) {
          throw ParseError(0, "bad integer " + v.dump());
        }
      } else {
        throw ParseError(0, "matrix entries must be integers");
      }
    }
    out.push_back(std::move(row));
  }
  return IntMatrix::from_rows(out);
}

Json big_list(const std::vector<BigInt>& v) {
  Json j = Json::array();
  for (const auto& x : v) j.push_back(x.str());
  return j;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Bi-embeddability (SB) classifier for abelian groups", "sbab"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--precision", cfg.precision, "p-adic precision N")->check(CLI::PositiveNumber);
  app.add_option("--degree", cfg.degree, "relation degree bound d")->check(CLI::PositiveNumber);
  app.add_option("--height", cfg.height, "relation height bound B")->check(CLI::PositiveNumber);
  app.add_option("--window", cfg.window, "prime window size W")->check(CLI::PositiveNumber);
  app.add_option("--threshold", cfg.threshold, "avoidance threshold")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--order-bound", cfg.order_bound, "finite oracle order bound")->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--out", cfg.out, "write the JSON report to FILE");

  std::string spec_a, spec_b, route = "auto", matrix, gens;
  std::uint64_t prime = 0;
  unsigned index = 0;
  auto* classify_cmd = app.add_subcommand("classify", "stability class, SB verdict and route");
  classify_cmd->add_option("spec", spec_a)->required();
  auto* invariants_cmd = app.add_subcommand("invariants", "Szmielew, Ulm and divisible invariants");
  invariants_cmd->add_option("spec", spec_a)->required();
  auto* eq_cmd = app.add_subcommand("eq", "elementary equivalence");
  eq_cmd->add_option("a", spec_a)->required();
  eq_cmd->add_option("b", spec_b)->required();
  auto* iso_cmd = app.add_subcommand("iso", "isomorphism");
  iso_cmd->add_option("a", spec_a)->required();
  iso_cmd->add_option("b", spec_b)->required();
  auto* witness_cmd = app.add_subcommand("witness", "bi-embeddable, non-isomorphic pair");
  witness_cmd->add_option("spec", spec_a)->required();
  witness_cmd->add_option("--route", route)->check(CLI::IsMember({"auto", "padic", "socle"}));
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force checks on finite groups");
  oracle_cmd->require_subcommand(1);
  auto* snf_cmd = oracle_cmd->add_subcommand("snf", "Smith normal form of an integer matrix");
  snf_cmd->add_option("matrix", matrix, "JSON rows, e.g. [[2,4],[6,8]]")->required();
  auto* pure_cmd = oracle_cmd->add_subcommand("pure", "purity of the subgroup generated by GENS");
  pure_cmd->add_option("spec", spec_a)->required();
  pure_cmd->add_option("gens", gens, "JSON list of coordinate vectors")->required();
  auto* ulm_cmd = oracle_cmd->add_subcommand("ulm", "Ulm invariant by enumeration");
  ulm_cmd->add_option("spec", spec_a)->required();
  ulm_cmd->add_option("p", prime)->required();
  ulm_cmd->add_option("i", index)->required();
  auto* oiso_cmd = oracle_cmd->add_subcommand("iso", "isomorphism by enumeration");
  oiso_cmd->add_option("a", spec_a)->required();
  oiso_cmd->add_option("b", spec_b)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Json result;
    std::string command;
    if (classify_cmd->parsed()) {
      command = "classify";
      const auto g = parse_spec(spec_a);
      result = classify(g).to_json();
      result["spec"] = g.to_string();
    } else if (invariants_cmd->parsed()) {
      command = "invariants";
      result = invariants_json(parse_spec(spec_a));
    } else if (eq_cmd->parsed()) {
      command = "eq";
      const auto a = parse_spec(spec_a), b = parse_spec(spec_b);
      result = Json{{"a", a.to_string()}, {"b", b.to_string()}, {"equivalent", elem_equivalent(a, b)}};
    } else if (iso_cmd->parsed()) {
      command = "iso";
      const auto a = parse_spec(spec_a), b = parse_spec(spec_b);
      result = Json{{"a", a.to_string()}, {"b", b.to_string()}, {"isomorphic", iso_standard(a, b)}};
    } else if (witness_cmd->parsed()) {
      command = "witness";
      result = witness_json(parse_spec(spec_a), route, cfg);
    } else if (snf_cmd->parsed()) {
      command = "oracle snf";
      const auto s = smith_normal_form(matrix_of(parse_json_arg(matrix, "matrix")));
      result = Json{{"invariant_factors", big_list(s.invariant_factors)}, {"free_rank", s.free_rank}};
    } else if (pure_cmd->parsed()) {
      command = "oracle pure";
      const auto g = FiniteAbelianGroup::realize(parse_spec(spec_a), cfg.order_bound);
      const auto list = parse_json_arg(gens, "gens");
      if (!list.is_array()) throw ParseError(0, "gens must be a JSON list");
      std::vector<FiniteAbelianGroup::Element> elems;
      for (const auto& v : list) elems.push_back(element_of(g, v));
      result = Json{{"factors", g.factors()}, {"pure", is_pure_subgroup_bruteforce(g, elems)}};
    } else if (ulm_cmd->parsed()) {
      command = "oracle ulm";
      const auto spec = parse_spec(spec_a);
      const Prime p(prime);
      const auto g = FiniteAbelianGroup::realize(spec, cfg.order_bound);
      const auto brute = ulm_bruteforce(g, p.value(), index);
      const auto symbolic = ulm_symbolic(spec, p.value(), index);
      result = Json{{"p", prime},
                    {"i", index},
                    {"bruteforce", brute},
                    {"symbolic", symbolic.to_json()},
                    {"agree", symbolic == Cardinal::finite(brute)}};
    } else if (oiso_cmd->parsed()) {
      command = "oracle iso";
      const auto a = parse_spec(spec_a), b = parse_spec(spec_b);
      const bool brute =
          iso_finite_bruteforce(FiniteAbelianGroup::realize(a, cfg.order_bound), FiniteAbelianGroup::realize(b, cfg.order_bound));
      result = Json{{"isomorphic", brute}, {"agree", brute == iso_standard(a, b)}};
    }

    const Json report{{"schema", kSchema}, {"command", command}, {"config", cfg.to_json()}, {"result", result}};
    if (!cfg.out.empty()) {
      std::ofstream f(cfg.out);
      if (!f) throw precondition_error("OutputUnwritable", "cannot write " + cfg.out);
      f << report.dump(2) << "\n";
    } else if (cfg.format == "text") {
      render_text(report, "", out);
    } else {
      out << report.dump(2) << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Parse: return 2;
      case ErrorKind::Precondition: return 3;
      case ErrorKind::Budget: return 4;
    }
    return 3;
  } catch (const std::overflow_error& e) {
    err << "error: Overflow: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace sbab
