// arclab: command-line front end for the group, valuation and formula engines.
//
// Exit codes: 0 success, 1 verification mismatch or red flag, 2 usage or parse error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "arclab/errors.hpp"
#include "arclab/group_dsl.hpp"
#include "arclab/valuations.hpp"

using namespace arclab;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t samples = 200;
  std::vector<std::uint64_t> primes = {2, 3, 5, 7};
  std::optional<std::size_t> cutoff;
  bool json = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_primes(const std::vector<std::uint64_t>& ps) {
  for (auto p : ps) {
    if (!is_prime(p)) throw UsageError(std::to_string(p) + " is not a prime");
  }
}

// Keeps the first `cutoff` terms and records the first dropped exponent as the O-term.
std::string show(const HahnSeries& s, const RunConfig& cfg) {
  if (!cfg.cutoff || s.terms().size() <= *cfg.cutoff) return to_string(s);
  std::vector<SeriesTerm> kept(s.terms().begin(), s.terms().begin() + static_cast<std::ptrdiff_t>(*cfg.cutoff));
  auto bound = s.terms()[*cfg.cutoff].exponent;
  return to_string(HahnSeries::from_terms(s.group(), std::move(kept), bound));
}

ClassificationOptions classification_options(const RunConfig& cfg, bool differential) {
  ClassificationOptions o;
  o.display_primes = cfg.primes;
  o.differential.samples = cfg.samples;
  o.differential.witness_samples = cfg.samples;
  o.differential.seed = cfg.seed;
  o.run_differential = differential;
  return o;
}

int emit_report(const ClassificationReport& r, const RunConfig& cfg) {
  std::cout << (cfg.json ? report_json(r) : report_text(r));
  return r.ok() ? kOk : kMismatch;
}

int group_analyze(const std::string& dsl, const RunConfig& cfg) {
  auto g = parse_group(dsl);
  return emit_report(classification_report(g, classification_options(cfg, false)), cfg);
}

int valuations_list(const std::string& dsl, const RunConfig& cfg) {
  auto g = parse_group(dsl);
  auto img = enumerate_definable(g, cfg.primes);
  auto v0 = v0_descriptor(g).cut;
  if (cfg.json) {
    Json j;
    j["group"] = to_string(g);
    j["v_0"] = to_string(g, v0);
    Json cuts = Json::array();
    for (const auto& d : img.cuts) {
      Json c;
      c["cut"] = to_string(g, d.cut);
      Json ls = Json::array();
      for (const auto& l : d.labels) ls.push_back(to_string(l));
      c["labels"] = ls;
      if (auto cc = d.cut.concrete()) c["residue_real_closed"] = is_residue_real_closed(g, *cc);
      cuts.push_back(c);
    }
    j["definable"] = cuts;
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::cout << "group: " << to_string(g) << "\n";
  std::cout << "v_0 at " << to_string(g, v0) << "\n";
  std::cout << "definable henselian valuations (cut: labels):\n";
  for (const auto& d : img.cuts) {
    std::cout << "  " << to_string(g, d.cut) << ":";
    for (std::size_t i = 0; i < d.labels.size(); ++i) std::cout << (i ? ", " : " ") << to_string(d.labels[i]);
    if (auto cc = d.cut.concrete(); cc && is_residue_real_closed(g, *cc)) std::cout << "  [real closed residue field]";
    std::cout << "\n";
  }
  return kOk;
}

// "x = 1 + t^(1,0); y = 2" and repeated --at options.
Assignment parse_bindings(const Group& g, const std::vector<std::string>& specs) {
  Assignment env;
  for (const auto& spec : specs) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("binding '" + item + "' has no '='");
      auto name = item.substr(0, eq);
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      if (name.empty()) throw UsageError("binding '" + item + "' has no variable");
      env.insert_or_assign(name, parse_series(g, item.substr(eq + 1)));
    }
  }
  return env;
}

int formula_eval(const std::string& dsl, const std::string& expr, const std::vector<std::string>& at,
                 const RunConfig& cfg) {
  auto g = make_group(parse_group(dsl));
  auto env = parse_bindings(g, at);
  std::vector<std::string> names;
  for (const auto& [name, value] : env) names.push_back(name);
  auto f = parse_formula(expr, {g, names});

  std::string mode = "decidable";
  std::string result;
  std::string reason;
  Assignment witness;
  try {
    result = eval_decidable(f, env, g) ? "true" : "false";
  } catch (const UnsupportedQuantifierPattern& e) {
    mode = "sampled";
    reason = e.what();
    auto out = eval_sampled(f, env, g, SampleBudget{cfg.samples, cfg.seed});
    result = to_string(out.kind);
    witness = out.witness;
  }
  if (cfg.json) {
    Json j;
    j["group"] = to_string(*g);
    j["formula"] = to_string(f);
    j["mode"] = mode;
    if (!reason.empty()) j["reason"] = reason;
    j["result"] = result;
    Json w = Json::object();
    for (const auto& [name, value] : witness) w[name] = show(value, cfg);
    j["witness"] = w;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "formula: " << to_string(f) << "\n";
    std::cout << "mode: " << mode << "\n";
    if (!reason.empty()) std::cout << "reason: " << reason << "\n";
    std::cout << "result: " << result << "\n";
    for (const auto& [name, value] : witness) std::cout << "witness: " << name << " = " << show(value, cfg) << "\n";
  }
  return kOk;
}

int emit_differential(const LexWord& g, const DifferentialReport& r, const RunConfig& cfg) {
  if (cfg.json) {
    Json j;
    j["group"] = to_string(g);
    j["p"] = r.p;
    j["n"] = r.n;
    j["samples"] = r.points;
    j["falsification_runs"] = r.falsification_runs;
    Json ms = Json::array();
    for (const auto& m : r.mismatches) {
      Json mj;
      mj["check"] = m.check;
      mj["x"] = show(m.x, cfg);
      mj["decided"] = m.decided;
      mj["expected"] = m.expected;
      if (!m.detail.empty()) mj["detail"] = m.detail;
      ms.push_back(mj);
    }
    j["mismatches"] = ms;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "group: " << to_string(g) << ", p = " << r.p << ", n = " << r.n << "\n";
    std::cout << r.points << " points, " << r.falsification_runs << " falsification runs, " << r.mismatches.size()
              << " mismatches\n";
    for (const auto& m : r.mismatches) {
      std::cout << "  " << m.check << " at x = " << show(m.x, cfg) << ": formula " << m.decided << ", ring "
                << m.expected << (m.detail.empty() ? "" : " (" + m.detail + ")") << "\n";
    }
  }
  return r.mismatches.empty() ? kOk : kMismatch;
}

int verify_differential(const std::string& dsl, std::uint64_t p, std::uint64_t n, const RunConfig& cfg) {
  if (!is_prime(p)) throw UsageError(std::to_string(p) + " is not a prime");
  auto g = parse_group(dsl);
  DifferentialOptions o;
  o.samples = cfg.samples;
  o.witness_samples = cfg.samples;
  o.seed = cfg.seed;
  return emit_differential(g, differential_verify(g, p, n, o), cfg);
}

int verify_thm(const std::string& dsl, const RunConfig& cfg) {
  auto g = parse_group(dsl);
  auto t = verify_thm_defblRCF(g, cfg.primes);
  auto b = [](bool x) { return x ? "true" : "false"; };
  if (cfg.json) {
    Json j;
    j["group"] = to_string(g);
    j["cond1"] = t.cond1;
    j["cond2"] = t.cond2;
    j["cond3"] = t.cond3;
    j["consistent"] = t.consistent();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "group: " << to_string(g) << "\n";
    std::cout << "cond1 (a definable henselian valuation has real closed residue field): " << b(t.cond1) << "\n";
    std::cout << "cond2 (G_0 = G_p for some prime p): " << b(t.cond2) << "\n";
    std::cout << "cond3 (v_0 is definable): " << b(t.cond3) << "\n";
    std::cout << (t.consistent() ? "consistent" : "INCONSISTENT") << "\n";
  }
  return t.consistent() ? kOk : kMismatch;
}

int examples(const std::string& name, const RunConfig& cfg) {
  for (const auto& lg : library_groups()) {
    if (lg.name == name) {
      return emit_report(classification_report(parse_group(lg.dsl), classification_options(cfg, true)), cfg);
    }
  }
  std::string known;
  for (const auto& lg : library_groups()) known += " " + lg.name;
  throw UsageError("unknown example '" + name + "' (known:" + known + ")");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Definable henselian valuations on Hahn fields R((G))"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "random samples per check")->capture_default_str();
  app.add_option("--primes", cfg.primes, "display primes")->delimiter(',')->capture_default_str();
  app.add_option("--cutoff", cfg.cutoff, "number of terms shown before an O-term in printed series");
  app.add_flag("--json", cfg.json, "machine-readable output");

  std::function<int()> action;
  std::string dsl, expr, name;
  std::vector<std::string> at;
  std::uint64_t p = 2, n = 0;

  auto* group = app.add_subcommand("group", "ordered abelian group analysis")->require_subcommand(1);
  auto* analyze = group->add_subcommand("analyze", "n_p table, convex subgroups, certificates, verdicts");
  analyze->add_option("group", dsl, "group DSL, e.g. lex(Z,Q)")->required();
  analyze->callback([&] { action = [&] { return group_analyze(dsl, cfg); }; });

  auto* vals = app.add_subcommand("valuations", "definable henselian valuations")->require_subcommand(1);
  auto* list = vals->add_subcommand("list", "image of (p,n) -> G_(p,n)");
  list->add_option("group", dsl)->required();
  list->callback([&] { action = [&] { return valuations_list(dsl, cfg); }; });

  auto* formula = app.add_subcommand("formula", "ring-language formulas")->require_subcommand(1);
  auto* eval = formula->add_subcommand("eval", "evaluate a formula at a point of R((G))");
  eval->add_option("--group", dsl)->required();
  eval->add_option("--expr", expr)->required();
  eval->add_option("--at", at, "bindings 'x = <series>; y = <series>'");
  eval->callback([&] { action = [&] { return formula_eval(dsl, expr, at, cfg); }; });

  auto* verify = app.add_subcommand("verify", "verification suites")->require_subcommand(1);
  auto* phi_p = verify->add_subcommand("phi-p", "phi_p against the ring of v_p");
  phi_p->add_option("--group", dsl)->required();
  phi_p->add_option("-p", p)->required();
  phi_p->callback([&] { action = [&] { return verify_differential(dsl, p, 0, cfg); }; });
  auto* phi_pn = verify->add_subcommand("phi-pn", "phi_(p,n) against the ring of v_(p,n)");
  phi_pn->add_option("--group", dsl)->required();
  phi_pn->add_option("-p", p)->required();
  phi_pn->add_option("-n", n)->required();
  phi_pn->callback([&] { action = [&] { return verify_differential(dsl, p, n, cfg); }; });
  auto* thm = verify->add_subcommand("thm26", "equivalence of the three almost-real-closed conditions");
  thm->add_option("--group", dsl)->required();
  thm->callback([&] { action = [&] { return verify_thm(dsl, cfg); }; });
  auto* cls = verify->add_subcommand("classification", "full report with differential checks");
  cls->add_option("--group", dsl)->required();
  cls->callback([&] {
    action = [&] { return emit_report(classification_report(parse_group(dsl), classification_options(cfg, true)), cfg); };
  });

  auto* ex = app.add_subcommand("examples", "built-in example fields");
  ex->add_option("name", name, "k1, k2, zpluspi, c0, zz, zloc2q or q")->required();
  ex->callback([&] { action = [&] { return examples(name, cfg); }; });

  // Global flags are also accepted after the subcommand words.
  std::function<void(CLI::App*)> fall = [&](CLI::App* a) {
    for (auto* sub : a->get_subcommands({})) {
      sub->fallthrough();
      fall(sub);
    }
  };
  fall(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    check_primes(cfg.primes);
    return action();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NonEffectiveGroup& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMismatch;
  }
}
