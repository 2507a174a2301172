// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "arclab/group_dsl.hpp"
#include "arclab/overloaded.hpp"
#include "arclab/valuations.hpp"

using namespace arclab;

namespace {

const std::vector<std::string> kEffective = {"lex(Z,Q)", "lex(Z,Z)", "lex(real(1,pi))", "lex(Zloc(2),Q)", "lex(Q)"};
const std::uint64_t kSmallPrimes[] = {2, 3, 5};

struct Check {
  std::vector<std::string> failures;
  std::size_t count = 0;

  void expect(bool ok, const std::string& what) {
    ++count;
    if (!ok && failures.size() < 20) failures.push_back(what);
  }
};

std::vector<HahnSeries> ac_points(const Group& g, std::uint64_t seed) {
  auto out = boundary_points(g);
  for (std::size_t i = 0; i < 200; ++i) out.push_back(sample_series(g, seed + i));
  return out;
}

// 1. phi_p against v_p, plus sampled falsification of the universal clause.
void ac1(Check& c) {
  for (const auto& dsl : kEffective) {
    auto lw = parse_group(dsl);
    auto g = make_group(lw);
    auto pts = ac_points(g, 42);
    for (auto p : kSmallPrimes) {
      auto phi = build_phi_p(p);
      auto found = compare_with_ring(phi, v_p_descriptor(lw, p), pts, "phi_p", true);
      c.expect(found.empty(), dsl + " p=" + std::to_string(p) + ": " + std::to_string(found.size()) + " mismatches");
      for (const auto& clause : universal_clauses(phi)) {
        for (const auto& x : pts) {
          Assignment env{{"x", x}};
          if (!eval_decidable(clause, env, g)) continue;
          auto out = eval_sampled(clause, env, g, SampleBudget{200, 42});
          c.expect(out.kind != EvalOutcome::Kind::FalsifiedBy,
                   dsl + " p=" + std::to_string(p) + ": clause falsified at x = " + to_string(x));
        }
      }
    }
  }
}

// 2. The three conditions agree on every library group.
void ac2(Check& c) {
  for (const auto& lg : library_groups()) {
    auto t = verify_thm_defblRCF(parse_group(lg.dsl));
    c.expect(t.consistent(), lg.name + " inconsistent");
    if (lg.name == "k1") c.expect(t.cond1 && t.cond2 && t.cond3, "k1 not all true");
    if (lg.name == "k2") c.expect(!t.cond1 && !t.cond2 && !t.cond3, "k2 not all false");
  }
}

std::uint64_t expected_differential_runs(const LexWord& g) {
  if (!g.effective()) return 0;
  std::uint64_t runs = 0;
  for (std::uint64_t p : {2, 3}) runs += *group_exponent(g, p).value + 1;
  return runs;
}

// 3. Image cuts carry no certificate, all others do, and phi_(p,n) matches v_(p,n).
void ac3(Check& c) {
  for (const auto& lg : library_groups()) {
    auto g = parse_group(lg.dsl);
    auto r = classification_report(g);
    for (const auto& e : r.cuts) {
      auto name = lg.name + " " + to_string(g, e.cut);
      auto certified = non_definability_certificate(g, e.cut, r.image.classes.explicit_primes);
      if (e.status == CutStatus::Definable) {
        c.expect(!certified && !e.labels.empty(), name + ": definable cut with a certificate");
      } else {
        c.expect(e.status == CutStatus::NonDefinable && certified.has_value(), name + ": no certificate");
        if (certified) {
          // Entries must cover every prime, each with a genuinely p-regular pair.
          auto covered = PrimeSet::none();
          auto threshold = r.image.classes.threshold;
          for (const auto& entry : certified->entries) {
            covered = covered | entry.primes;
            std::vector<PrimeArg> args;
            for (auto p : r.image.classes.explicit_primes) {
              if (entry.primes.contains(p)) args.push_back(PrimeArg::of(p));
            }
            if (entry.primes.finite()) {
              for (auto p : entry.primes.members()) args.push_back(PrimeArg::of(p));
            } else {
              args.push_back(PrimeArg::generic_member());
            }
            for (const auto& a : args) {
              c.expect(is_p_regular(g, entry.low, entry.high, a, threshold), name + ": pair not p-regular");
            }
          }
          c.expect(covered.is_all(), name + ": certificate misses primes");
        }
      }
    }
    c.expect(r.differential.size() == expected_differential_runs(g),
             lg.name + ": " + std::to_string(r.differential.size()) + " differential runs");
    for (const auto& d : r.differential) {
      c.expect(d.mismatches.empty(), lg.name + " p=" + std::to_string(d.p) + " n=" + std::to_string(d.n) + ": " +
                                         std::to_string(d.mismatches.size()) + " mismatches");
      c.expect(d.points >= 200, lg.name + ": fewer than 200 points");
    }
    c.expect(r.red_flags.empty(), lg.name + ": red flags");
  }
}

// 4. Quotient exponents and dp-minimality of the named examples.
void ac4(Check& c) {
  auto k1 = parse_group("lex(Z,Q)");
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) c.expect(group_exponent(k1, p) == QuotientExponent{1}, "k1 n_p");
  c.expect(group_exponent(k1, PrimeArg::generic_member()) == QuotientExponent{1}, "k1 generic n_p");

  auto k2 = parse_group("lex(omega_tower(start=0))");
  c.expect(group_exponent(k2, 2) == QuotientExponent{0}, "k2 n_2");
  for (std::uint64_t k = 1; k <= 8; ++k) c.expect(group_exponent(k2, nth_prime(k)) == QuotientExponent{1}, "k2 n_p_k");
  c.expect(group_exponent(k2, PrimeArg::generic_member()) == QuotientExponent{1}, "k2 generic n_p");

  auto zpi = parse_group("lex(real(1,pi))");
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) c.expect(group_exponent(zpi, p) == QuotientExponent{2}, "zpluspi n_p");
  c.expect(group_exponent(zpi, PrimeArg::generic_member()) == QuotientExponent{2}, "zpluspi generic n_p");

  auto c0 = parse_group("lex(poly_module(Zloc(2),pi))");
  c.expect(group_exponent(c0, 2).is_infinite(), "c0 n_2 finite");

  c.expect(is_dp_minimal(k1), "k1 dp-minimal");
  c.expect(is_dp_minimal(k2), "k2 dp-minimal");
  c.expect(is_dp_minimal(zpi), "zpluspi dp-minimal");
  c.expect(!is_dp_minimal(c0), "c0 not dp-minimal");
}

// First coordinate of a component that is not p-divisible.
std::optional<std::size_t> rigid_coordinate(const LexWord& g, std::uint64_t p) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    bool rigid = std::visit(overloaded{
                                [](const Zed&) { return true; },
                                [](const FreeReal&) { return true; },
                                [p](const LocZ& l) { return l.q == p; },
                                [](const auto&) { return false; },
                            },
                            g[i]);
    if (rigid) return g.offset(i);
  }
  return std::nullopt;
}

// 5. Root oracle: constructed p-th powers, valuations outside pG, field laws.
void ac5(Check& c) {
  std::size_t positive = 0, negative = 0;
  for (std::uint64_t seed = 0; positive < 500; ++seed) {
    for (const auto& dsl : kEffective) {
      for (auto p : kSmallPrimes) {
        if (positive == 500) break;
        auto g = make_group(parse_group(dsl));
        auto y = sample_series(g, 9000 + seed * 31 + p, {2, 2, 3});
        if (p % 2 == 0 && y.leading().coeff < 0) y = series_neg(y);
        auto a = series_pow(y, static_cast<unsigned>(p));
        ++positive;
        bool exists = root_exists(a, p, false);
        c.expect(exists, dsl + ": no root of " + to_string(a));
        if (!exists) continue;
        auto cutoff = v_of(a);
        cutoff.coords.back() += 5;
        auto r = pth_root(a, p, cutoff);
        bool match = r.trunc() ? r == series_truncate(y, *r.trunc()) : r == y;
        c.expect(match, dsl + ": lifted root " + to_string(r) + " vs " + to_string(y));
      }
    }
  }
  for (std::uint64_t seed = 0; negative < 500; ++seed) {
    for (const auto& dsl : kEffective) {
      for (auto p : kSmallPrimes) {
        if (negative == 500) break;
        auto lw = parse_group(dsl);
        auto j = rigid_coordinate(lw, p);
        if (!j) continue;  // p-divisible group: every valuation lies in pG
        auto g = make_group(lw);
        auto s = sample_series(g, 20000 + seed * 31 + p);
        // Move the valuation to gamma with coordinate j = k, k prime to p.
        std::vector<Rational> gamma(lw.total_arity(), Rational(0));
        std::int64_t k = static_cast<std::int64_t>(seed % (p - 1)) + 1 + static_cast<std::int64_t>(p * (seed % 3));
        gamma[*j] = Rational(seed % 2 ? -k : k);
        auto shift = elem_sub(lw, make_element(lw, gamma), v_of(s));
        auto a = series_mul(s, HahnSeries::monomial(g, 1, shift));
        ++negative;
        c.expect(!root_exists(a, p, true), dsl + ": root found for " + to_string(a) + ", p=" + std::to_string(p));
      }
    }
  }
  for (const auto& dsl : kEffective) {
    auto g = make_group(parse_group(dsl));
    const auto& w = *g;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      auto a = sample_series(g, 3 * seed), b = sample_series(g, 3 * seed + 1), d = sample_series(g, 3 * seed + 2);
      c.expect(series_mul(a, series_add(b, d)) == series_add(series_mul(a, b), series_mul(a, d)), dsl + " distributive");
      c.expect(series_mul(series_mul(a, b), d) == series_mul(a, series_mul(b, d)), dsl + " associative");
      c.expect(series_add(a, b) == series_add(b, a), dsl + " commutative");
      c.expect(v_of(series_mul(a, b)) == elem_add(w, v_of(a), v_of(b)), dsl + " v(ab)");
      auto sum = series_add(a, b);
      if (!sum.is_zero()) {
        auto lo = elem_cmp(w, v_of(a), v_of(b)) < 0 ? v_of(a) : v_of(b);
        c.expect(elem_cmp(w, v_of(sum), lo) >= 0, dsl + " ultrametric");
        if (v_of(a) != v_of(b)) c.expect(v_of(sum) == lo, dsl + " strict ultrametric");
      }
    }
  }
}

// 6. psi_p(z) holds iff v(z) > 0 and v(z) is not in pG.
void ac6(Check& c) {
  for (const auto& dsl : kEffective) {
    auto lw = parse_group(dsl);
    auto g = make_group(lw);
    for (auto p : kSmallPrimes) {
      auto psi = build_psi_p(p);
      auto j = rigid_coordinate(lw, p);
      for (std::uint64_t i = 0; i < 200; ++i) {
        auto z = sample_series(g, 500 + i * 17 + p);
        // Half of the samples get a small positive valuation to hit both sides.
        if (i % 2) {
          std::vector<Rational> gamma(lw.total_arity(), Rational(0));
          gamma.back() = Rational(static_cast<long>(i % 7) + 1);
          if (j && i % 4 == 1) gamma[*j] = Rational(i % 8 == 1 ? 0 : 1);
          if (auto e = try_make_element(lw, gamma); e && elem_sign(lw, *e) > 0) {
            z = series_mul(z, HahnSeries::monomial(g, 1, elem_sub(lw, *e, v_of(z))));
          }
        }
        auto v = v_of(z);
        // Independent oracle: pG membership coordinate by coordinate.
        bool in_pg = true;
        for (std::size_t k = 0; k < lw.size(); ++k) {
          for (std::size_t m = lw.offset(k); m < lw.offset(k + 1); ++m) {
            Rational q = v.coords[m] / Rational(static_cast<long>(p));
            q.canonicalize();
            bool ok = std::visit(overloaded{
                                     [&](const Zed&) { return q.get_den() == 1; },
                                     [&](const FreeReal&) { return q.get_den() == 1; },
                                     [&](const LocZ& l) { return mpz_divisible_ui_p(q.get_den_mpz_t(), l.q) == 0; },
                                     [](const auto&) { return true; },
                                 },
                                 lw[k]);
            in_pg = in_pg && ok;
          }
        }
        bool expected = elem_sign(lw, v) > 0 && !in_pg;
        bool got = eval_decidable(psi, {{"x", z}}, g);
        c.expect(got == expected, dsl + " p=" + std::to_string(p) + " z=" + to_string(z));
      }
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 7. Repeated runs agree byte for byte and match the checked-in reports.
void ac7(Check& c) {
  for (const char* name : {"k1", "k2", "zpluspi", "c0"}) {
    std::string dsl;
    for (const auto& lg : library_groups()) {
      if (lg.name == name) dsl = lg.dsl;
    }
    auto g = parse_group(dsl);
    auto r1 = classification_report(g);
    auto r2 = classification_report(g);
    auto text = report_text(r1), json = report_json(r1);
    c.expect(text == report_text(r2) && json == report_json(r2), std::string(name) + ": reports differ between runs");
    c.expect(text == read_file(std::string(ARCLAB_GOLDEN_DIR) + "/" + name + ".txt"), std::string(name) + ".txt golden");
    c.expect(json == read_file(std::string(ARCLAB_GOLDEN_DIR) + "/" + name + ".json"), std::string(name) + ".json golden");
    if (std::string(name) == "zpluspi") {
      bool noted = text.find("discrepancy") != std::string::npos && text.find("v_(p,1) = v_(p,2)") != std::string::npos;
      c.expect(noted, "zpluspi discrepancy note missing");
    }
  }
  // The differential kernel itself, recomputed from scratch serially and in parallel.
  auto g = parse_group("lex(Z,Q)");
  DifferentialOptions o;
  o.parallel = false;
  auto a = differential_verify(g, 2, 1, o);
  o.parallel = true;
  auto b = differential_verify(g, 2, 1, o);
  c.expect(a.points == b.points && a.falsification_runs == b.falsification_runs &&
               a.mismatches.size() == b.mismatches.size(),
           "serial and parallel differential runs differ");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"AC1 phi_p defines v_p (differential + falsification)", ac1},
      {"AC2 real closed residue criterion consistent", ac2},
      {"AC3 classification image, certificates, phi_(p,n) differential", ac3},
      {"AC4 quotient exponents and dp-minimality", ac4},
      {"AC5 root oracle and field laws", ac5},
      {"AC6 psi_p characterization", ac6},
      {"AC7 determinism and golden reports", ac7},
  };
  bool all = true;
  auto start = std::chrono::steady_clock::now();
  for (const auto& [name, run] : criteria) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      run(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = c.failures.empty();
    all = all && ok;
    std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << c.count << " checks, " << secs << " s)" << std::endl;
    for (const auto& f : c.failures) std::cout << "    " << f << std::endl;
  }
  std::cout << "total " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s"
            << std::endl;
  return all ? 0 : 1;
}
