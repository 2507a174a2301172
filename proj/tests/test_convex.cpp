#include <gtest/gtest.h>

#include <cmath>

#include "arclab/convex.hpp"
#include "arclab/group_dsl.hpp"
#include "arclab/hahn.hpp"

using namespace arclab;

namespace {

ConvexCut seg(std::size_t s) { return {s, {}}; }
ConvexCut inner(std::uint64_t m) { return {0, m}; }

LexWord sub_word(const LexWord& g, std::size_t from, std::size_t to) {
  return LexWord(std::vector<ComponentKind>(g.components().begin() + static_cast<std::ptrdiff_t>(from),
                                            g.components().begin() + static_cast<std::ptrdiff_t>(to)));
}

// Small elements of each component; enough to meet every coset of pC for p <= 7.
std::vector<Rational> component_samples(const ComponentKind& c, std::uint64_t p) {
  std::vector<Rational> out;
  const long span = static_cast<long>(p);
  for (long d : {1L, 2L, 3L, 5L}) {
    for (long k = -span; k <= span; ++k) {
      Rational x(k, d);
      x.canonicalize();
      out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (std::holds_alternative<Zed>(c) || std::holds_alternative<FreeReal>(c)) {
    std::erase_if(out, [](const Rational& x) { return x.get_den() != 1; });
  }
  if (auto* l = std::get_if<LocZ>(&c)) {
    std::erase_if(out, [&](const Rational& x) { return x.get_den() % l->q == 0; });
  }
  return out;
}

// log_p of the number of classes of sampled elements modulo pG, by pairwise divisibility tests.
std::uint64_t brute_exponent(const LexWord& g, std::uint64_t p) {
  if (g.size() == 0) return 0;
  std::vector<std::vector<Rational>> per_coord;
  for (const auto& c : g.components()) {
    for (std::size_t i = 0; i < arity(c); ++i) per_coord.push_back(component_samples(c, p));
  }
  std::vector<GroupElement> reps;
  std::vector<std::size_t> idx(per_coord.size(), 0);
  while (true) {
    std::vector<Rational> coords;
    for (std::size_t i = 0; i < idx.size(); ++i) coords.push_back(per_coord[i][idx[i]]);
    auto a = make_element(g, coords);
    bool fresh = std::none_of(reps.begin(), reps.end(),
                              [&](const GroupElement& r) { return elem_p_divisible(g, elem_sub(g, a, r), p); });
    if (fresh) reps.push_back(a);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == per_coord[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  std::uint64_t e = 0, n = 1;
  while (n < reps.size()) n *= p, ++e;
  EXPECT_EQ(n, reps.size()) << "class count is not a power of p";
  return e;
}

bool brute_divisible(const LexWord& g, std::size_t from, std::uint64_t p) {
  for (std::size_t i = from; i < g.size(); ++i) {
    for (std::size_t j = g.offset(i); j < g.offset(i + 1); ++j) {
      if (!elem_p_divisible(g, unit_element(g, j), p)) return false;
    }
  }
  return true;
}

const std::vector<std::string> kEffective = {
    "lex(Z,Q)", "lex(Q)", "lex(real(1,pi))", "lex(Z,Z)", "lex(Zloc(2),Q)", "lex(Q,Z)",
    "lex(Zloc(3),Z,Q)", "lex(Q,Zloc(5),Zloc(2))", "lex(real(pi),Q,Z)", "lex(Z,Q,Z,Q)",
};

const std::vector<std::string> kAll = {
    "lex(Z,Q)", "lex(Q)", "lex(real(1,pi))", "lex(Z,Z)", "lex(Zloc(2),Q)", "lex(omega_tower(start=0))",
    "lex(poly_module(Zloc(2),pi))", "lex(Q,omega_tower(start=3),Z)", "lex(Zloc(7),omega_tower(start=0),Q)",
    "lex(omega_tower(start=0),omega_tower(start=2))",
};

}  // namespace

TEST(Chain, ArchimedeanWords) {
  auto g = parse_group("lex(Z,Q)");
  auto cuts = convex_cuts(g).take(10);
  EXPECT_EQ(cuts, (std::vector<ConvexCut>{ConvexCut::top(), seg(1), ConvexCut::bottom(g)}));
  auto q = parse_group("lex(Q)");
  EXPECT_EQ(convex_cuts(q).take(10), (std::vector<ConvexCut>{ConvexCut::top(), ConvexCut::bottom(q)}));
  auto pm = parse_group("lex(poly_module(Zloc(2),pi))");
  EXPECT_EQ(convex_cuts(pm).take(10).size(), 2u);
}

TEST(Chain, OmegaTowerIsLazy) {
  auto g = parse_group("lex(omega_tower(start=0))");
  auto cuts = convex_cuts(g).take(4);
  EXPECT_EQ(cuts, (std::vector<ConvexCut>{ConvexCut::top(), inner(1), inner(2), inner(3)}));
  auto windowed = convex_cuts(g, 2).take(10);
  EXPECT_EQ(windowed, (std::vector<ConvexCut>{ConvexCut::top(), inner(1), inner(2), ConvexCut::bottom(g)}));
  auto h = parse_group("lex(Z,omega_tower(start=0),Q)");
  auto hw = convex_cuts(h, 1).take(10);
  EXPECT_EQ(hw, (std::vector<ConvexCut>{ConvexCut::top(), seg(1), ConvexCut{1, 1}, seg(2), ConvexCut::bottom(h)}));
  for (std::size_t i = 1; i < hw.size(); ++i) EXPECT_TRUE(deeper(hw[i], hw[i - 1]));
}

TEST(Cuts, Printing) {
  auto g = parse_group("lex(Z,omega_tower(start=0))");
  EXPECT_EQ(to_string(g, ConvexCut::top()), "Top");
  EXPECT_EQ(to_string(g, ConvexCut::bottom(g)), "Bottom");
  EXPECT_EQ(to_string(g, seg(1)), "seg=1");
  EXPECT_EQ(to_string(g, ConvexCut{1, 2}), "seg=1/inner=2");
  EXPECT_THROW(make_cut(g, 0, 1), std::invalid_argument);
  EXPECT_EQ(make_cut(g, 1, 0), seg(1));
}

TEST(SuffixDivisible, Examples) {
  auto g = parse_group("lex(Z,Q)");
  EXPECT_TRUE(suffix_divisible_primes(g, seg(1)).is_all());
  EXPECT_TRUE(suffix_divisible_primes(g, ConvexCut::bottom(g)).is_all());
  EXPECT_TRUE(suffix_divisible_primes(g, ConvexCut::top()).is_empty());
  auto t = parse_group("lex(omega_tower(start=0))");
  // The tail from inner(m) is the sum of B_k over k > m; it is p_k-divisible exactly for k <= m.
  for (std::uint64_t m = 1; m < 6; ++m) EXPECT_EQ(suffix_divisible_primes(t, inner(m)), PrimeSet::first(m + 1));
  EXPECT_EQ(suffix_divisible_primes(t, ConvexCut::top()), PrimeSet::of({2}));
}

TEST(MaxPDivisible, Examples) {
  auto g = parse_group("lex(Z,Q)");
  EXPECT_EQ(max_p_divisible(g, 3), seg(1));
  auto r = parse_group("lex(real(1,pi))");
  for (std::uint64_t p : {2, 3, 5, 101}) EXPECT_EQ(max_p_divisible(r, p), ConvexCut::bottom(r));
  auto t = parse_group("lex(omega_tower(start=0))");
  EXPECT_EQ(max_p_divisible(t, 2), ConvexCut::top());
  for (std::uint64_t j = 1; j < 30; ++j) EXPECT_EQ(max_p_divisible(t, nth_prime(j)), inner(j));
}

TEST(MaxPDivisible, BruteForceOracle) {
  for (const auto& w : kEffective) {
    auto g = parse_group(w);
    for (std::uint64_t p : {2, 3, 5, 7, 11}) {
      std::size_t s = 0;
      while (!brute_divisible(g, s, p)) ++s;
      EXPECT_EQ(max_p_divisible(g, p), seg(s)) << w << " p=" << p;
    }
  }
}

TEST(MaxDivisible, Examples) {
  EXPECT_EQ(max_divisible(parse_group("lex(Z,Q)")), seg(1));
  auto t = parse_group("lex(omega_tower(start=0))");
  EXPECT_EQ(max_divisible(t), ConvexCut::bottom(t));
  EXPECT_EQ(max_divisible(parse_group("lex(Q)")), ConvexCut::top());
  EXPECT_EQ(max_divisible(parse_group("lex(Q,Zloc(2),Zloc(3),Q)")), seg(3));
}

TEST(QuotientExponent, Examples) {
  auto g = parse_group("lex(Z,Q)");
  EXPECT_EQ(group_exponent(g, 5), QuotientExponent{1});
  auto r = parse_group("lex(real(1,pi))");
  for (std::uint64_t p : {2, 3, 5, 7, 97}) EXPECT_EQ(group_exponent(r, p), QuotientExponent{2});
  auto t = parse_group("lex(omega_tower(start=0))");
  EXPECT_EQ(group_exponent(t, 2), QuotientExponent{0});
  for (std::uint64_t k = 1; k < 25; ++k) EXPECT_EQ(group_exponent(t, nth_prime(k)), QuotientExponent{1});
  auto c0 = parse_group("lex(poly_module(Zloc(2),pi))");
  EXPECT_TRUE(group_exponent(c0, 2).is_infinite());
  EXPECT_EQ(group_exponent(c0, 3), QuotientExponent{0});
  EXPECT_EQ(quotient_exponent(t, inner(3), inner(1), 5), QuotientExponent{1});
  EXPECT_EQ(quotient_exponent(t, inner(3), inner(1), 7), QuotientExponent{1});
  EXPECT_EQ(quotient_exponent(t, inner(3), inner(1), 3), QuotientExponent{0});
}

TEST(QuotientExponent, BruteForceOracle) {
  for (const auto& w : kEffective) {
    auto g = parse_group(w);
    for (std::uint64_t p : {2, 3, 5}) {
      for (std::size_t lo = 0; lo <= g.size(); ++lo) {
        for (std::size_t hi = 0; hi <= lo; ++hi) {
          auto e = quotient_exponent(g, seg(lo), seg(hi), p);
          ASSERT_FALSE(e.is_infinite());
          EXPECT_EQ(*e.value, brute_exponent(sub_word(g, hi, lo), p)) << w << " " << hi << ".." << lo;
        }
      }
    }
  }
}

TEST(Gpn, Examples) {
  auto g = parse_group("lex(Z,Q)");
  EXPECT_EQ(g_pn(g, 2, 0), seg(1));
  EXPECT_EQ(g_pn(g, 2, 1), ConvexCut::top());
  auto r = parse_group("lex(real(1,pi))");
  EXPECT_EQ(g_pn(r, 2, 0), ConvexCut::bottom(r));
  EXPECT_EQ(g_pn(r, 2, 1), ConvexCut::bottom(r));
  EXPECT_EQ(g_pn(r, 2, 2), ConvexCut::top());
  auto c0 = parse_group("lex(poly_module(Zloc(2),pi))");
  EXPECT_EQ(g_pn(c0, 2, 1000), ConvexCut::bottom(c0));
}

TEST(Gpn, BruteForceOracle) {
  for (const auto& w : kEffective) {
    auto g = parse_group(w);
    for (std::uint64_t p : {2, 3, 5}) {
      for (std::uint64_t n = 0; n <= 3; ++n) {
        std::size_t s = 0;
        while (brute_exponent(sub_word(g, s, g.size()), p) > n) ++s;
        EXPECT_EQ(g_pn(g, p, n), seg(s)) << w << " p=" << p << " n=" << n;
      }
    }
  }
}

TEST(Gpn, ChainProperty) {
  for (const auto& w : kAll) {
    auto g = parse_group(w);
    auto g0 = max_divisible(g);
    for (std::uint64_t k = 0; k < 12; ++k) {
      auto p = nth_prime(k);
      auto gp = max_p_divisible(g, p);
      EXPECT_LE(depth_compare(gp, g0), 0) << w;
      EXPECT_EQ(g_pn(g, p, 0), gp) << w;
      for (std::uint64_t n = 0; n < 4; ++n) EXPECT_LE(depth_compare(g_pn(g, p, n + 1), g_pn(g, p, n)), 0);
      auto np = group_exponent(g, p);
      if (!np.is_infinite()) {
        EXPECT_EQ(g_pn(g, p, *np.value), ConvexCut::top()) << w;
      }
      if (is_dp_minimal(g)) {
        for (std::uint64_t n = 0; n < 3; ++n) {
          auto c = g_pn(g, p, n);
          for (std::uint64_t q : {2, 3, 5, 7}) {
            EXPECT_FALSE(quotient_exponent(g, ConvexCut::bottom(g), c, q).is_infinite());
          }
        }
      }
    }
  }
}

TEST(DpMinimal, Examples) {
  EXPECT_TRUE(is_dp_minimal(parse_group("lex(Z,Q)")));
  EXPECT_FALSE(is_dp_minimal(parse_group("lex(poly_module(Zloc(2),pi))")));
  EXPECT_TRUE(is_dp_minimal(parse_group("lex(omega_tower(start=0))")));
  EXPECT_TRUE(is_dp_minimal(parse_group("lex(real(1,pi))")));
  EXPECT_FALSE(is_dp_minimal(parse_group("lex(Q,poly_module(Zloc(5),pi),Z)")));
}

TEST(ThmCondition, Examples) {
  EXPECT_TRUE(thm_condition_prime(parse_group("lex(Z,Q)")).is_all());
  EXPECT_TRUE(thm_condition_prime(parse_group("lex(omega_tower(start=0))")).is_empty());
  EXPECT_TRUE(thm_condition_prime(parse_group("lex(real(1,pi))")).is_all());
  EXPECT_EQ(thm_condition_prime(parse_group("lex(Zloc(2),Q)")), PrimeSet::of({2}));
  // G_p is everything for p != 2 while G_0 = G_2 is trivial.
  EXPECT_EQ(thm_condition_prime(parse_group("lex(poly_module(Zloc(2),pi))")), PrimeSet::of({2}));
}

// Nonempty exactly when G_0 shows up among the G_p.
TEST(ThmCondition, DefinitionalIdentity) {
  for (const auto& w : kAll) {
    auto g = parse_group(w);
    auto primes = thm_condition_prime(g);
    auto g0 = max_divisible(g);
    for (std::uint64_t k = 0; k < 20; ++k) {
      auto p = nth_prime(k);
      EXPECT_EQ(primes.contains(p), max_p_divisible(g, p) == g0) << w << " p=" << p;
    }
  }
}

TEST(PRegular, Examples) {
  auto g = parse_group("lex(Z,Q)");
  auto zz = parse_group("lex(Z,Z)");
  for (std::uint64_t p : {2, 3, 5}) {
    EXPECT_TRUE(is_p_regular(g, ConvexCut::bottom(g), seg(1), p));
    EXPECT_FALSE(is_p_regular(zz, ConvexCut::bottom(zz), ConvexCut::top(), p));
    EXPECT_TRUE(is_p_regular(g, seg(1), ConvexCut::top(), p));
  }
  EXPECT_THROW(is_p_regular(g, seg(1), seg(1), 2), std::logic_error);
  EXPECT_THROW(is_p_regular(g, ConvexCut::top(), seg(1), 2), std::logic_error);
}

TEST(PRegular, BruteForceOracle) {
  for (const auto& w : kEffective) {
    auto g = parse_group(w);
    for (std::uint64_t p : {2, 3, 5}) {
      for (std::size_t lo = 1; lo <= g.size(); ++lo) {
        for (std::size_t hi = 0; hi < lo; ++hi) {
          bool oracle = true;
          for (std::size_t m = hi + 1; m < lo; ++m) oracle = oracle && brute_exponent(sub_word(g, hi, m), p) == 0;
          EXPECT_EQ(is_p_regular(g, seg(lo), seg(hi), p), oracle) << w << " " << hi << ".." << lo;
        }
      }
    }
  }
}

TEST(Certificate, Examples) {
  auto g = parse_group("lex(Z,Q)");
  auto cert = non_definability_certificate(g, ConvexCut::bottom(g));
  ASSERT_TRUE(cert.has_value());
  ASSERT_EQ(cert->entries.size(), 1u);
  EXPECT_TRUE(cert->entries[0].primes.is_all());
  EXPECT_EQ(cert->entries[0].low, SymCut::from(ConvexCut::bottom(g)));
  EXPECT_EQ(cert->entries[0].high, SymCut::from(seg(1)));
  EXPECT_EQ(cert->entries[0].rule, WitnessRule::DivisibleBelowBottomConvention);
  EXPECT_FALSE(non_definability_certificate(g, seg(1)).has_value());
  EXPECT_FALSE(non_definability_certificate(g, ConvexCut::top()).has_value());
}

TEST(Certificate, OmegaTowerBottom) {
  auto t = parse_group("lex(omega_tower(start=0))");
  auto cert = non_definability_certificate(t, ConvexCut::bottom(t));
  ASSERT_TRUE(cert.has_value());
  PrimeSet covered;
  for (const auto& e : cert->entries) {
    EXPECT_TRUE((covered & e.primes).is_empty());
    covered = covered | e.primes;
  }
  EXPECT_TRUE(covered.is_all());
  for (std::uint64_t j = 0; j < 40; ++j) {
    auto p = nth_prime(j);
    auto it = std::find_if(cert->entries.begin(), cert->entries.end(),
                           [&](const CertificateEntry& e) { return e.primes.contains(p); });
    ASSERT_NE(it, cert->entries.end());
    EXPECT_EQ(it->low.realize(j), ConvexCut::bottom(t));
    EXPECT_EQ(it->high.realize(j), j == 0 ? ConvexCut::top() : inner(j)) << "p=" << p;
    EXPECT_TRUE(is_p_regular(t, it->low.realize(j), it->high.realize(j), p));
  }
}

// Every witness straddles the target and is p-regular for each prime it covers.
TEST(Certificate, WitnessesCheckOut) {
  for (const auto& w : kAll) {
    auto g = parse_group(w);
    for (const auto& c : convex_cuts(g, 3)) {
      auto cert = non_definability_certificate(g, c);
      if (!cert) continue;
      for (const auto& e : cert->entries) {
        for (std::uint64_t k = 0; k < 30; ++k) {
          auto p = nth_prime(k);
          if (!e.primes.contains(p)) continue;
          auto lo = e.low.realize(k), hi = e.high.realize(k);
          EXPECT_TRUE(deeper(lo, hi));
          EXPECT_LT(depth_compare(hi, c), 0) << w;
          EXPECT_GE(depth_compare(lo, c), 0) << w;
          if (lo == c) {
            EXPECT_TRUE(is_bottom(g, c));
            EXPECT_EQ(e.rule, WitnessRule::DivisibleBelowBottomConvention);
          }
          EXPECT_TRUE(is_p_regular(g, lo, hi, p)) << w << " " << to_string(g, c) << " p=" << p;
        }
      }
    }
  }
}

TEST(PrimeClasses, GenericClassAgreesWithConcretePrimes) {
  for (const auto& w : kAll) {
    auto g = parse_group(w);
    auto classes = prime_classes(g);
    for (std::uint64_t k = classes.threshold; k < classes.threshold + 15; ++k) {
      auto p = nth_prime(k);
      if (!classes.generic_set().contains(p)) continue;
      for (std::uint64_t n = 0; n < 3; ++n) {
        EXPECT_EQ(g_pn(g, PrimeArg::generic_member(), n).realize(k), g_pn(g, p, n)) << w << " p=" << p;
      }
      EXPECT_EQ(group_exponent(g, PrimeArg::generic_member()), group_exponent(g, p));
    }
  }
}
