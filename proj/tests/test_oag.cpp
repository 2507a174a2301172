#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "arclab/errors.hpp"
#include "arclab/group_dsl.hpp"
#include "arclab/oag.hpp"

using namespace arclab;

namespace {

GroupElement el(const LexWord& g, std::string_view s) { return parse_element(g, s); }

const std::vector<std::string> kWords = {
    "lex(Z,Q)",       "lex(Q)",         "lex(real(1,pi))",   "lex(Z,Z)",
    "lex(Zloc(2),Q)", "lex(Q,Z)",       "lex(omega_tower(start=0))",
    "lex(poly_module(Zloc(2),pi))",     "lex(Z,real(1,pi),Zloc(3))", "lex(real(1/2),omega_tower(start=4),Q)",
};

}  // namespace

TEST(GroupDsl, ParsesExamples) {
  auto g = parse_group("lex(Z, Q)");
  ASSERT_EQ(g.size(), 2u);
  EXPECT_TRUE(std::holds_alternative<Zed>(g[0]));
  EXPECT_TRUE(std::holds_alternative<Rat>(g[1]));
  EXPECT_EQ(parse_group("lex(Q)").size(), 1u);
  auto r = parse_group("lex(real(1, pi))");
  const auto& f = std::get<FreeReal>(r[0]);
  ASSERT_EQ(f.gens.size(), 2u);
  EXPECT_EQ(f.gens[0], RealGenerator::rational(1));
  EXPECT_EQ(f.gens[1], RealGenerator::pi());
  EXPECT_EQ(r.total_arity(), 2u);
}

TEST(GroupDsl, RoundTrip) {
  for (const auto& w : kWords) {
    auto g = parse_group(w);
    EXPECT_EQ(to_string(g), w);
    EXPECT_EQ(parse_group(to_string(g)), g);
  }
}

TEST(GroupDsl, RandomRoundTrip) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> parts = {"Z", "Q", "Zloc(5)", "real(pi)", "real(1,pi)", "real(-3/4,pi)",
                                          "omega_tower(start=2)", "poly_module(Zloc(3),pi)", "Zloc(2)"};
  for (int i = 0; i < 200; ++i) {
    std::string s = "lex(";
    auto n = 1 + rng() % 4;
    for (std::size_t j = 0; j < n; ++j) s += (j ? "," : "") + parts[rng() % parts.size()];
    s += ")";
    auto g = parse_group(s);
    EXPECT_EQ(parse_group(to_string(g)), g) << s;
  }
}

TEST(GroupDsl, Errors) {
  try {
    parse_group("lex(Z, W)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 7u);
    EXPECT_NE(std::string(e.what()).find("unknown component kind"), std::string::npos);
  }
  EXPECT_THROW(parse_group("lex(real())"), ParseError);
  EXPECT_THROW(parse_group("lex(Zloc(4))"), ParseError);
  EXPECT_THROW(parse_group("lex(Z"), ParseError);
  EXPECT_THROW(parse_group("lex(Z) x"), ParseError);
  EXPECT_THROW(parse_group("lex()"), ParseError);
}

TEST(ComponentKinds, ClosedForms) {
  EXPECT_TRUE(divisible_primes(Zed{}).is_empty());
  EXPECT_TRUE(divisible_primes(Rat{}).is_all());
  EXPECT_EQ(divisible_primes(LocZ{3}), PrimeSet::all_except({3}));
  EXPECT_TRUE(divisible_primes(FreeReal{{RealGenerator::pi()}}).is_empty());
  EXPECT_EQ(divisible_primes(PolyModule{2, RealGenerator::pi()}), PrimeSet::all_except({2}));
  for (std::uint64_t p : {2, 3, 5, 7, 11}) {
    EXPECT_EQ(quotient_exponent(Zed{}, p), QuotientExponent{1});
    EXPECT_EQ(quotient_exponent(Rat{}, p), QuotientExponent{0});
    EXPECT_EQ(quotient_exponent(LocZ{5}, p), QuotientExponent{p == 5 ? 1u : 0u});
    EXPECT_EQ(quotient_exponent(FreeReal{{RealGenerator::rational(1), RealGenerator::pi()}}, p),
              QuotientExponent{2});
    EXPECT_EQ(quotient_exponent(OmegaTower{0}, p), QuotientExponent{p == 2 ? 0u : 1u});
    EXPECT_EQ(quotient_exponent(PolyModule{2, RealGenerator::pi()}, p).is_infinite(), p == 2);
  }
  EXPECT_FALSE(is_effective(OmegaTower{0}));
  EXPECT_FALSE(is_effective(PolyModule{2, RealGenerator::pi()}));
  EXPECT_TRUE(is_effective(LocZ{2}));
}

TEST(Elements, Addition) {
  auto g = parse_group("lex(Z,Q)");
  EXPECT_EQ(elem_add(g, el(g, "(1,1/2)"), el(g, "(2,-1/2)")), el(g, "(3,0)"));
  auto r = parse_group("lex(real(1,pi))");
  EXPECT_EQ(elem_add(r, el(r, "(1,0)"), el(r, "(0,1)")), el(r, "(1,1)"));
  auto a = el(g, "(4,-2/7)");
  EXPECT_TRUE(is_zero(elem_add(g, a, elem_neg(g, a))));
}

TEST(Elements, ShapeAndEffectivity) {
  auto g = parse_group("lex(Z,Q)");
  EXPECT_THROW(make_element(g, {Rational(1)}), std::invalid_argument);
  EXPECT_THROW(make_element(g, {Rational(1, 2), Rational(0)}), std::invalid_argument);
  auto l = parse_group("lex(Zloc(3))");
  EXPECT_THROW(make_element(l, {Rational(1, 3)}), std::invalid_argument);
  EXPECT_NO_THROW(make_element(l, {Rational(1, 4)}));
  auto t = parse_group("lex(omega_tower(start=0))");
  EXPECT_THROW(zero_element(t), NonEffectiveGroup);
}

TEST(Elements, Comparison) {
  auto g = parse_group("lex(Z,Q)");
  EXPECT_EQ(elem_cmp(g, el(g, "(1,-100)"), el(g, "(0,100)")), std::strong_ordering::greater);
  auto r = parse_group("lex(real(1,pi))");
  // 3 - pi is about -0.1416.
  EXPECT_EQ(elem_cmp(r, el(r, "(3,-1)"), el(r, "(0,0)")), std::strong_ordering::less);
  EXPECT_LT(3.0 - M_PI, 0.0);
  EXPECT_EQ(elem_cmp(r, el(r, "(-4,1)"), el(r, "(0,0)")), std::strong_ordering::less);
  auto a = el(g, "(2,1/9)");
  EXPECT_EQ(elem_cmp(g, a, a), std::strong_ordering::equal);
}

// 355/113 approximates pi to within 3e-7 from above; 22/7 is above, 333/106 below.
TEST(Elements, PiComparisonsNearRationalApproximations) {
  auto r = parse_group("lex(real(1,pi))");
  EXPECT_EQ(elem_sign(r, el(r, "(-355,113)")), -1);
  EXPECT_EQ(elem_sign(r, el(r, "(-22,7)")), -1);
  EXPECT_EQ(elem_sign(r, el(r, "(-333,106)")), 1);
  EXPECT_EQ(elem_sign(r, el(r, "(-103993,33102)")), 1);  // 103993/33102 > pi by about 6e-10
  EXPECT_EQ(elem_sign(r, el(r, "(103993,-33102)")), -1);
  auto enc = pi_enclosure(200);
  EXPECT_LT(enc.lo, enc.hi);
  EXPECT_LT(Rational(314159, 100000), enc.lo);
  EXPECT_LT(enc.hi, Rational(314160, 100000));
  EXPECT_LT(enc.hi - enc.lo, Rational(1, 1000000000));
}

TEST(Elements, FreeRealAgreesWithRationalComparison) {
  auto r = parse_group("lex(real(1,pi))");
  auto q = parse_group("lex(Q)");
  for (int a = -6; a <= 6; ++a) {
    for (int b = -6; b <= 6; ++b) {
      auto x = make_element(r, {Rational(a), Rational(0)});
      auto y = make_element(r, {Rational(b), Rational(0)});
      EXPECT_EQ(elem_cmp(r, x, y), elem_cmp(q, make_element(q, {Rational(a)}), make_element(q, {Rational(b)})));
    }
  }
  // Rational generators scale the coordinate.
  auto h = parse_group("lex(real(1/3,pi))");
  EXPECT_EQ(elem_sign(h, el(h, "(10,-1)")), 1);   // 10/3 - pi > 0
  EXPECT_EQ(elem_sign(h, el(h, "(9,-1)")), -1);   // 3 - pi < 0
}

TEST(Elements, OrderCompatibleWithAddition) {
  auto g = parse_group("lex(Z,real(1,pi),Zloc(3))");
  std::mt19937_64 rng(11);
  auto draw = [&] {
    std::vector<Rational> c;
    for (int i = 0; i < 3; ++i) c.emplace_back(static_cast<long>(rng() % 7) - 3);
    Rational loc(static_cast<long>(rng() % 9) - 4, 1 + rng() % 2);
    loc.canonicalize();
    c.push_back(loc);
    return make_element(g, c);
  };
  for (int i = 0; i < 300; ++i) {
    auto a = draw(), b = draw(), c = draw();
    EXPECT_EQ(elem_cmp(g, a, b), elem_cmp(g, elem_add(g, a, c), elem_add(g, b, c)));
    EXPECT_EQ(elem_cmp(g, a, b), 0 <=> elem_sign(g, elem_sub(g, b, a)));
  }
}

TEST(Elements, PDivisibility) {
  auto g = parse_group("lex(Z,Q)");
  EXPECT_TRUE(elem_p_divisible(g, el(g, "(2,1/3)"), 2));
  EXPECT_FALSE(elem_p_divisible(g, el(g, "(1,0)"), 2));
  auto r = parse_group("lex(real(1,pi))");
  EXPECT_TRUE(elem_p_divisible(r, el(r, "(2,4)"), 2));
  EXPECT_FALSE(elem_p_divisible(r, el(r, "(2,3)"), 2));
  auto l = parse_group("lex(Zloc(3))");
  EXPECT_TRUE(elem_p_divisible(l, el(l, "(1/2)"), 2));
  EXPECT_FALSE(elem_p_divisible(l, el(l, "(1/2)"), 3));
  EXPECT_TRUE(elem_p_divisible(l, el(l, "(3/2)"), 3));
}

// Divisibility exactly when a coordinatewise divider exists inside the group.
TEST(Elements, PDivisibleIffDividerExists) {
  auto g = parse_group("lex(Z,Zloc(3),Q,real(1,pi))");
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<Rational> c;
    c.emplace_back(static_cast<long>(rng() % 19) - 9);
    Rational loc(static_cast<long>(rng() % 19) - 9, 1 + rng() % 2 * 3 + rng() % 2);
    loc.canonicalize();
    if (loc.get_den() % 3 == 0) loc = loc.get_num();
    c.push_back(loc);
    c.emplace_back(static_cast<long>(rng() % 9) - 4, 1 + rng() % 5);
    c.back().canonicalize();
    c.emplace_back(static_cast<long>(rng() % 9) - 4);
    c.emplace_back(static_cast<long>(rng() % 9) - 4);
    auto a = make_element(g, c);
    for (std::uint64_t p : {2, 3, 5}) {
      bool divider_in_group = true;
      try {
        std::vector<Rational> d;
        for (auto& x : a.coords) d.push_back(x / Rational(static_cast<unsigned long>(p)));
        make_element(g, d);
      } catch (const std::invalid_argument&) {
        divider_in_group = false;
      }
      EXPECT_EQ(elem_p_divisible(g, a, p), divider_in_group);
      if (auto b = elem_divide(g, a, p)) {
        EXPECT_EQ(elem_scale(g, *b, Integer(static_cast<unsigned long>(p))), a);
      }
    }
  }
}

TEST(Elements, CosetResidues) {
  auto g = parse_group("lex(Z,Q,real(1,pi))");
  auto a = el(g, "(5,1/3,-3,4)");
  EXPECT_EQ(coset_mod_p(g, a, 2, 0), (std::vector<std::uint64_t>{1, 0, 1, 0}));
  EXPECT_EQ(coset_mod_p(g, a, 3, 1), (std::vector<std::uint64_t>{0, 0, 0, 1}));
  // Same residues exactly when the difference is p-divisible.
  auto b = el(g, "(3,7,1,2)");
  EXPECT_EQ(coset_mod_p(g, a, 2, 0) == coset_mod_p(g, b, 2, 0), elem_p_divisible(g, elem_sub(g, a, b), 2));
}
