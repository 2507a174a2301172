#include <gtest/gtest.h>

#include "arclab/primes.hpp"

using namespace arclab;

TEST(Primes, Enumeration) {
  EXPECT_EQ(nth_prime(0), 2u);
  EXPECT_EQ(nth_prime(1), 3u);
  EXPECT_EQ(nth_prime(9), 29u);
  for (std::uint64_t k = 0; k < 200; ++k) EXPECT_EQ(prime_index(nth_prime(k)), k);
  EXPECT_THROW(prime_index(9), std::invalid_argument);
}

TEST(Primes, TrialDivisionOracle) {
  for (std::uint64_t n = 0; n < 2000; ++n) {
    bool oracle = n >= 2;
    for (std::uint64_t d = 2; d * d <= n; ++d) oracle = oracle && n % d != 0;
    EXPECT_EQ(is_prime(n), oracle) << n;
  }
}

TEST(PrimeSet, CanonicalMembers) {
  auto s = PrimeSet::of({5, 2, 5, 3});
  EXPECT_EQ(s.members(), (std::vector<std::uint64_t>{2, 3, 5}));
  EXPECT_EQ(s.to_string(), "{2,3,5}");
  EXPECT_EQ(PrimeSet::all_except({7, 2}).to_string(), "all except {2,7}");
  EXPECT_EQ(PrimeSet::all().to_string(), "all");
  EXPECT_EQ(PrimeSet::none().to_string(), "none");
  EXPECT_EQ(PrimeSet::first(3), PrimeSet::of({2, 3, 5}));
}

// Membership over a window of primes decides equality for sets mentioning only small primes.
TEST(PrimeSet, BooleanAlgebraAgainstMembership) {
  std::vector<PrimeSet> sets = {PrimeSet::none(),        PrimeSet::all(),           PrimeSet::of({2}),
                                PrimeSet::of({3, 5}),    PrimeSet::all_except({2}), PrimeSet::all_except({3, 7}),
                                PrimeSet::of({2, 3, 5, 7}), PrimeSet::first(2)};
  for (const auto& a : sets) {
    for (const auto& b : sets) {
      for (std::uint64_t k = 0; k < 12; ++k) {
        auto p = nth_prime(k);
        EXPECT_EQ((a | b).contains(p), a.contains(p) || b.contains(p));
        EXPECT_EQ((a & b).contains(p), a.contains(p) && b.contains(p));
        EXPECT_EQ((~a).contains(p), !a.contains(p));
        EXPECT_EQ((a - b).contains(p), a.contains(p) && !b.contains(p));
      }
      EXPECT_EQ(~(a | b), (~a) & (~b));
      EXPECT_EQ((a | b).cofinite(), a.cofinite() || b.cofinite());
    }
  }
}
