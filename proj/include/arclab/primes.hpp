#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace arclab {

bool is_prime(std::uint64_t n);

/// p_0 = 2, p_1 = 3, ...
std::uint64_t nth_prime(std::uint64_t k);

/// Inverse of nth_prime. Throws std::invalid_argument for non-primes.
std::uint64_t prime_index(std::uint64_t p);

/// A finite or cofinite set of primes.
///
/// Cofinite sets store the excluded primes. Member lists are kept sorted and
/// duplicate-free so that structural equality is set equality.
class PrimeSet {
 public:
  PrimeSet() = default;

  static PrimeSet none() { return PrimeSet{}; }
  static PrimeSet all() { return PrimeSet(true, {}); }
  static PrimeSet of(std::vector<std::uint64_t> primes);
  static PrimeSet all_except(std::vector<std::uint64_t> primes);
  /// {p_0, ..., p_{k-1}}
  static PrimeSet first(std::uint64_t k);

  bool cofinite() const { return cofinite_; }
  bool finite() const { return !cofinite_; }
  /// Listed primes when finite, excluded primes when cofinite.
  const std::vector<std::uint64_t>& members() const { return members_; }

  bool contains(std::uint64_t p) const;
  bool is_all() const { return cofinite_ && members_.empty(); }
  bool is_empty() const { return !cofinite_ && members_.empty(); }

  PrimeSet operator|(const PrimeSet& o) const;
  PrimeSet operator&(const PrimeSet& o) const;
  PrimeSet operator~() const { return PrimeSet(!cofinite_, members_); }
  PrimeSet operator-(const PrimeSet& o) const { return *this & ~o; }

  bool operator==(const PrimeSet&) const = default;

  /// "all", "none", "{2,3}", "all except {2}"
  std::string to_string() const;

 private:
  PrimeSet(bool cofinite, std::vector<std::uint64_t> members);

  bool cofinite_ = false;
  std::vector<std::uint64_t> members_;
};

}  // namespace arclab
