#include "arclab/primes.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace arclab {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::uint64_t nth_prime(std::uint64_t k) {
  std::uint64_t candidate = 2;
  for (std::uint64_t seen = 0;; ++candidate) {
    if (is_prime(candidate)) {
      if (seen == k) return candidate;
      ++seen;
    }
  }
}

std::uint64_t prime_index(std::uint64_t p) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  std::uint64_t index = 0;
  for (std::uint64_t n = 2; n < p; ++n) {
    if (is_prime(n)) ++index;
  }
  return index;
}

namespace {

std::vector<std::uint64_t> canonical(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  for (auto p : v) {
    if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  }
  return v;
}

std::vector<std::uint64_t> set_union(const std::vector<std::uint64_t>& a,
                                     const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint64_t> set_intersection(const std::vector<std::uint64_t>& a,
                                            const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint64_t> set_difference(const std::vector<std::uint64_t>& a,
                                          const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

PrimeSet::PrimeSet(bool cofinite, std::vector<std::uint64_t> members)
    : cofinite_(cofinite), members_(std::move(members)) {}

PrimeSet PrimeSet::of(std::vector<std::uint64_t> primes) {
  return PrimeSet(false, canonical(std::move(primes)));
}

PrimeSet PrimeSet::all_except(std::vector<std::uint64_t> primes) {
  return PrimeSet(true, canonical(std::move(primes)));
}

PrimeSet PrimeSet::first(std::uint64_t k) {
  std::vector<std::uint64_t> v;
  for (std::uint64_t p = 2; v.size() < k; ++p) {
    if (is_prime(p)) v.push_back(p);
  }
  return PrimeSet(false, std::move(v));
}

bool PrimeSet::contains(std::uint64_t p) const {
  bool listed = std::binary_search(members_.begin(), members_.end(), p);
  return cofinite_ ? !listed : listed;
}

PrimeSet PrimeSet::operator|(const PrimeSet& o) const {
  if (!cofinite_ && !o.cofinite_) return PrimeSet(false, set_union(members_, o.members_));
  if (cofinite_ && o.cofinite_) return PrimeSet(true, set_intersection(members_, o.members_));
  const auto& co = cofinite_ ? *this : o;
  const auto& fin = cofinite_ ? o : *this;
  return PrimeSet(true, set_difference(co.members_, fin.members_));
}

PrimeSet PrimeSet::operator&(const PrimeSet& o) const { return ~(~*this | ~o); }

std::string PrimeSet::to_string() const {
  if (is_all()) return "all";
  if (is_empty()) return "none";
  std::ostringstream os;
  if (cofinite_) os << "all except ";
  os << '{';
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) os << ',';
    os << members_[i];
  }
  os << '}';
  return os.str();
}

}  // namespace arclab
