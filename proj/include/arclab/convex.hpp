#pragma once

#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arclab/oag.hpp"
#include "arclab/primes.hpp"

namespace arclab {

/// A convex subgroup of a LexWord, named by where it starts.
///
/// seg = i selects the suffix of components i..end (seg = 0 is the whole group,
/// seg = size() the trivial group). inner = m, allowed only when component seg
/// is an omega tower, drops the first m summands of that tower as well.
struct ConvexCut {
  std::size_t seg = 0;
  std::optional<std::uint64_t> inner;

  static ConvexCut top() { return {0, {}}; }
  static ConvexCut bottom(const LexWord& g) { return {g.size(), {}}; }

  bool operator==(const ConvexCut&) const = default;
};

/// Validates and normalizes (inner = 0 is dropped).
ConvexCut make_cut(const LexWord& g, std::size_t seg, std::optional<std::uint64_t> inner = {});
bool is_top(const ConvexCut& c);
bool is_bottom(const LexWord& g, const ConvexCut& c);
/// Negative when a is shallower (a larger subgroup) than b.
int depth_compare(const ConvexCut& a, const ConvexCut& b);
/// a names a strictly smaller subgroup than b.
inline bool deeper(const ConvexCut& a, const ConvexCut& b) { return depth_compare(a, b) > 0; }
std::string to_string(const LexWord& g, const ConvexCut& c);

/// Lazily enumerated chain of convex subgroups, Top first, strictly decreasing.
///
/// Omega towers expand into inner cuts 1, 2, ...; with no window the enumeration
/// never leaves the first tower it meets. A window caps the inner cuts listed
/// per tower so that everything below stays reachable.
class CutChain {
 public:
  explicit CutChain(const LexWord& g, std::optional<std::uint64_t> inner_window = {})
      : group_(&g), window_(inner_window) {}

  class iterator {
   public:
    using value_type = ConvexCut;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    const ConvexCut& operator*() const { return current_; }
    const ConvexCut* operator->() const { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    bool operator==(std::default_sentinel_t) const { return done_; }

   private:
    friend class CutChain;
    const CutChain* chain_ = nullptr;
    ConvexCut current_;
    bool done_ = false;
  };

  iterator begin() const;
  std::default_sentinel_t end() const { return {}; }
  /// At most `limit` cuts from the front of the chain.
  std::vector<ConvexCut> take(std::size_t limit) const;

 private:
  const LexWord* group_;
  std::optional<std::uint64_t> window_;
};

inline CutChain convex_cuts(const LexWord& g, std::optional<std::uint64_t> inner_window = {}) {
  return CutChain(g, inner_window);
}

// ---------------------------------------------------------------------------
// Prime-parametric cuts.
//
// Questions quantified over all primes are answered by splitting the primes
// into finitely many explicit primes plus one generic class. Every generic
// prime p = p_k (k >= threshold) behaves the same way up to the position of
// its own summand inside each omega tower, so one symbolic evaluation with
// tower positions written as k + offset settles the whole class.
// ---------------------------------------------------------------------------

struct PrimeArg {
  std::uint64_t prime = 0;  // unused for the generic member
  bool generic = false;

  static PrimeArg of(std::uint64_t p) { return {p, false}; }
  static PrimeArg generic_member() { return {0, true}; }
  bool operator==(const PrimeArg&) const = default;
};

/// Inner position (indexed ? k : 0) + offset for the generic prime p_k.
struct InnerPos {
  std::int64_t offset = 0;
  bool indexed = false;
  bool operator==(const InnerPos&) const = default;
};

struct SymCut {
  std::size_t seg = 0;
  std::optional<InnerPos> inner;

  static SymCut from(const ConvexCut& c);
  bool symbolic() const { return inner && inner->indexed; }
  std::optional<ConvexCut> concrete() const;
  /// Instantiates the cut for the prime with index k.
  ConvexCut realize(std::uint64_t k) const;
  bool operator==(const SymCut&) const = default;
};

std::string to_string(const LexWord& g, const SymCut& c);

/// Explicit primes plus the cofinite generic class; see above.
struct PrimeClasses {
  std::vector<std::uint64_t> explicit_primes;
  std::uint64_t threshold = 0;  // generic primes have index >= threshold

  PrimeSet generic_set() const { return PrimeSet::all_except(explicit_primes); }
  /// The representatives: every explicit prime, then the generic member.
  std::vector<PrimeArg> representatives() const;
  PrimeSet members(const PrimeArg& p) const {
    return p.generic ? generic_set() : PrimeSet::of({p.prime});
  }
};

/// `extra` primes are kept explicit; `inner_bound` is the deepest concrete inner
/// position the caller will compare symbolic cuts against.
PrimeClasses prime_classes(const LexWord& g, std::span<const std::uint64_t> extra = {},
                           std::uint64_t inner_bound = 0);

/// Three-way depth comparison valid for every prime of the generic class.
/// Throws std::logic_error if the threshold does not decide it.
int depth_compare(const SymCut& a, const SymCut& b, std::uint64_t threshold);

/// An archimedean piece of the word with nonzero quotient exponent at p.
struct Piece {
  QuotientExponent exponent;
  SymCut above;  // cut just above the piece (includes it)
  SymCut below;  // cut just below the piece (excludes it)
};

/// Nonzero-exponent pieces ordered from the bottom of the word upwards.
std::vector<Piece> nonzero_pieces(const LexWord& g, const PrimeArg& p);
QuotientExponent group_exponent(const LexWord& g, const PrimeArg& p);
SymCut g_pn(const LexWord& g, const PrimeArg& p, std::uint64_t n);
QuotientExponent quotient_exponent(const LexWord& g, const SymCut& low, const SymCut& high,
                                   const PrimeArg& p, std::uint64_t threshold);
bool is_p_regular(const LexWord& g, const SymCut& low, const SymCut& high, const PrimeArg& p,
                  std::uint64_t threshold);

// ---------------------------------------------------------------------------
// Concrete operations.
// ---------------------------------------------------------------------------

PrimeSet suffix_divisible_primes(const LexWord& g, const ConvexCut& c);
/// G_p
ConvexCut max_p_divisible(const LexWord& g, std::uint64_t p);
/// G_0
ConvexCut max_divisible(const LexWord& g);
/// Exponent of the segment strictly between the cuts; low must not be shallower than high.
QuotientExponent quotient_exponent(const LexWord& g, const ConvexCut& low, const ConvexCut& high,
                                   std::uint64_t p);
/// n_p, the exponent of |G/pG|.
QuotientExponent group_exponent(const LexWord& g, std::uint64_t p);
/// G_(p,n)
ConvexCut g_pn(const LexWord& g, std::uint64_t p, std::uint64_t n);
bool is_dp_minimal(const LexWord& g);
/// Primes p with G_p = G_0.
PrimeSet thm_condition_prime(const LexWord& g);
/// Requires low strictly deeper than high.
bool is_p_regular(const LexWord& g, const ConvexCut& low, const ConvexCut& high, std::uint64_t p);

enum class WitnessRule {
  DivisibleBelow,                 // (Bottom, G_p) with target strictly inside
  DivisibleBelowBottomConvention, // same, target = Bottom = low
  RegularStep,                    // (G_(p,m), G_(p,m+1)) straddling the target
  ChainSearch,                    // found by scanning the cut chain
};

std::string to_string(WitnessRule r);

struct CertificateEntry {
  PrimeSet primes;
  SymCut low;
  SymCut high;
  WitnessRule rule;
};

/// Per-prime p-regular straddling pairs refuting definability of `target`.
struct Certificate {
  ConvexCut target;
  std::vector<CertificateEntry> entries;
};

/// Returns nullopt when some prime has no p-regular straddling pair.
std::optional<Certificate> non_definability_certificate(const LexWord& g, const ConvexCut& target,
                                                        std::span<const std::uint64_t> explicit_primes = {});

}  // namespace arclab
