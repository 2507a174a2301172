#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "arclab/primes.hpp"

namespace arclab {

using Integer = mpz_class;
using Rational = mpq_class;

struct RationalInterval {
  Rational lo;
  Rational hi;
};

/// Certified enclosure lo <= pi <= hi with hi - lo <= 2^-bits (roughly).
RationalInterval pi_enclosure(unsigned bits);

/// A real constant generating a FreeReal component: a nonzero rational or pi.
struct RealGenerator {
  enum class Kind { Rational, Pi };
  Kind kind = Kind::Rational;
  Rational value{1};  // meaningful for Kind::Rational only

  static RealGenerator pi() { return {Kind::Pi, Rational{0}}; }
  static RealGenerator rational(Rational r) { return {Kind::Rational, std::move(r)}; }

  bool operator==(const RealGenerator& o) const {
    return kind == o.kind && (kind == Kind::Pi || value == o.value);
  }
};

struct Zed {
  bool operator==(const Zed&) const = default;
};
struct Rat {
  bool operator==(const Rat&) const = default;
};
/// Rationals whose denominator is coprime to q.
struct LocZ {
  std::uint64_t q;
  bool operator==(const LocZ&) const = default;
};
/// The subgroup of R generated over Z by Q-linearly independent constants.
struct FreeReal {
  std::vector<RealGenerator> gens;
  bool operator==(const FreeReal&) const = default;
};
/// Lexicographic sum of LocZ(p_k) over k >= max(start, 1); schematic.
struct OmegaTower {
  std::uint64_t start;
  bool operator==(const OmegaTower&) const = default;
  std::uint64_t first_summand() const { return start < 1 ? 1 : start; }
};
/// base[gen] as a subgroup of R (archimedean, infinite rank); schematic.
struct PolyModule {
  std::uint64_t q;
  RealGenerator gen;
  bool operator==(const PolyModule&) const = default;
};

using ComponentKind = std::variant<Zed, Rat, LocZ, FreeReal, OmegaTower, PolyModule>;

/// |C/pC| = p^value; nullopt value means infinite.
struct QuotientExponent {
  std::optional<std::uint64_t> value = 0;

  static QuotientExponent infinite() { return {std::nullopt}; }
  bool is_infinite() const { return !value.has_value(); }
  bool is_zero() const { return value && *value == 0; }
  bool at_most(std::uint64_t n) const { return value && *value <= n; }

  QuotientExponent operator+(const QuotientExponent& o) const {
    if (!value || !o.value) return infinite();
    return {*value + *o.value};
  }
  bool operator==(const QuotientExponent&) const = default;
  std::string to_string() const { return value ? std::to_string(*value) : "inf"; }
};

PrimeSet divisible_primes(const ComponentKind& c);
QuotientExponent quotient_exponent(const ComponentKind& c, std::uint64_t p);
bool is_effective(const ComponentKind& c);
/// Number of coordinates an element carries in this component (0 if schematic).
std::size_t arity(const ComponentKind& c);
bool is_schematic_chain(const ComponentKind& c);  // has inner convex subgroups
/// Primes the component names explicitly (Zloc/poly_module bases).
std::vector<std::uint64_t> mentioned_primes(const ComponentKind& c);
std::string to_string(const ComponentKind& c);

/// An ordered abelian group as a lexicographic word; index 0 most significant.
class LexWord {
 public:
  LexWord() = default;
  explicit LexWord(std::vector<ComponentKind> components, std::optional<std::string> name = {});

  const std::vector<ComponentKind>& components() const { return components_; }
  const ComponentKind& operator[](std::size_t i) const { return components_[i]; }
  std::size_t size() const { return components_.size(); }
  const std::optional<std::string>& name() const { return name_; }

  bool effective() const;
  /// Flattened coordinate offset of component i (i == size() gives the total).
  std::size_t offset(std::size_t i) const { return offsets_[i]; }
  std::size_t total_arity() const { return offsets_.back(); }

  bool operator==(const LexWord& o) const { return components_ == o.components_; }

 private:
  std::vector<ComponentKind> components_;
  std::optional<std::string> name_;
  std::vector<std::size_t> offsets_{0};
};

std::string to_string(const LexWord& g);

/// A group element as flattened exact coordinates (FreeReal components take
/// one integer coordinate per generator).
struct GroupElement {
  std::vector<Rational> coords;
  bool operator==(const GroupElement& o) const { return coords == o.coords; }
};

GroupElement make_element(const LexWord& g, std::vector<Rational> coords);
std::optional<GroupElement> try_make_element(const LexWord& g, std::vector<Rational> coords);
GroupElement zero_element(const LexWord& g);
/// Unit vector in flattened coordinate `coord`.
GroupElement unit_element(const LexWord& g, std::size_t coord, Rational scale = 1);

bool is_zero(const GroupElement& a);
GroupElement elem_add(const LexWord& g, const GroupElement& a, const GroupElement& b);
GroupElement elem_neg(const LexWord& g, const GroupElement& a);
GroupElement elem_sub(const LexWord& g, const GroupElement& a, const GroupElement& b);
GroupElement elem_scale(const LexWord& g, const GroupElement& a, const Integer& k);
std::strong_ordering elem_cmp(const LexWord& g, const GroupElement& a, const GroupElement& b);
int elem_sign(const LexWord& g, const GroupElement& a);
/// Sign of the coordinates of components [0, seg) read lexicographically.
int prefix_sign(const LexWord& g, const GroupElement& a, std::size_t seg);
bool elem_p_divisible(const LexWord& g, const GroupElement& a, std::uint64_t p);
/// b with p*b = a when it exists.
std::optional<GroupElement> elem_divide(const LexWord& g, const GroupElement& a, std::uint64_t p);
/// Index of the most significant component with a nonzero coordinate, or size().
std::size_t leading_component(const LexWord& g, const GroupElement& a);
/// Residue class of a modulo p, as a vector of residues per flattened coordinate
/// (0 for coordinates of p-divisible components).
std::vector<std::uint64_t> coset_mod_p(const LexWord& g, const GroupElement& a, std::uint64_t p,
                                       std::size_t from_component = 0);

std::string to_string(const GroupElement& a);
std::string to_string(const Rational& r);

/// Sign of sum coords[i] * gens[i], decided by interval refinement.
int free_real_sign(const FreeReal& f, std::span<const Rational> coords);

}  // namespace arclab
