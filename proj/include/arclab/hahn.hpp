#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arclab/convex.hpp"
#include "arclab/oag.hpp"

namespace arclab {

/// Shared immutable value group of a Hahn field R((G)).
using Group = std::shared_ptr<const LexWord>;

inline Group make_group(LexWord g) { return std::make_shared<const LexWord>(std::move(g)); }

struct SeriesTerm {
  GroupElement exponent;
  Rational coeff;
  bool operator==(const SeriesTerm& o) const { return exponent == o.exponent && coeff == o.coeff; }
};

/// A finite-support element of R((G)) with exact rational coefficients.
///
/// Terms are strictly increasing in exponent with nonzero coefficients. A
/// truncation bound means every term at or above it is unknown; stored terms
/// are strictly below it. Exact zero has no terms and no bound.
class HahnSeries {
 public:
  HahnSeries() = default;

  static HahnSeries zero(Group g);
  static HahnSeries constant(Group g, Rational c);
  static HahnSeries monomial(Group g, Rational c, GroupElement exponent);
  /// O(t^bound)
  static HahnSeries unknown_above(Group g, GroupElement bound);
  /// Sorts, merges equal exponents, drops zero coefficients and terms at or above trunc.
  static HahnSeries from_terms(Group g, std::vector<SeriesTerm> terms, std::optional<GroupElement> trunc = {});

  const Group& group() const { return group_; }
  const LexWord& word() const { return *group_; }
  const std::vector<SeriesTerm>& terms() const { return terms_; }
  const std::optional<GroupElement>& trunc() const { return trunc_; }

  bool is_exact() const { return !trunc_; }
  bool is_zero() const { return terms_.empty() && !trunc_; }
  /// No stored term: either exact zero or zero modulo the truncation bound.
  bool no_terms() const { return terms_.empty(); }
  const SeriesTerm& leading() const { return terms_.front(); }

  bool operator==(const HahnSeries& o) const {
    return *group_ == *o.group_ && terms_ == o.terms_ && trunc_ == o.trunc_;
  }

 private:
  Group group_;
  std::vector<SeriesTerm> terms_;
  std::optional<GroupElement> trunc_;
};

HahnSeries series_add(const HahnSeries& a, const HahnSeries& b);
HahnSeries series_neg(const HahnSeries& a);
HahnSeries series_sub(const HahnSeries& a, const HahnSeries& b);
HahnSeries series_scale(const HahnSeries& a, const Rational& c);
HahnSeries series_mul(const HahnSeries& a, const HahnSeries& b);
HahnSeries series_pow(const HahnSeries& a, unsigned n);
/// Drops everything at or above `bound` and records it as the truncation.
HahnSeries series_truncate(const HahnSeries& a, const GroupElement& bound);
/// b with a*b = 1 modulo O(t^(cutoff + v(a))); monomials invert exactly.
HahnSeries series_invert(const HahnSeries& a, const GroupElement& cutoff);

/// Minimal exponent. Throws for zero (or zero modulo truncation).
GroupElement v_of(const HahnSeries& a);

/// Existence of y in the real closed ambient field with y^p = a (or y^p = -a
/// when allow_negation). Decided from v(a) and the sign of the leading coefficient.
bool root_exists(const HahnSeries& a, std::uint64_t p, bool allow_negation);

/// Hensel-Newton p-th root with y^p = a + O(t^cutoff). Returns an exact root
/// when the iteration lands on one. Requires a rational p-th root of the
/// leading coefficient.
HahnSeries pth_root(const HahnSeries& a, std::uint64_t p, const GroupElement& cutoff);

/// y = s * t^shift * unit_root, with s the real p-th root of the leading
/// coefficient enclosed in [scale.lo, scale.hi].
struct RootEnclosure {
  RationalInterval scale;
  GroupElement shift;
  HahnSeries unit_root;
};
RootEnclosure pth_root_enclosure(const HahnSeries& a, std::uint64_t p, const GroupElement& cutoff,
                                 unsigned bits = 64);

/// v_K(a) split at a convex subgroup: coordinates above the cut, and the
/// leading coefficient class as a series over the subgroup.
struct Decomposition {
  std::vector<Rational> coarse_value;
  HahnSeries residue;
};
Decomposition decompose(const HahnSeries& a, const ConvexCut& c);

/// The subgroup selected by a (non-inner) cut as its own LexWord.
LexWord suffix_word(const LexWord& g, std::size_t seg);

struct SampleParams {
  std::size_t support = 3;
  std::int64_t exponent_magnitude = 3;
  std::int64_t coefficient_magnitude = 5;
};

/// Deterministic nonzero exact series for the seed.
HahnSeries sample_series(const Group& g, std::uint64_t seed, const SampleParams& params = {});

std::string to_string(const HahnSeries& a);
/// "1 + 2*t^(1,1/2) - t^(2,0) + O(t^(3,0))"
HahnSeries parse_series(const Group& g, std::string_view text);

}  // namespace arclab
