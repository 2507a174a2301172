#include "arclab/hahn.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "arclab/errors.hpp"
#include "arclab/group_dsl.hpp"
#include "arclab/overloaded.hpp"
#include "arclab/text_cursor.hpp"

namespace arclab {

namespace {

using Terms = std::vector<SeriesTerm>;

// Guards against runaway expansions of many-term units.
constexpr std::size_t kMaxTerms = 200000;

void require_group(const Group& g) {
  if (!g) throw std::invalid_argument("series without a value group");
  if (!g->effective()) throw NonEffectiveGroup("Hahn field over schematic group " + to_string(*g));
}

void require_same(const HahnSeries& a, const HahnSeries& b) {
  if (a.group() != b.group() && !(*a.group() == *b.group())) {
    throw std::invalid_argument("series over different groups");
  }
}

bool less(const LexWord& g, const GroupElement& a, const GroupElement& b) { return elem_cmp(g, a, b) < 0; }

const GroupElement& min_elem(const LexWord& g, const GroupElement& a, const GroupElement& b) {
  return less(g, b, a) ? b : a;
}

std::optional<GroupElement> min_bound(const LexWord& g, const std::optional<GroupElement>& a,
                                      const std::optional<GroupElement>& b) {
  if (!a) return b;
  if (!b) return a;
  return min_elem(g, *a, *b);
}

Terms normalize(const LexWord& g, Terms terms, const std::optional<GroupElement>& bound) {
  for (const auto& t : terms) {
    if (t.exponent.coords.size() != g.total_arity()) throw std::invalid_argument("term exponent shape mismatch");
  }
  auto by_exponent = [&](const SeriesTerm& a, const SeriesTerm& b) { return less(g, a.exponent, b.exponent); };
  if (!std::is_sorted(terms.begin(), terms.end(), by_exponent)) std::sort(terms.begin(), terms.end(), by_exponent);
  Terms out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().exponent == t.exponent) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const SeriesTerm& t) { return t.coeff == 0; });
  if (bound) {
    auto cut = std::find_if(out.begin(), out.end(), [&](const SeriesTerm& t) { return !less(g, t.exponent, *bound); });
    out.erase(cut, out.end());
  }
  return out;
}

// Products below `bound` (all of them when unbounded).
Terms mul_terms(const LexWord& g, const Terms& a, const Terms& b, const std::optional<GroupElement>& bound) {
  Terms out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      auto e = elem_add(g, x.exponent, y.exponent);
      // b is sorted, so later partners are no smaller.
      if (bound && !less(g, e, *bound)) break;
      out.push_back({std::move(e), x.coeff * y.coeff});
      if (out.size() > kMaxTerms) throw std::runtime_error("series expansion exceeds term limit");
    }
  }
  return normalize(g, std::move(out), {});
}

// Both inputs are normalized, so a merge suffices.
Terms add_terms(const LexWord& g, Terms a, const Terms& b) {
  Terms out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    auto c = elem_cmp(g, i->exponent, j->exponent);
    if (c < 0) {
      out.push_back(std::move(*i++));
    } else if (c > 0) {
      out.push_back(*j++);
    } else {
      Rational sum = i->coeff + j->coeff;
      if (sum != 0) out.push_back({std::move(i->exponent), std::move(sum)});
      ++i;
      ++j;
    }
  }
  for (; i != a.end(); ++i) out.push_back(std::move(*i));
  for (; j != b.end(); ++j) out.push_back(*j);
  return out;
}

Terms scale_terms(Terms a, const Rational& c) {
  for (auto& t : a) t.coeff *= c;
  return a;
}

Terms shift_terms(const LexWord& g, Terms a, const GroupElement& by) {
  for (auto& t : a) t.exponent = elem_add(g, t.exponent, by);
  return a;
}

Terms pow_terms(const LexWord& g, const Terms& a, unsigned n, const std::optional<GroupElement>& bound) {
  Terms acc{{zero_element(g), Rational(1)}};
  if (bound && !less(g, acc.front().exponent, *bound)) acc.clear();
  for (unsigned i = 0; i < n; ++i) acc = mul_terms(g, acc, a, bound);
  return acc;
}

// a = c * t^v * (1 + u); u is returned with exponents relative to v.
struct UnitForm {
  Rational c;
  GroupElement v;
  Terms u;
  std::optional<GroupElement> u_trunc;
};

UnitForm unit_form(const HahnSeries& a) {
  const auto& g = a.word();
  UnitForm f{a.leading().coeff, a.leading().exponent, {}, {}};
  auto neg_v = elem_neg(g, f.v);
  for (std::size_t i = 1; i < a.terms().size(); ++i) {
    const auto& t = a.terms()[i];
    f.u.push_back({elem_add(g, t.exponent, neg_v), t.coeff / f.c});
  }
  if (a.trunc()) f.u_trunc = elem_add(g, *a.trunc(), neg_v);
  return f;
}

// Positive powers of an element with this leading component eventually pass `bound`.
void require_reachable(const LexWord& g, const Terms& u, const GroupElement& bound) {
  if (u.empty() || elem_sign(g, bound) <= 0) return;
  if (leading_component(g, u.front().exponent) > leading_component(g, bound)) {
    throw std::domain_error("cutoff " + to_string(bound) + " is not reachable from a unit part of value " +
                            to_string(u.front().exponent));
  }
}

// sum_j (-u)^j below bound, for u of positive value.
Terms geometric(const LexWord& g, const Terms& u, const GroupElement& bound) {
  if (elem_sign(g, bound) <= 0) return {};
  require_reachable(g, u, bound);
  Terms neg_u = scale_terms(u, Rational(-1));
  Terms power{{zero_element(g), Rational(1)}};
  Terms acc = power;
  while (true) {
    power = mul_terms(g, power, neg_u, bound);
    if (power.empty()) break;
    acc = add_terms(g, std::move(acc), power);
    if (acc.size() > kMaxTerms) throw std::runtime_error("series expansion exceeds term limit");
  }
  return acc;
}

std::optional<Rational> exact_root(const Rational& c, std::uint64_t p) {
  if (c < 0 && p % 2 == 0) return std::nullopt;
  Integer num = abs(c.get_num()), den = c.get_den(), rn, rd;
  if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), p)) return std::nullopt;
  if (!mpz_root(rd.get_mpz_t(), den.get_mpz_t(), p)) return std::nullopt;
  Rational r(rn, rd);
  r.canonicalize();
  return c < 0 ? Rational(-r) : r;
}

Rational rational_pow(const Rational& x, std::uint64_t p) {
  Rational r = 1;
  for (std::uint64_t i = 0; i < p; ++i) r *= x;
  return r;
}

// z with z^p = 1 + u below bound; exact when z^p = 1 + u holds on the nose.
HahnSeries unit_root(const Group& grp, const Terms& u, bool u_exact, std::uint64_t p, const GroupElement& bound) {
  const auto& g = *grp;
  Terms one{{zero_element(g), Rational(1)}};
  if (u.empty() && u_exact) return HahnSeries::constant(grp, 1);
  if (elem_sign(g, bound) <= 0) return HahnSeries::unknown_above(grp, bound);
  require_reachable(g, u, bound);
  const Terms target = add_terms(g, one, u);
  const Rational inv_p(1, static_cast<unsigned long>(p));
  Terms z = one;
  bool converged = false;
  for (int iter = 0; iter < 128; ++iter) {
    Terms r = add_terms(g, pow_terms(g, z, static_cast<unsigned>(p), bound), scale_terms(target, Rational(-1)));
    r = normalize(g, std::move(r), bound);
    if (r.empty()) {
      converged = true;
      break;
    }
    // z <- z - r / (p z^(p-1))
    Terms w = geometric(g, add_terms(g, pow_terms(g, z, static_cast<unsigned>(p - 1), bound),
                                     scale_terms(one, Rational(-1))),
                        bound);
    Terms corr = scale_terms(mul_terms(g, r, w, bound), inv_p);
    z = add_terms(g, std::move(z), scale_terms(corr, Rational(-1)));
  }
  if (!converged) throw std::runtime_error("p-th root iteration did not converge");
  if (u_exact && z.size() <= 64) {
    if (pow_terms(g, z, static_cast<unsigned>(p), std::nullopt) == target) {
      return HahnSeries::from_terms(grp, std::move(z));
    }
  }
  return HahnSeries::from_terms(grp, std::move(z), bound);
}

}  // namespace

HahnSeries HahnSeries::zero(Group g) {
  require_group(g);
  HahnSeries s;
  s.group_ = std::move(g);
  return s;
}

HahnSeries HahnSeries::constant(Group g, Rational c) {
  auto e = zero_element(*g);
  return monomial(std::move(g), std::move(c), std::move(e));
}

HahnSeries HahnSeries::monomial(Group g, Rational c, GroupElement exponent) {
  return from_terms(std::move(g), {{std::move(exponent), std::move(c)}});
}

HahnSeries HahnSeries::unknown_above(Group g, GroupElement bound) { return from_terms(std::move(g), {}, std::move(bound)); }

HahnSeries HahnSeries::from_terms(Group g, std::vector<SeriesTerm> terms, std::optional<GroupElement> trunc) {
  require_group(g);
  if (trunc) make_element(*g, trunc->coords);
  for (const auto& t : terms) make_element(*g, t.exponent.coords);
  HahnSeries s;
  s.terms_ = normalize(*g, std::move(terms), trunc);
  s.trunc_ = std::move(trunc);
  s.group_ = std::move(g);
  return s;
}

HahnSeries series_add(const HahnSeries& a, const HahnSeries& b) {
  require_same(a, b);
  const auto& g = a.word();
  return HahnSeries::from_terms(a.group(), add_terms(g, a.terms(), b.terms()), min_bound(g, a.trunc(), b.trunc()));
}

HahnSeries series_neg(const HahnSeries& a) { return series_scale(a, Rational(-1)); }

HahnSeries series_sub(const HahnSeries& a, const HahnSeries& b) { return series_add(a, series_neg(b)); }

HahnSeries series_scale(const HahnSeries& a, const Rational& c) {
  if (c == 0) return HahnSeries::zero(a.group());
  return HahnSeries::from_terms(a.group(), scale_terms(a.terms(), c), a.trunc());
}

HahnSeries series_mul(const HahnSeries& a, const HahnSeries& b) {
  require_same(a, b);
  const auto& g = a.word();
  if (a.is_zero() || b.is_zero()) return HahnSeries::zero(a.group());
  std::optional<GroupElement> trunc;
  if (a.trunc()) {
    if (b.no_terms()) throw std::domain_error("product of truncated series with undetermined valuation");
    trunc = min_bound(g, trunc, elem_add(g, *a.trunc(), v_of(b)));
  }
  if (b.trunc()) {
    if (a.no_terms()) throw std::domain_error("product of truncated series with undetermined valuation");
    trunc = min_bound(g, trunc, elem_add(g, *b.trunc(), v_of(a)));
  }
  return HahnSeries::from_terms(a.group(), mul_terms(g, a.terms(), b.terms(), trunc), trunc);
}

HahnSeries series_pow(const HahnSeries& a, unsigned n) {
  auto acc = HahnSeries::constant(a.group(), 1);
  for (unsigned i = 0; i < n; ++i) acc = series_mul(acc, a);
  return acc;
}

HahnSeries series_truncate(const HahnSeries& a, const GroupElement& bound) {
  return HahnSeries::from_terms(a.group(), a.terms(), min_bound(a.word(), a.trunc(), bound));
}

HahnSeries series_invert(const HahnSeries& a, const GroupElement& cutoff) {
  if (a.no_terms()) throw std::domain_error("inverse of a series with no known nonzero term");
  const auto& g = a.word();
  auto f = unit_form(a);
  auto neg_v = elem_neg(g, f.v);
  if (f.u.empty() && !f.u_trunc) return HahnSeries::monomial(a.group(), 1 / f.c, neg_v);
  GroupElement bound = elem_add(g, cutoff, f.v);
  if (f.u_trunc) bound = min_elem(g, bound, *f.u_trunc);
  Terms w = geometric(g, f.u, bound);
  return HahnSeries::from_terms(a.group(), shift_terms(g, scale_terms(std::move(w), 1 / f.c), neg_v),
                                elem_add(g, bound, neg_v));
}

GroupElement v_of(const HahnSeries& a) {
  if (a.no_terms()) throw std::domain_error("valuation of zero");
  return a.leading().exponent;
}

bool root_exists(const HahnSeries& a, std::uint64_t p, bool allow_negation) {
  if (p == 0) throw std::invalid_argument("root of order 0");
  if (a.is_zero()) return true;
  if (a.no_terms()) throw std::domain_error("sign of a series with no known term");
  if (!elem_p_divisible(a.word(), v_of(a), p)) return false;
  return p % 2 == 1 || allow_negation || a.leading().coeff > 0;
}

HahnSeries pth_root(const HahnSeries& a, std::uint64_t p, const GroupElement& cutoff) {
  if (a.is_zero()) return a;
  if (!root_exists(a, p, false)) throw std::domain_error("no " + std::to_string(p) + "-th root of " + to_string(a));
  const auto& g = a.word();
  auto f = unit_form(a);
  auto c_root = exact_root(f.c, p);
  if (!c_root) {
    throw std::domain_error("leading coefficient " + to_string(f.c) + " has no rational " + std::to_string(p) +
                            "-th root");
  }
  auto enc = pth_root_enclosure(a, p, cutoff, 8);
  auto shift = enc.shift;
  const auto& z = enc.unit_root;
  std::optional<GroupElement> trunc;
  if (z.trunc()) trunc = elem_add(g, *z.trunc(), shift);
  return HahnSeries::from_terms(a.group(), shift_terms(g, scale_terms(z.terms(), *c_root), shift), trunc);
}

RootEnclosure pth_root_enclosure(const HahnSeries& a, std::uint64_t p, const GroupElement& cutoff, unsigned bits) {
  if (a.no_terms() || !root_exists(a, p, false)) {
    throw std::domain_error("no " + std::to_string(p) + "-th root of " + to_string(a));
  }
  const auto& g = a.word();
  auto f = unit_form(a);
  GroupElement bound = elem_sub(g, cutoff, f.v);
  if (f.u_trunc) bound = min_elem(g, bound, *f.u_trunc);
  auto z = unit_root(a.group(), f.u, !f.u_trunc, p, bound);

  Rational mag = abs(f.c);
  RationalInterval s;
  if (auto r = exact_root(mag, p)) {
    s = {*r, *r};
  } else {
    Rational lo = 0, hi = mag > 1 ? mag : Rational(1);
    for (unsigned i = 0; i < bits; ++i) {
      Rational mid = (lo + hi) / 2;
      (rational_pow(mid, p) <= mag ? lo : hi) = mid;
    }
    s = {lo, hi};
  }
  if (f.c < 0) s = {-s.hi, -s.lo};
  return {s, *elem_divide(g, f.v, p), std::move(z)};
}

LexWord suffix_word(const LexWord& g, std::size_t seg) {
  if (seg > g.size()) throw std::out_of_range("segment past the bottom cut");
  return LexWord(std::vector<ComponentKind>(g.components().begin() + static_cast<std::ptrdiff_t>(seg),
                                            g.components().end()));
}

Decomposition decompose(const HahnSeries& a, const ConvexCut& c) {
  const auto& g = a.word();
  if (c.inner) throw NonEffectiveGroup("inner cuts only exist over schematic groups");
  if (c.seg > g.size()) throw std::out_of_range("cut below the bottom");
  auto lead = v_of(a);
  const std::size_t split = g.offset(c.seg);
  auto prefix = [&](const GroupElement& e) {
    return std::vector<Rational>(e.coords.begin(), e.coords.begin() + static_cast<std::ptrdiff_t>(split));
  };
  auto suffix = [&](const GroupElement& e) {
    return GroupElement{std::vector<Rational>(e.coords.begin() + static_cast<std::ptrdiff_t>(split), e.coords.end())};
  };
  Decomposition d{prefix(lead), {}};
  auto sub = make_group(suffix_word(g, c.seg));
  Terms res;
  for (const auto& t : a.terms()) {
    if (prefix(t.exponent) != d.coarse_value) break;
    res.push_back({suffix(t.exponent), t.coeff});
  }
  std::optional<GroupElement> trunc;
  if (a.trunc() && prefix(*a.trunc()) == d.coarse_value) trunc = suffix(*a.trunc());
  d.residue = HahnSeries::from_terms(sub, std::move(res), std::move(trunc));
  return d;
}

HahnSeries sample_series(const Group& grp, std::uint64_t seed, const SampleParams& params) {
  require_group(grp);
  const auto& g = *grp;
  std::mt19937_64 rng(seed);
  auto draw = [&](std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  const std::int64_t E = params.exponent_magnitude, C = std::max<std::int64_t>(params.coefficient_magnitude, 1);
  auto exponent = [&] {
    std::vector<Rational> coords;
    for (const auto& comp : g.components()) {
      std::visit(overloaded{
                     [&](const Rat&) {
                       long den = draw(1, 4);
                       coords.emplace_back(draw(-E * den, E * den), den);
                     },
                     [&](const LocZ& l) {
                       long den = draw(1, 4);
                       if (den % static_cast<long>(l.q) == 0) den = 1;
                       coords.emplace_back(draw(-E * den, E * den), den);
                     },
                     [&](const FreeReal& fr) {
                       for (std::size_t i = 0; i < fr.gens.size(); ++i) coords.emplace_back(draw(-E, E));
                     },
                     [&](const auto&) { coords.emplace_back(draw(-E, E)); },
                 },
                 comp);
    }
    for (auto& x : coords) x.canonicalize();
    return GroupElement{std::move(coords)};
  };
  auto coeff = [&] {
    long num = draw(1, C) * (draw(0, 1) ? 1 : -1);
    Rational r(num, draw(1, C));
    r.canonicalize();
    return r;
  };
  const auto support = static_cast<std::int64_t>(std::max<std::size_t>(params.support, 1));
  Terms terms;
  for (std::int64_t i = 0, n = draw(1, support); i < n; ++i) terms.push_back({exponent(), coeff()});
  auto s = HahnSeries::from_terms(grp, terms);
  if (s.no_terms()) s = HahnSeries::from_terms(grp, {terms.front()});
  return s;
}

std::string to_string(const HahnSeries& a) {
  std::string out;
  bool first = true;
  auto sep = [&](bool negative) {
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
  };
  for (const auto& t : a.terms()) {
    bool neg = t.coeff < 0;
    Rational mag = abs(t.coeff);
    sep(neg);
    if (is_zero(t.exponent)) {
      out += to_string(mag);
    } else {
      if (mag != 1) out += to_string(mag) + "*";
      out += "t^" + to_string(t.exponent);
    }
  }
  if (a.trunc()) {
    sep(false);
    out += "O(t^" + to_string(*a.trunc()) + ")";
  }
  return first ? "0" : out;
}

HahnSeries parse_series(const Group& grp, std::string_view text) {
  require_group(grp);
  const auto& g = *grp;
  TextCursor in(text);
  auto exponent = [&] {
    in.skip_ws();
    std::size_t start = in.position();
    auto close = text.find(')', start);
    if (in.peek() != '(' || close == std::string_view::npos) in.fail("expected exponent tuple");
    try {
      auto e = parse_element(g, text.substr(start, close - start + 1));
      in.reset(close + 1);
      return e;
    } catch (const ParseError& e) {
      throw ParseError(e.what(), start + e.position());
    }
  };
  Terms terms;
  std::optional<GroupElement> trunc;
  bool first = true;
  do {
    bool neg = false;
    if (!first) {
      if (in.accept("+")) {
      } else if (in.accept("-")) {
        neg = true;
      } else {
        in.fail("expected + or -");
      }
    } else {
      neg = in.accept("-");
    }
    first = false;
    if (in.accept("O(")) {
      if (neg) in.fail("negated O-term");
      in.expect("t^");
      if (trunc) in.fail("duplicate O-term");
      trunc = exponent();
      in.expect(")");
      continue;
    }
    Rational c = 1;
    bool has_coeff = in.peek_digit();
    if (has_coeff) c = in.rational();
    GroupElement e = zero_element(g);
    if (!has_coeff || in.accept("*")) {
      in.expect("t^");
      e = exponent();
    }
    terms.push_back({std::move(e), neg ? Rational(-c) : c});
  } while (!in.at_end());
  if (trunc) {
    for (const auto& t : terms) {
      if (!less(g, t.exponent, *trunc)) throw ParseError("term at or above the O-term", 0);
    }
  }
  return HahnSeries::from_terms(grp, std::move(terms), std::move(trunc));
}

}  // namespace arclab
