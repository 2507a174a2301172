#include "arclab/convex.hpp"

#include <algorithm>
#include <stdexcept>

namespace arclab {

ConvexCut make_cut(const LexWord& g, std::size_t seg, std::optional<std::uint64_t> inner) {
  if (seg > g.size()) throw std::invalid_argument("cut segment out of range");
  if (inner && *inner == 0) inner.reset();
  if (inner && (seg == g.size() || !is_schematic_chain(g[seg]))) {
    throw std::invalid_argument("inner cut outside an omega tower");
  }
  return {seg, inner};
}

bool is_top(const ConvexCut& c) { return c.seg == 0 && !c.inner; }
bool is_bottom(const LexWord& g, const ConvexCut& c) { return c.seg == g.size(); }

int depth_compare(const ConvexCut& a, const ConvexCut& b) {
  if (a.seg != b.seg) return a.seg < b.seg ? -1 : 1;
  auto ia = a.inner.value_or(0), ib = b.inner.value_or(0);
  return ia == ib ? 0 : (ia < ib ? -1 : 1);
}

std::string to_string(const LexWord& g, const ConvexCut& c) {
  if (is_top(c)) return "Top";
  if (is_bottom(g, c)) return "Bottom";
  std::string s = "seg=" + std::to_string(c.seg);
  if (c.inner) s += "/inner=" + std::to_string(*c.inner);
  return s;
}

CutChain::iterator CutChain::begin() const {
  iterator it;
  it.chain_ = this;
  it.current_ = ConvexCut::top();
  return it;
}

CutChain::iterator& CutChain::iterator::operator++() {
  const LexWord& g = *chain_->group_;
  auto s = current_.seg;
  if (s >= g.size()) {
    done_ = true;
    return *this;
  }
  std::uint64_t m = current_.inner.value_or(0);
  if (is_schematic_chain(g[s]) && (!chain_->window_ || m < *chain_->window_)) {
    current_ = ConvexCut{s, m + 1};
  } else {
    current_ = ConvexCut{s + 1, {}};
  }
  return *this;
}

std::vector<ConvexCut> CutChain::take(std::size_t limit) const {
  std::vector<ConvexCut> out;
  for (auto it = begin(); it != end() && out.size() < limit; ++it) out.push_back(*it);
  return out;
}

// ---------------------------------------------------------------------------

SymCut SymCut::from(const ConvexCut& c) {
  SymCut s{c.seg, {}};
  if (c.inner) s.inner = InnerPos{static_cast<std::int64_t>(*c.inner), false};
  return s;
}

std::optional<ConvexCut> SymCut::concrete() const {
  if (symbolic()) return std::nullopt;
  ConvexCut c{seg, {}};
  if (inner && inner->offset != 0) c.inner = static_cast<std::uint64_t>(inner->offset);
  return c;
}

ConvexCut SymCut::realize(std::uint64_t k) const {
  ConvexCut c{seg, {}};
  if (inner) {
    std::int64_t v = inner->offset + (inner->indexed ? static_cast<std::int64_t>(k) : 0);
    if (v < 0) throw std::logic_error("negative inner position");
    if (v > 0) c.inner = static_cast<std::uint64_t>(v);
  }
  return c;
}

std::string to_string(const LexWord& g, const SymCut& c) {
  if (auto cc = c.concrete()) return to_string(g, *cc);
  std::string s = "seg=" + std::to_string(c.seg) + "/inner=i(p)";
  if (c.inner->offset > 0) s += "+" + std::to_string(c.inner->offset);
  if (c.inner->offset < 0) s += std::to_string(c.inner->offset);
  return s;
}

std::vector<PrimeArg> PrimeClasses::representatives() const {
  std::vector<PrimeArg> reps;
  for (auto p : explicit_primes) reps.push_back(PrimeArg::of(p));
  reps.push_back(PrimeArg::generic_member());
  return reps;
}

PrimeClasses prime_classes(const LexWord& g, std::span<const std::uint64_t> extra,
                           std::uint64_t inner_bound) {
  PrimeClasses out;
  std::uint64_t max_first = 0;
  bool towers = false;
  for (const auto& c : g.components()) {
    for (auto q : mentioned_primes(c)) out.explicit_primes.push_back(q);
    if (auto* t = std::get_if<OmegaTower>(&c)) {
      towers = true;
      max_first = std::max(max_first, t->first_summand());
    }
  }
  if (towers) out.threshold = max_first + inner_bound + 2;
  for (auto p : extra) out.explicit_primes.push_back(p);
  const auto below = PrimeSet::first(out.threshold);
  for (auto p : below.members()) out.explicit_primes.push_back(p);
  out.explicit_primes = PrimeSet::of(out.explicit_primes).members();
  return out;
}

int depth_compare(const SymCut& a, const SymCut& b, std::uint64_t threshold) {
  if (a.seg != b.seg) return a.seg < b.seg ? -1 : 1;
  InnerPos ia = a.inner.value_or(InnerPos{}), ib = b.inner.value_or(InnerPos{});
  if (ia.indexed == ib.indexed) {
    return ia.offset == ib.offset ? 0 : (ia.offset < ib.offset ? -1 : 1);
  }
  const auto& sym = ia.indexed ? ia : ib;
  const auto& fixed = ia.indexed ? ib : ia;
  if (static_cast<std::int64_t>(threshold) + sym.offset <= fixed.offset) {
    throw std::logic_error("generic prime threshold does not separate cuts");
  }
  return ia.indexed ? 1 : -1;
}

namespace {

QuotientExponent exponent_at(const ComponentKind& c, const PrimeArg& p) {
  if (!p.generic) return quotient_exponent(c, p.prime);
  if (std::holds_alternative<Zed>(c)) return {1};
  if (auto* f = std::get_if<FreeReal>(&c)) return {f->gens.size()};
  return {0};
}

}  // namespace

std::vector<Piece> nonzero_pieces(const LexWord& g, const PrimeArg& p) {
  std::vector<Piece> pieces;
  for (std::size_t i = g.size(); i-- > 0;) {
    if (auto* t = std::get_if<OmegaTower>(&g[i])) {
      const auto f = static_cast<std::int64_t>(t->first_summand());
      if (p.generic) {
        pieces.push_back({{1}, SymCut{i, InnerPos{-f, true}}, SymCut{i, InnerPos{1 - f, true}}});
        continue;
      }
      const auto k = static_cast<std::int64_t>(prime_index(p.prime));
      if (k < f) continue;
      const std::int64_t m = k - f + 1;
      SymCut above{i, {}};
      if (m > 1) above.inner = InnerPos{m - 1, false};
      pieces.push_back({{1}, above, SymCut{i, InnerPos{m, false}}});
      continue;
    }
    auto e = exponent_at(g[i], p);
    if (!e.is_zero()) pieces.push_back({e, SymCut{i, {}}, SymCut{i + 1, {}}});
  }
  return pieces;
}

QuotientExponent group_exponent(const LexWord& g, const PrimeArg& p) {
  QuotientExponent total{0};
  for (const auto& piece : nonzero_pieces(g, p)) total = total + piece.exponent;
  return total;
}

SymCut g_pn(const LexWord& g, const PrimeArg& p, std::uint64_t n) {
  std::uint64_t acc = 0;
  for (const auto& piece : nonzero_pieces(g, p)) {
    if (piece.exponent.is_infinite() || acc + *piece.exponent.value > n) return piece.below;
    acc += *piece.exponent.value;
  }
  return SymCut{};
}

QuotientExponent quotient_exponent(const LexWord& g, const SymCut& low, const SymCut& high,
                                   const PrimeArg& p, std::uint64_t threshold) {
  if (depth_compare(low, high, threshold) < 0) {
    throw std::invalid_argument("quotient_exponent: low cut is shallower than high cut");
  }
  QuotientExponent total{0};
  for (const auto& piece : nonzero_pieces(g, p)) {
    if (depth_compare(piece.above, high, threshold) >= 0 && depth_compare(piece.below, low, threshold) <= 0) {
      total = total + piece.exponent;
    }
  }
  return total;
}

bool is_p_regular(const LexWord& g, const SymCut& low, const SymCut& high, const PrimeArg& p,
                  std::uint64_t threshold) {
  if (depth_compare(low, high, threshold) <= 0) {
    throw std::invalid_argument("is_p_regular: low cut must be strictly deeper than high cut");
  }
  // Every proper quotient by a nonzero convex subgroup of the segment is
  // p-divisible iff the only non-divisible piece (if any) sits directly on low.
  for (const auto& piece : nonzero_pieces(g, p)) {
    bool inside = depth_compare(piece.above, high, threshold) >= 0 &&
                  depth_compare(piece.below, low, threshold) <= 0;
    if (inside && depth_compare(piece.below, low, threshold) != 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

PrimeSet suffix_divisible_primes(const LexWord& g, const ConvexCut& c) {
  PrimeSet out = PrimeSet::all();
  for (std::size_t j = c.seg + 1; j < g.size(); ++j) out = out & divisible_primes(g[j]);
  if (c.seg < g.size()) {
    if (c.inner) {
      const auto& t = std::get<OmegaTower>(g[c.seg]);
      out = out & PrimeSet::first(t.first_summand() + *c.inner);
    } else {
      out = out & divisible_primes(g[c.seg]);
    }
  }
  return out;
}

ConvexCut max_p_divisible(const LexWord& g, std::uint64_t p) { return g_pn(g, p, 0); }

ConvexCut max_divisible(const LexWord& g) {
  for (std::size_t i = g.size(); i-- > 0;) {
    if (!divisible_primes(g[i]).is_all()) return ConvexCut{i + 1, {}};
  }
  return ConvexCut::top();
}

QuotientExponent quotient_exponent(const LexWord& g, const ConvexCut& low, const ConvexCut& high,
                                   std::uint64_t p) {
  return quotient_exponent(g, SymCut::from(low), SymCut::from(high), PrimeArg::of(p), 0);
}

QuotientExponent group_exponent(const LexWord& g, std::uint64_t p) {
  return group_exponent(g, PrimeArg::of(p));
}

ConvexCut g_pn(const LexWord& g, std::uint64_t p, std::uint64_t n) {
  return *g_pn(g, PrimeArg::of(p), n).concrete();
}

bool is_dp_minimal(const LexWord& g) {
  auto classes = prime_classes(g);
  for (const auto& rep : classes.representatives()) {
    if (group_exponent(g, rep).is_infinite()) return false;
  }
  return true;
}

PrimeSet thm_condition_prime(const LexWord& g) {
  auto classes = prime_classes(g);
  const auto g0 = SymCut::from(max_divisible(g));
  PrimeSet out;
  for (const auto& rep : classes.representatives()) {
    if (depth_compare(g_pn(g, rep, 0), g0, classes.threshold) == 0) out = out | classes.members(rep);
  }
  return out;
}

bool is_p_regular(const LexWord& g, const ConvexCut& low, const ConvexCut& high, std::uint64_t p) {
  return is_p_regular(g, SymCut::from(low), SymCut::from(high), PrimeArg::of(p), 0);
}

std::string to_string(WitnessRule r) {
  switch (r) {
    case WitnessRule::DivisibleBelow: return "divisible-below";
    case WitnessRule::DivisibleBelowBottomConvention: return "divisible-below(bottom-convention)";
    case WitnessRule::RegularStep: return "regular-step";
    case WitnessRule::ChainSearch: return "chain-search";
  }
  return "?";
}

namespace {

struct Witness {
  SymCut low;
  SymCut high;
  WitnessRule rule;
};

// Distinct values of G_(p,n), deepest first.
std::vector<SymCut> image_levels(const LexWord& g, const PrimeArg& p) {
  std::vector<SymCut> levels;
  for (const auto& piece : nonzero_pieces(g, p)) {
    levels.push_back(piece.below);
    if (piece.exponent.is_infinite()) return levels;
  }
  levels.push_back(SymCut{});
  return levels;
}

std::optional<Witness> chain_search(const LexWord& g, const SymCut& target, const PrimeArg& p,
                                    std::uint64_t threshold, const std::vector<SymCut>& levels,
                                    std::uint64_t window) {
  std::vector<SymCut> candidates = levels;
  for (const auto& c : CutChain(g, window)) candidates.push_back(SymCut::from(c));
  for (const auto& low : candidates) {
    if (depth_compare(low, target, threshold) <= 0) continue;
    for (const auto& high : candidates) {
      if (depth_compare(high, target, threshold) >= 0) continue;
      if (is_p_regular(g, low, high, p, threshold)) return Witness{low, high, WitnessRule::ChainSearch};
    }
  }
  return std::nullopt;
}

std::optional<Witness> find_witness(const LexWord& g, const SymCut& target, const PrimeArg& p,
                                    std::uint64_t threshold, std::uint64_t window) {
  const SymCut bottom{g.size(), {}};
  auto levels = image_levels(g, p);
  auto cmp = [&](const SymCut& a, const SymCut& b) { return depth_compare(a, b, threshold); };
  bool in_image = std::any_of(levels.begin(), levels.end(), [&](const SymCut& l) { return cmp(l, target) == 0; });
  if (!in_image) {
    std::optional<Witness> guided;
    if (cmp(target, levels.front()) > 0) {
      auto rule = cmp(target, bottom) == 0 ? WitnessRule::DivisibleBelowBottomConvention : WitnessRule::DivisibleBelow;
      guided = Witness{bottom, levels.front(), rule};
    } else {
      for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
        if (cmp(levels[j], target) > 0 && cmp(target, levels[j + 1]) > 0) {
          guided = Witness{levels[j], levels[j + 1], WitnessRule::RegularStep};
          break;
        }
      }
    }
    if (guided && is_p_regular(g, guided->low, guided->high, p, threshold)) return guided;
  }
  return chain_search(g, target, p, threshold, levels, window);
}

}  // namespace

std::optional<Certificate> non_definability_certificate(const LexWord& g, const ConvexCut& target,
                                                        std::span<const std::uint64_t> explicit_primes) {
  const std::uint64_t depth = target.inner.value_or(0);
  auto classes = prime_classes(g, explicit_primes, depth + 1);
  const auto t = SymCut::from(target);
  Certificate cert{target, {}};
  for (const auto& rep : classes.representatives()) {
    auto w = find_witness(g, t, rep, classes.threshold, depth + 2);
    if (!w) return std::nullopt;
    auto same = [&](const CertificateEntry& e) { return e.low == w->low && e.high == w->high && e.rule == w->rule; };
    auto it = std::find_if(cert.entries.begin(), cert.entries.end(), same);
    if (it != cert.entries.end()) {
      it->primes = it->primes | classes.members(rep);
    } else {
      cert.entries.push_back({classes.members(rep), w->low, w->high, w->rule});
    }
  }
  return cert;
}

}  // namespace arclab
