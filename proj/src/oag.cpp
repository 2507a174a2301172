#include "arclab/oag.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "arclab/errors.hpp"
#include "arclab/overloaded.hpp"

namespace arclab {

namespace {

// 2^m * arctan(1/x) up to an additive error of at most the returned bound.
Integer arctan_inverse_scaled(unsigned long x, unsigned long m, unsigned long& error_bound) {
  Integer power = Integer(1) << m;
  power /= x;
  const Integer x2 = Integer(x) * x;
  Integer sum = 0;
  unsigned long j = 0;
  while (power != 0) {
    Integer term = power / (2 * j + 1);
    if (j % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
    power /= x2;
    ++j;
  }
  error_bound = j + 1;
  return sum;
}

RationalInterval compute_pi(unsigned bits) {
  const unsigned long m = bits + 16;
  unsigned long e5 = 0, e239 = 0;
  Integer a5 = arctan_inverse_scaled(5, m, e5);
  Integer a239 = arctan_inverse_scaled(239, m, e239);
  Integer scaled = 16 * a5 - 4 * a239;
  Integer err = 16 * e5 + 4 * e239;
  Integer denom = Integer(1) << m;
  RationalInterval out{Rational(scaled - err, denom), Rational(scaled + err, denom)};
  out.lo.canonicalize();
  out.hi.canonicalize();
  return out;
}

bool coprime_denominator(const Rational& r, std::uint64_t q) {
  return r.get_den() % q != 0;
}

}  // namespace

RationalInterval pi_enclosure(unsigned bits) {
  static const RationalInterval cached = compute_pi(512);
  if (bits <= 500) return cached;
  return compute_pi(bits);
}

int free_real_sign(const FreeReal& f, std::span<const Rational> coords) {
  Rational rational_part = 0;
  Rational pi_coeff = 0;
  for (std::size_t i = 0; i < f.gens.size(); ++i) {
    if (f.gens[i].kind == RealGenerator::Kind::Pi) {
      pi_coeff += coords[i];
    } else {
      rational_part += coords[i] * f.gens[i].value;
    }
  }
  if (pi_coeff == 0) return sgn(rational_part);
  // pi is irrational, so a nonzero pi coefficient makes the value nonzero and
  // refinement terminates.
  auto decide = [&](const RationalInterval& pi) {
    Rational a = rational_part + pi_coeff * pi.lo;
    Rational b = rational_part + pi_coeff * pi.hi;
    if (a > 0 && b > 0) return 1;
    if (a < 0 && b < 0) return -1;
    return 0;
  };
  static const RationalInterval coarse{Rational(333, 106), Rational(355, 113)};
  static const RationalInterval fine = compute_pi(512);
  if (int s = decide(coarse)) return s;
  if (int s = decide(fine)) return s;
  for (unsigned bits = 1024;; bits *= 2) {
    if (int s = decide(compute_pi(bits))) return s;
  }
}

PrimeSet divisible_primes(const ComponentKind& c) {
  return std::visit(overloaded{
                        [](const Zed&) { return PrimeSet::none(); },
                        [](const Rat&) { return PrimeSet::all(); },
                        [](const LocZ& l) { return PrimeSet::all_except({l.q}); },
                        [](const FreeReal&) { return PrimeSet::none(); },
                        [](const OmegaTower& t) { return PrimeSet::first(t.first_summand()); },
                        [](const PolyModule& m) { return PrimeSet::all_except({m.q}); },
                    },
                    c);
}

QuotientExponent quotient_exponent(const ComponentKind& c, std::uint64_t p) {
  return std::visit(
      overloaded{
          [](const Zed&) { return QuotientExponent{1}; },
          [](const Rat&) { return QuotientExponent{0}; },
          [p](const LocZ& l) { return QuotientExponent{l.q == p ? 1u : 0u}; },
          [](const FreeReal& f) { return QuotientExponent{f.gens.size()}; },
          [p](const OmegaTower& t) {
            return QuotientExponent{prime_index(p) >= t.first_summand() ? 1u : 0u};
          },
          [p](const PolyModule& m) {
            return m.q == p ? QuotientExponent::infinite() : QuotientExponent{0};
          },
      },
      c);
}

bool is_effective(const ComponentKind& c) {
  return !std::holds_alternative<OmegaTower>(c) && !std::holds_alternative<PolyModule>(c);
}

std::size_t arity(const ComponentKind& c) {
  if (auto* f = std::get_if<FreeReal>(&c)) return f->gens.size();
  return is_effective(c) ? 1 : 0;
}

bool is_schematic_chain(const ComponentKind& c) { return std::holds_alternative<OmegaTower>(c); }

std::vector<std::uint64_t> mentioned_primes(const ComponentKind& c) {
  if (auto* l = std::get_if<LocZ>(&c)) return {l->q};
  if (auto* m = std::get_if<PolyModule>(&c)) return {m->q};
  return {};
}

std::string to_string(const Rational& r) { return r.get_str(); }

namespace {

std::string to_string(const RealGenerator& g) {
  return g.kind == RealGenerator::Kind::Pi ? "pi" : g.value.get_str();
}

void validate(const ComponentKind& c) {
  std::visit(overloaded{
                 [](const Zed&) {},
                 [](const Rat&) {},
                 [](const LocZ& l) {
                   if (!is_prime(l.q)) {
                     throw std::invalid_argument("Zloc base " + std::to_string(l.q) + " is not prime");
                   }
                 },
                 [](const FreeReal& f) {
                   if (f.gens.empty()) throw std::invalid_argument("real() needs at least one generator");
                   int rationals = 0, pis = 0;
                   for (const auto& g : f.gens) {
                     if (g.kind == RealGenerator::Kind::Pi) {
                       ++pis;
                     } else {
                       if (g.value == 0) throw std::invalid_argument("real() generator 0 is not free");
                       ++rationals;
                     }
                   }
                   if (rationals > 1 || pis > 1) {
                     throw std::invalid_argument("real() generators are not Q-linearly independent");
                   }
                 },
                 [](const OmegaTower&) {},
                 [](const PolyModule& m) {
                   if (!is_prime(m.q)) {
                     throw std::invalid_argument("Zloc base " + std::to_string(m.q) + " is not prime");
                   }
                   if (m.gen.kind != RealGenerator::Kind::Pi) {
                     throw std::invalid_argument("poly_module generator must be transcendental (pi)");
                   }
                 },
             },
             c);
}

}  // namespace

std::string to_string(const ComponentKind& c) {
  return std::visit(overloaded{
                        [](const Zed&) -> std::string { return "Z"; },
                        [](const Rat&) -> std::string { return "Q"; },
                        [](const LocZ& l) { return "Zloc(" + std::to_string(l.q) + ")"; },
                        [](const FreeReal& f) {
                          std::string s = "real(";
                          for (std::size_t i = 0; i < f.gens.size(); ++i) {
                            if (i) s += ',';
                            s += to_string(f.gens[i]);
                          }
                          return s + ")";
                        },
                        [](const OmegaTower& t) {
                          return "omega_tower(start=" + std::to_string(t.start) + ")";
                        },
                        [](const PolyModule& m) {
                          return "poly_module(Zloc(" + std::to_string(m.q) + ")," + to_string(m.gen) + ")";
                        },
                    },
                    c);
}

LexWord::LexWord(std::vector<ComponentKind> components, std::optional<std::string> name)
    : components_(std::move(components)), name_(std::move(name)) {
  for (const auto& c : components_) {
    validate(c);
    offsets_.push_back(offsets_.back() + arity(c));
  }
}

bool LexWord::effective() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ComponentKind& c) { return is_effective(c); });
}

std::string to_string(const LexWord& g) {
  std::string s = "lex(";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += ',';
    s += to_string(g[i]);
  }
  return s + ")";
}

namespace {

void require_effective(const LexWord& g) {
  if (!g.effective()) throw NonEffectiveGroup("element arithmetic over schematic group " + to_string(g));
}

void require_shape(const LexWord& g, const GroupElement& a) {
  require_effective(g);
  if (a.coords.size() != g.total_arity()) {
    throw std::invalid_argument("shape mismatch: element " + to_string(a) + " over " + to_string(g));
  }
}

}  // namespace

namespace {

// (component, coordinate) of the first coordinate outside its component.
std::optional<std::pair<std::size_t, std::size_t>> invalid_coordinate(const LexWord& g, GroupElement& a) {
  require_shape(g, a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = g.offset(i); j < g.offset(i + 1); ++j) {
      auto& x = a.coords[j];
      x.canonicalize();
      bool ok = std::visit(overloaded{
                               [&](const Zed&) { return x.get_den() == 1; },
                               [&](const Rat&) { return true; },
                               [&](const LocZ& l) { return coprime_denominator(x, l.q); },
                               [&](const FreeReal&) { return x.get_den() == 1; },
                               [&](const auto&) { return false; },
                           },
                           g[i]);
      if (!ok) return std::pair{i, j};
    }
  }
  return std::nullopt;
}

}  // namespace

GroupElement make_element(const LexWord& g, std::vector<Rational> coords) {
  GroupElement a{std::move(coords)};
  if (auto bad = invalid_coordinate(g, a)) {
    throw std::invalid_argument("coordinate " + a.coords[bad->second].get_str() + " not in component " +
                                to_string(g[bad->first]));
  }
  return a;
}

std::optional<GroupElement> try_make_element(const LexWord& g, std::vector<Rational> coords) {
  GroupElement a{std::move(coords)};
  if (invalid_coordinate(g, a)) return std::nullopt;
  return a;
}

GroupElement zero_element(const LexWord& g) {
  require_effective(g);
  return GroupElement{std::vector<Rational>(g.total_arity(), Rational(0))};
}

GroupElement unit_element(const LexWord& g, std::size_t coord, Rational scale) {
  auto e = zero_element(g);
  e.coords.at(coord) = std::move(scale);
  return make_element(g, std::move(e.coords));
}

bool is_zero(const GroupElement& a) {
  return std::all_of(a.coords.begin(), a.coords.end(), [](const Rational& r) { return r == 0; });
}

GroupElement elem_add(const LexWord& g, const GroupElement& a, const GroupElement& b) {
  require_shape(g, a);
  require_shape(g, b);
  GroupElement out{a.coords};
  for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += b.coords[i];
  return out;
}

GroupElement elem_neg(const LexWord& g, const GroupElement& a) {
  require_shape(g, a);
  GroupElement out{a.coords};
  for (auto& x : out.coords) x = -x;
  return out;
}

GroupElement elem_sub(const LexWord& g, const GroupElement& a, const GroupElement& b) {
  return elem_add(g, a, elem_neg(g, b));
}

GroupElement elem_scale(const LexWord& g, const GroupElement& a, const Integer& k) {
  require_shape(g, a);
  GroupElement out{a.coords};
  for (auto& x : out.coords) x *= k;
  return out;
}

namespace {

int component_sign(const LexWord& g, std::size_t i, const GroupElement& a) {
  const auto first = a.coords.begin() + static_cast<std::ptrdiff_t>(g.offset(i));
  if (auto* f = std::get_if<FreeReal>(&g[i])) {
    return free_real_sign(*f, std::span<const Rational>(&*first, f->gens.size()));
  }
  return sgn(*first);
}

}  // namespace

int prefix_sign(const LexWord& g, const GroupElement& a, std::size_t seg) {
  require_shape(g, a);
  for (std::size_t i = 0; i < seg && i < g.size(); ++i) {
    if (int s = component_sign(g, i, a); s != 0) return s;
  }
  return 0;
}

int elem_sign(const LexWord& g, const GroupElement& a) { return prefix_sign(g, a, g.size()); }

std::strong_ordering elem_cmp(const LexWord& g, const GroupElement& a, const GroupElement& b) {
  require_shape(g, a);
  require_shape(g, b);
  int s = 0;
  for (std::size_t i = 0; i < g.size() && s == 0; ++i) {
    const std::size_t lo = g.offset(i), hi = g.offset(i + 1);
    if (auto* f = std::get_if<FreeReal>(&g[i])) {
      std::vector<Rational> diff;
      diff.reserve(hi - lo);
      bool nonzero = false;
      for (std::size_t j = lo; j < hi; ++j) {
        diff.push_back(a.coords[j] - b.coords[j]);
        nonzero = nonzero || diff.back() != 0;
      }
      if (nonzero) s = free_real_sign(*f, diff);
    } else if (lo < hi) {
      s = cmp(a.coords[lo], b.coords[lo]);
    }
  }
  return s < 0 ? std::strong_ordering::less
               : (s > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::size_t leading_component(const LexWord& g, const GroupElement& a) {
  require_shape(g, a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = g.offset(i); j < g.offset(i + 1); ++j) {
      if (a.coords[j] != 0) return i;
    }
  }
  return g.size();
}

bool elem_p_divisible(const LexWord& g, const GroupElement& a, std::uint64_t p) {
  require_shape(g, a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = g.offset(i); j < g.offset(i + 1); ++j) {
      const auto& x = a.coords[j];
      bool ok = std::visit(overloaded{
                               [&](const Rat&) { return true; },
                               [&](const LocZ& l) { return l.q != p || x.get_num() % p == 0; },
                               [&](const auto&) { return x.get_num() % p == 0; },
                           },
                           g[i]);
      if (!ok) return false;
    }
  }
  return true;
}

std::optional<GroupElement> elem_divide(const LexWord& g, const GroupElement& a, std::uint64_t p) {
  if (!elem_p_divisible(g, a, p)) return std::nullopt;
  GroupElement out{a.coords};
  for (auto& x : out.coords) x /= Rational(static_cast<unsigned long>(p));
  return out;
}

std::vector<std::uint64_t> coset_mod_p(const LexWord& g, const GroupElement& a, std::uint64_t p,
                                       std::size_t from_component) {
  require_shape(g, a);
  std::vector<std::uint64_t> out(g.total_arity(), 0);
  const Integer modulus(static_cast<unsigned long>(p));
  for (std::size_t i = from_component; i < g.size(); ++i) {
    bool reduces = std::visit(overloaded{
                                  [](const Rat&) { return false; },
                                  [&](const LocZ& l) { return l.q == p; },
                                  [](const auto&) { return true; },
                              },
                              g[i]);
    if (!reduces) continue;
    for (std::size_t j = g.offset(i); j < g.offset(i + 1); ++j) {
      const auto& x = a.coords[j];
      Integer inv;
      mpz_invert(inv.get_mpz_t(), x.get_den().get_mpz_t(), modulus.get_mpz_t());
      Integer r = (x.get_num() * inv) % modulus;
      if (r < 0) r += modulus;
      out[j] = r.get_ui();
    }
  }
  return out;
}

std::string to_string(const GroupElement& a) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    if (i) os << ',';
    os << a.coords[i].get_str();
  }
  os << ')';
  return os.str();
}

}  // namespace arclab
