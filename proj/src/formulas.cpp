#include <stdexcept>

#include "arclab/errors.hpp"
#include "arclab/logic.hpp"
#include "arclab/primes.hpp"

namespace arclab {

namespace {

void require_prime(std::uint64_t p) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
}

std::size_t power(std::uint64_t p, std::uint64_t n) {
  std::size_t out = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (out > (std::size_t{1} << 20) / p) throw std::invalid_argument("p^n too large");
    out *= p;
  }
  return out;
}

// exists y. (y^p = u or y^p = -u)
FormulaPtr signed_root(std::uint64_t p, const TermPtr& u) {
  auto yp = t_pow(t_var("y"), static_cast<unsigned>(p));
  return f_exists("y", f_or({f_eq(yp, u), f_eq(yp, t_neg(u))}));
}

// The common right-hand side: some parameter makes x_i*y a p-th power up to a v_p-unit.
FormulaPtr coset_disjunction(std::uint64_t p, const std::vector<HahnSeries>& params, const FormulaPtr& phi) {
  std::vector<FormulaPtr> cases;
  auto zp = t_pow(t_var("z"), static_cast<unsigned>(p));
  for (const auto& c : params) {
    auto xy = t_mul(t_const(c), t_var("y"));
    cases.push_back(f_exists("z", f_and({apply_fraction(phi, xy, zp), apply_fraction(phi, zp, xy)})));
  }
  return f_or(std::move(cases));
}

}  // namespace

FormulaPtr build_psi_p(std::uint64_t p) {
  require_prime(p);
  auto x = t_var("x");
  return f_and({f_not(signed_root(p, x)),
                f_exists("z", f_eq(t_pow(t_var("z"), static_cast<unsigned>(p)), t_add(t_int(1), x)))});
}

FormulaPtr build_phi_p(std::uint64_t p) {
  auto psi = build_psi_p(p);
  auto x = t_var("x");
  auto clause = f_forall("z", f_implies(substitute(psi, "x", t_var("z")),
                                        substitute(psi, "x", t_mul(x, t_var("z")))));
  return f_or({psi, f_and({signed_root(p, x), clause}), f_eq(x, t_int(0))});
}

std::vector<HahnSeries> choose_params(const Group& g, std::uint64_t p, std::uint64_t n) {
  require_prime(p);
  if (!g->effective()) throw NonEffectiveGroup("choose_params needs an effective group");
  const std::size_t want = power(p, n);
  const auto delta = g_pn(*g, p, n);
  // Coordinates of Delta whose component is not p-divisible span Delta/p*Delta.
  std::vector<std::size_t> axes;
  for (std::size_t i = delta.seg; i < g->size(); ++i) {
    if (quotient_exponent((*g)[i], p).is_zero()) continue;
    for (std::size_t j = g->offset(i); j < g->offset(i + 1); ++j) axes.push_back(j);
  }
  if (axes.size() > n) throw std::logic_error("G_(p,n) quotient exceeds p^n");
  std::vector<HahnSeries> out;
  std::vector<std::uint64_t> digits(axes.size(), 0);
  for (std::size_t k = 0; k < power(p, axes.size()); ++k) {
    std::vector<Rational> coords(g->total_arity(), Rational(0));
    for (std::size_t a = 0; a < axes.size(); ++a) coords[axes[a]] = Rational(static_cast<long>(digits[a]));
    out.push_back(HahnSeries::monomial(g, 1, make_element(*g, coords)));
    for (std::size_t a = 0; a < digits.size(); ++a) {
      if (++digits[a] < p) break;
      digits[a] = 0;
    }
  }
  while (out.size() < want) out.push_back(HahnSeries::constant(g, 1));
  return out;
}

FormulaPtr build_psi_pn(std::uint64_t p, std::uint64_t n, const std::vector<HahnSeries>& params) {
  require_prime(p);
  if (params.size() != power(p, n)) {
    throw std::invalid_argument("expected " + std::to_string(power(p, n)) + " parameters, got " +
                                std::to_string(params.size()));
  }
  auto phi = build_phi_p(p);
  auto x = t_var("x"), y = t_var("y");
  auto rhs = coset_disjunction(p, params, phi);
  auto phi_x = phi;
  auto phi_y = substitute(phi, "x", y);
  auto nonzero = f_neq(y, t_int(0));
  auto first = f_forall("y", f_implies(f_and({nonzero, phi_y, apply_fraction(phi, x, y)}), rhs));
  auto second = f_forall("y", f_implies(f_and({nonzero, f_not(phi_y), apply_fraction(phi, y, x)}), rhs));
  return f_or({f_and({phi_x, first}), f_and({f_not(phi_x), second})});
}

FormulaPtr build_phi_pn(std::uint64_t p, std::uint64_t n, const std::vector<HahnSeries>& params) {
  return f_or({build_phi_p(p), build_psi_pn(p, n, params)});
}

}  // namespace arclab
