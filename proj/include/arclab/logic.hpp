#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arclab/hahn.hpp"

namespace arclab {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Ring-language terms. Div only appears transiently during parsing and is
/// desugared away before a Formula is returned.
struct Term {
  enum class Kind { Int, Var, Const, Add, Sub, Mul, Neg, Pow, Div };
  Kind kind = Kind::Int;
  Integer value;                              // Int
  std::string name;                           // Var
  std::shared_ptr<const HahnSeries> series;   // Const
  std::vector<TermPtr> args;
  unsigned exponent = 0;                      // Pow

  bool operator==(const Term& o) const;
};

TermPtr t_int(long v);
TermPtr t_var(std::string name);
TermPtr t_const(HahnSeries s);
TermPtr t_add(TermPtr a, TermPtr b);
TermPtr t_sub(TermPtr a, TermPtr b);
TermPtr t_mul(TermPtr a, TermPtr b);
TermPtr t_neg(TermPtr a);
TermPtr t_pow(TermPtr a, unsigned n);
TermPtr t_div(TermPtr a, TermPtr b);

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { True, False, Eq, Neq, And, Or, Not, Implies, Exists, Forall };
  Kind kind = Kind::True;
  TermPtr lhs, rhs;               // Eq, Neq
  std::vector<FormulaPtr> args;   // And/Or (>= 2), Not (1), Implies (2), quantifiers (1)
  std::string var;                // quantifiers

  bool operator==(const Formula& o) const;
};

FormulaPtr f_true();
FormulaPtr f_false();
FormulaPtr f_eq(TermPtr a, TermPtr b);
FormulaPtr f_neq(TermPtr a, TermPtr b);
/// Flattens nothing; a single operand is returned as is.
FormulaPtr f_and(std::vector<FormulaPtr> args);
FormulaPtr f_or(std::vector<FormulaPtr> args);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(std::string var, FormulaPtr body);
FormulaPtr f_forall(std::string var, FormulaPtr body);

std::set<std::string> free_vars(const TermPtr& t);
std::set<std::string> free_vars(const FormulaPtr& f);
/// Capture-avoiding; bound variables clashing with the replacement are renamed
/// to the first free name among base, base1, base2, ...
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const TermPtr& replacement);
/// F(a/b) as exists w. (w*b = a and b != 0 and F(w)) for the template's free variable x.
FormulaPtr apply_fraction(const FormulaPtr& tmpl, const TermPtr& num, const TermPtr& den,
                          const std::string& var = "x");
/// Equality up to renaming of bound variables.
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);

std::string to_string(const TermPtr& t);
std::string to_string(const FormulaPtr& f);

struct FormulaParseOptions {
  Group group;                                          // needed for [series] constants
  std::optional<std::vector<std::string>> parameters;   // when set, other free variables are errors
};
FormulaPtr parse_formula(std::string_view text, const FormulaParseOptions& options = {});

/// psi_p(x)
FormulaPtr build_psi_p(std::uint64_t p);
/// phi_p(x)
FormulaPtr build_phi_p(std::uint64_t p);
/// Monomials whose exponents meet every coset of p*G_(p,n) in G_(p,n); padded with 1 to p^n entries.
std::vector<HahnSeries> choose_params(const Group& g, std::uint64_t p, std::uint64_t n);
/// psi_(p,n)(x)
FormulaPtr build_psi_pn(std::uint64_t p, std::uint64_t n, const std::vector<HahnSeries>& params);
/// phi_(p,n)(x) = phi_p(x) or psi_(p,n)(x)
FormulaPtr build_phi_pn(std::uint64_t p, std::uint64_t n, const std::vector<HahnSeries>& params);

using Assignment = std::map<std::string, HahnSeries>;

struct EvalOutcome {
  enum class Kind { True, False, FalsifiedBy, UnknownOnSample };
  Kind kind = Kind::UnknownOnSample;
  Assignment witness;  // FalsifiedBy, or True on a top-level existential
};

std::string to_string(EvalOutcome::Kind k);

/// Decides formulas built from quantifier-free atoms and the supported
/// quantifier shapes; throws UnsupportedQuantifierPattern otherwise.
bool eval_decidable(const FormulaPtr& f, const Assignment& env, const Group& g);

struct SampleBudget {
  std::size_t samples = 200;
  std::uint64_t seed = 42;
};

/// Quantifiers other than root and fraction atoms are replaced by a
/// deterministic witness grid.
EvalOutcome eval_sampled(const FormulaPtr& f, const Assignment& env, const Group& g, const SampleBudget& budget);

/// Top-level universal subformulas (not nested inside another quantifier).
std::vector<FormulaPtr> universal_clauses(const FormulaPtr& f);

/// Term value under an assignment.
HahnSeries eval_term(const TermPtr& t, const Assignment& env, const Group& g);

}  // namespace arclab
