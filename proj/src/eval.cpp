#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>

#include "arclab/errors.hpp"
#include "arclab/logic.hpp"
#include "arclab/overloaded.hpp"
#include "arclab/primes.hpp"

namespace arclab {

namespace {

using K = Formula::Kind;
using TK = Term::Kind;

std::string fresh(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (unsigned k = 1;; ++k) {
    auto c = base + std::to_string(k);
    if (!avoid.count(c)) return c;
  }
}

bool is_var(const TermPtr& t, const std::string& name) { return t->kind == TK::Var && t->name == name; }

bool same(const TermPtr& a, const TermPtr& b) { return *a == *b; }

bool in_cut(const LexWord& g, const GroupElement& e, const ConvexCut& c) {
  if (c.inner) throw NonEffectiveGroup("membership in an inner cut");
  return leading_component(g, e) >= c.seg;
}

[[noreturn]] void undetermined(const std::string& what) {
  throw UnsupportedQuantifierPattern(what + " is undetermined at the truncation bound");
}

// ---------------------------------------------------------------------------
// Shape recognizers. Each returns the pieces needed to rebuild the shape; the
// quantified clauses are then confirmed by rebuilding and comparing up to
// renaming of bound variables.
// ---------------------------------------------------------------------------

struct RootAtom {
  std::uint64_t p;
  TermPtr u;
  bool signed_root;
};

std::optional<RootAtom> match_root(const FormulaPtr& f) {
  if (f->kind != K::Exists) return {};
  const auto& v = f->var;
  const auto& b = f->args[0];
  auto root_of = [&](const FormulaPtr& eq) -> std::optional<std::pair<unsigned, TermPtr>> {
    if (eq->kind != K::Eq || eq->lhs->kind != TK::Pow || !is_var(eq->lhs->args[0], v)) return {};
    if (free_vars(eq->rhs).count(v)) return {};
    return std::pair{eq->lhs->exponent, eq->rhs};
  };
  if (b->kind == K::Eq) {
    auto r = root_of(b);
    if (!r || r->first == 0) return {};
    return RootAtom{r->first, r->second, false};
  }
  if (b->kind == K::Or && b->args.size() == 2) {
    auto r1 = root_of(b->args[0]);
    auto r2 = root_of(b->args[1]);
    if (!r1 || !r2 || r1->first != r2->first || r1->first == 0) return {};
    if (r2->second->kind != TK::Neg || !same(r2->second->args[0], r1->second)) return {};
    return RootAtom{r1->first, r1->second, true};
  }
  return {};
}

struct FractionAtom {
  std::string w;
  TermPtr num, den;
  FormulaPtr body;
};

std::optional<FractionAtom> match_fraction(const FormulaPtr& f) {
  if (f->kind != K::Exists) return {};
  const auto& b = f->args[0];
  if (b->kind != K::And || b->args.size() != 3) return {};
  const auto& eq = b->args[0];
  const auto& ne = b->args[1];
  if (eq->kind != K::Eq || eq->lhs->kind != TK::Mul || !is_var(eq->lhs->args[0], f->var)) return {};
  auto den = eq->lhs->args[1];
  auto num = eq->rhs;
  if (ne->kind != K::Neq || !same(ne->lhs, den) || ne->rhs->kind != TK::Int || ne->rhs->value != 0) return {};
  if (free_vars(den).count(f->var) || free_vars(num).count(f->var)) return {};
  return FractionAtom{f->var, num, den, b->args[2]};
}

std::optional<std::uint64_t> first_power(const FormulaPtr& f) {
  std::optional<std::uint64_t> out;
  auto term = [&](auto&& self, const TermPtr& t) -> void {
    if (out || !t) return;
    if (t->kind == TK::Pow) {
      out = t->exponent;
      return;
    }
    for (const auto& a : t->args) self(self, a);
  };
  auto formula = [&](auto&& self, const FormulaPtr& g) -> void {
    if (out) return;
    term(term, g->lhs);
    term(term, g->rhs);
    for (const auto& a : g->args) self(self, a);
  };
  formula(formula, f);
  if (out && !is_prime(*out)) return {};
  return out;
}

class Templates {
 public:
  const FormulaPtr& psi(std::uint64_t p) {
    auto it = psi_.find(p);
    if (it == psi_.end()) it = psi_.emplace(p, build_psi_p(p)).first;
    return it->second;
  }
  const FormulaPtr& phi(std::uint64_t p) {
    auto it = phi_.find(p);
    if (it == phi_.end()) it = phi_.emplace(p, build_phi_p(p)).first;
    return it->second;
  }

 private:
  std::map<std::uint64_t, FormulaPtr> psi_, phi_;
};

// forall z. psi_p(z) -> psi_p(u*z)
struct PhiClause {
  std::uint64_t p;
  TermPtr u;
};

std::optional<PhiClause> match_phi_clause(const FormulaPtr& f, Templates& tpl) {
  if (f->kind != K::Forall) return {};
  const auto& z = f->var;
  const auto& b = f->args[0];
  if (b->kind != K::Implies) return {};
  auto p = first_power(b);
  if (!p) return {};
  const auto& psi = tpl.psi(*p);
  if (!alpha_equal(b->args[0], substitute(psi, "x", t_var(z)))) return {};
  // psi_p(t) ends with exists z'. z'^p = 1 + t
  const auto& rhs = b->args[1];
  if (rhs->kind != K::And || rhs->args.size() != 2) return {};
  const auto& ex = rhs->args[1];
  if (ex->kind != K::Exists || ex->args[0]->kind != K::Eq) return {};
  const auto& sum = ex->args[0]->rhs;
  if (sum->kind != TK::Add || sum->args.size() != 2) return {};
  auto t = sum->args[1];
  if (t->kind != TK::Mul) return {};
  TermPtr u;
  if (is_var(t->args[1], z)) {
    u = t->args[0];
  } else if (is_var(t->args[0], z)) {
    u = t->args[1];
  } else {
    return {};
  }
  if (free_vars(u).count(z)) return {};
  if (!alpha_equal(rhs, substitute(psi, "x", t))) return {};
  return PhiClause{*p, u};
}

// The two universal clauses of psi_(p,n): kind 1 quantifies over y with
// phi_p(y) and phi_p(u/y), kind 2 over y with not phi_p(y) and phi_p(y/u).
struct PsiPnClause {
  std::uint64_t p;
  int kind;
  TermPtr u;
  std::vector<TermPtr> params;
};

FormulaPtr rebuild_pn_clause(std::uint64_t p, int kind, const TermPtr& u, const std::vector<TermPtr>& params,
                             const std::string& y, const FormulaPtr& phi) {
  auto yv = t_var(y);
  std::set<std::string> avoid = free_vars(u);
  avoid.insert(y);
  for (const auto& c : params) {
    for (const auto& v : free_vars(c)) avoid.insert(v);
  }
  auto z = fresh("z", avoid);
  auto zp = t_pow(t_var(z), static_cast<unsigned>(p));
  std::vector<FormulaPtr> cases;
  for (const auto& c : params) {
    auto xy = t_mul(c, yv);
    cases.push_back(f_exists(z, f_and({apply_fraction(phi, xy, zp), apply_fraction(phi, zp, xy)})));
  }
  auto phi_y = substitute(phi, "x", yv);
  auto guard = kind == 1 ? f_and({f_neq(yv, t_int(0)), phi_y, apply_fraction(phi, u, yv)})
                         : f_and({f_neq(yv, t_int(0)), f_not(phi_y), apply_fraction(phi, yv, u)});
  return f_forall(y, f_implies(guard, f_or(std::move(cases))));
}

std::optional<PsiPnClause> match_pn_clause(const FormulaPtr& f, Templates& tpl) {
  if (f->kind != K::Forall) return {};
  const auto& y = f->var;
  const auto& b = f->args[0];
  if (b->kind != K::Implies) return {};
  const auto& guard = b->args[0];
  if (guard->kind != K::And || guard->args.size() != 3) return {};
  auto p = first_power(guard);
  if (!p) return {};
  int kind = guard->args[1]->kind == K::Not ? 2 : 1;
  auto frac = match_fraction(guard->args[2]);
  if (!frac) return {};
  TermPtr u;
  if (kind == 1 && is_var(frac->den, y)) {
    u = frac->num;
  } else if (kind == 2 && is_var(frac->num, y)) {
    u = frac->den;
  } else {
    return {};
  }
  if (free_vars(u).count(y)) return {};
  std::vector<TermPtr> params;
  const auto& rhs = b->args[1];
  std::vector<FormulaPtr> cases = rhs->kind == K::Or ? rhs->args : std::vector<FormulaPtr>{rhs};
  for (const auto& c : cases) {
    if (c->kind != K::Exists || c->args[0]->kind != K::And || c->args[0]->args.size() != 2) return {};
    auto inner = match_fraction(c->args[0]->args[0]);
    if (!inner || inner->num->kind != TK::Mul || !is_var(inner->num->args[1], y)) return {};
    params.push_back(inner->num->args[0]);
    if (free_vars(params.back()).count(y)) return {};
  }
  if (!alpha_equal(f, rebuild_pn_clause(*p, kind, u, params, y, tpl.phi(*p)))) return {};
  return PsiPnClause{*p, kind, u, params};
}

std::optional<std::uint64_t> log_base(std::size_t count, std::uint64_t p) {
  std::uint64_t n = 0;
  while (count > 1) {
    if (count % p) return {};
    count /= p;
    ++n;
  }
  return count == 1 ? std::optional{n} : std::nullopt;
}

using Shape = std::variant<std::monostate, RootAtom, FractionAtom, PhiClause, PsiPnClause>;

// Recognition is purely structural, so it is memoized per node. The cache
// holds the node itself so that its address is never reused.
const Shape& recognize(const FormulaPtr& f) {
  thread_local Templates tpl;
  thread_local std::unordered_map<const Formula*, std::pair<FormulaPtr, Shape>> cache;
  auto it = cache.find(f.get());
  if (it != cache.end()) return it->second.second;
  Shape s;
  if (f->kind == K::Exists) {
    if (auto r = match_root(f)) {
      s = *r;
    } else if (auto fr = match_fraction(f)) {
      s = *fr;
    }
  } else if (f->kind == K::Forall) {
    if (auto c = match_phi_clause(f, tpl)) {
      s = *c;
    } else if (auto c2 = match_pn_clause(f, tpl)) {
      s = *c2;
    }
  }
  return cache.emplace(f.get(), std::pair{f, std::move(s)}).first->second.second;
}

// ---------------------------------------------------------------------------
// Exact evaluation.
// ---------------------------------------------------------------------------

class Decider {
 public:
  explicit Decider(Group g) : g_(std::move(g)) {}

  bool decide(const FormulaPtr& f, const Assignment& env) {
    switch (f->kind) {
      case K::True:
        return true;
      case K::False:
        return false;
      case K::Eq:
      case K::Neq: {
        bool eq = equal(eval_term(f->lhs, env, g_), eval_term(f->rhs, env, g_));
        return f->kind == K::Eq ? eq : !eq;
      }
      case K::And:
        for (const auto& a : f->args) {
          if (!decide(a, env)) return false;
        }
        return true;
      case K::Or:
        for (const auto& a : f->args) {
          if (decide(a, env)) return true;
        }
        return false;
      case K::Not:
        return !decide(f->args[0], env);
      case K::Implies:
        return !decide(f->args[0], env) || decide(f->args[1], env);
      case K::Exists:
      case K::Forall:
        if (auto r = quantifier(f, env)) return *r;
        throw UnsupportedQuantifierPattern("unsupported quantifier shape: " + to_string(f));
    }
    return false;
  }

  /// Exact answer for a recognized quantifier shape, nullopt otherwise.
  std::optional<bool> quantifier(const FormulaPtr& f, const Assignment& env) {
    const auto& m = recognize(f);
    return std::visit(overloaded{
                          [](const std::monostate&) -> std::optional<bool> { return std::nullopt; },
                          [&](const RootAtom& r) -> std::optional<bool> { return root(r, env); },
                          [&](const FractionAtom& fr) -> std::optional<bool> { return fraction(fr, env); },
                          [&](const PhiClause& c) -> std::optional<bool> {
                            return phi_clause(c.p, eval_term(c.u, env, g_));
                          },
                          [&](const PsiPnClause& c) -> std::optional<bool> { return pn_clause(c, env); },
                      },
                      m);
  }

  bool root(const RootAtom& r, const Assignment& env) {
    auto u = eval_term(r.u, env, g_);
    if (!u.is_zero() && u.no_terms()) undetermined("root of " + to_string(u));
    return root_exists(u, r.p, r.signed_root);
  }

  bool fraction(const FractionAtom& fr, const Assignment& env) {
    auto den = eval_term(fr.den, env, g_);
    if (den.is_zero()) return false;
    if (den.no_terms()) undetermined("denominator " + to_string(den));
    auto num = eval_term(fr.num, env, g_);
    auto local = env;
    // A short division settles almost every body; any failure is retried at full depth.
    for (int steps : {1, 4}) {
      try {
        local.insert_or_assign(fr.w, divide(num, den, steps));
        return decide(fr.body, local);
      } catch (const std::exception&) {
      }
    }
    local.insert_or_assign(fr.w, divide(num, den, 32));
    return decide(fr.body, local);
  }

  /// v_p ring membership of x stands behind this clause; see the ledger entry.
  bool phi_clause(std::uint64_t p, const HahnSeries& x) {
    const auto& g = *g_;
    if (group_exponent(g, p).is_zero()) return true;
    if (x.is_zero()) return false;
    if (x.no_terms()) undetermined("valuation of " + to_string(x));
    auto gamma = v_of(x);
    if (!elem_p_divisible(g, gamma, p)) return false;
    return !(elem_sign(g, gamma) < 0 && !in_cut(g, gamma, g_p(p)));
  }

  bool pn_clause(const PsiPnClause& c, const Assignment& env) {
    const auto& g = *g_;
    auto n = log_base(c.params.size(), c.p);
    if (!n) throw UnsupportedQuantifierPattern("parameter count is not a power of " + std::to_string(c.p));
    auto delta = g_pn(g, c.p, *n);
    if (delta.inner) throw NonEffectiveGroup("G_(p,n) is an inner cut");
    auto e = quotient_exponent(g, ConvexCut::bottom(g), delta, c.p);
    if (e.is_infinite()) throw UnsupportedQuantifierPattern("infinite quotient below G_(p,n)");
    std::set<std::vector<std::uint64_t>> classes;
    for (const auto& t : c.params) {
      auto v = eval_term(t, env, g_);
      if (v.no_terms()) throw UnsupportedQuantifierPattern("zero parameter");
      auto gamma = v_of(v);
      if (!in_cut(g, gamma, delta)) throw UnsupportedQuantifierPattern("parameter valuation outside G_(p,n)");
      classes.insert(coset_mod_p(g, gamma, c.p, delta.seg));
    }
    std::size_t want = 1;
    for (std::uint64_t i = 0; i < *e.value; ++i) want *= c.p;
    if (classes.size() != want) throw UnsupportedQuantifierPattern("parameters miss a coset of p*G_(p,n)");

    auto x = eval_term(c.u, env, g_);
    if (x.is_zero()) return c.kind == 1 ? is_top(delta) : true;
    if (x.no_terms()) undetermined("valuation of " + to_string(x));
    auto gamma = v_of(x);
    bool phi_x = !(elem_sign(g, gamma) < 0 && !in_cut(g, gamma, g_p(c.p)));
    if (c.kind == 1 && !phi_x) return true;
    if (c.kind == 2 && phi_x) return true;
    return in_cut(g, gamma, delta);
  }

  const Group& group() const { return g_; }

 private:
  static bool equal(const HahnSeries& a, const HahnSeries& b) {
    auto d = series_sub(a, b);
    if (d.is_zero()) return true;
    if (d.no_terms()) undetermined("equality");
    return false;
  }

  // Long division; a nonzero remainder after the step limit truncates the quotient.
  HahnSeries divide(const HahnSeries& a, const HahnSeries& b, int steps) {
    const auto& g = *g_;
    if (b.terms().size() == 1 && b.is_exact()) return series_mul(a, series_invert(b, v_of(b)));
    auto q = HahnSeries::zero(g_);
    auto r = a;
    const auto vb = v_of(b);
    const auto& lb = b.leading();
    for (int step = 0; step < steps; ++step) {
      if (r.is_zero()) return q;
      if (r.no_terms()) return series_add(q, HahnSeries::unknown_above(g_, elem_sub(g, *r.trunc(), vb)));
      const auto& lr = r.leading();
      auto m = HahnSeries::monomial(g_, lr.coeff / lb.coeff, elem_sub(g, lr.exponent, vb));
      q = series_add(q, m);
      r = series_sub(r, series_mul(m, b));
    }
    if (r.is_zero()) return q;
    auto bound = r.no_terms() ? *r.trunc() : v_of(r);
    return series_add(q, HahnSeries::unknown_above(g_, elem_sub(g, bound, vb)));
  }

  const ConvexCut& g_p(std::uint64_t p) {
    auto it = gp_.find(p);
    if (it == gp_.end()) it = gp_.emplace(p, max_p_divisible(*g_, p)).first;
    return it->second;
  }

  Group g_;
  std::map<std::uint64_t, ConvexCut> gp_;
};

// ---------------------------------------------------------------------------
// Sampled evaluation.
// ---------------------------------------------------------------------------

enum class Tri { False, True, Unknown };

Tri tri(bool b) { return b ? Tri::True : Tri::False; }

class Sampler {
 public:
  Sampler(Group g, const SampleBudget& budget)
      : decider_(g),
        g_(std::move(g)),
        budget_(budget),
        tag_(to_string(*g_) + "|" + std::to_string(budget.samples) + "|" + std::to_string(budget.seed)) {}

  Tri run(const FormulaPtr& f, const Assignment& env, int depth, Assignment* witness, bool quick = false) {
    switch (f->kind) {
      case K::True:
      case K::False:
      case K::Eq:
      case K::Neq:
        try {
          return tri(decider_.decide(f, env));
        } catch (const UnsupportedQuantifierPattern&) {
          return Tri::Unknown;
        }
      case K::And: {
        Tri out = Tri::True;
        for (const auto& a : f->args) {
          auto r = run(a, env, depth, nullptr);
          if (r == Tri::False) return r;
          if (r == Tri::Unknown) out = r;
        }
        return out;
      }
      case K::Or: {
        // Nested disjunctions of existentials first try the cheap witnesses
        // for every disjunct before any disjunct gets the larger grid.
        if (depth > 0 && !quick) {
          for (const auto& a : f->args) {
            if (run(a, env, depth, nullptr, true) == Tri::True) return Tri::True;
          }
        }
        Tri out = Tri::False;
        for (const auto& a : f->args) {
          auto r = run(a, env, depth, nullptr);
          if (r == Tri::True) return r;
          if (r == Tri::Unknown) out = r;
        }
        return out;
      }
      case K::Not: {
        auto r = run(f->args[0], env, depth, nullptr);
        return r == Tri::Unknown ? r : tri(r == Tri::False);
      }
      case K::Implies: {
        auto l = run(f->args[0], env, depth, nullptr);
        if (l == Tri::False) return Tri::True;
        auto r = run(f->args[1], env, depth, nullptr);
        if (r == Tri::True) return r;
        return l == Tri::True ? r : Tri::Unknown;
      }
      case K::Exists:
      case K::Forall:
        return quantifier(f, env, depth, witness, quick);
    }
    return Tri::Unknown;
  }

 private:
  Tri quantifier(const FormulaPtr& f, const Assignment& env, int depth, Assignment* witness, bool quick) {
    const bool exists = f->kind == K::Exists;
    // Root and fraction atoms always go to the exact oracles; the universal
    // clauses only once they are nested below a sampled quantifier.
    if (exists || depth > 0) {
      try {
        if (auto r = decider_.quantifier(f, env)) {
          if (exists && *r && witness) record_root_witness(f, env, witness);
          return tri(*r);
        }
      } catch (const UnsupportedQuantifierPattern&) {
        return Tri::Unknown;
      }
    }
    // A sampled quantifier depends only on its free variables, so results are
    // shared across calls (the falsifier revisits the same inner formulas).
    const auto& info = node_info(f);
    std::string key;
    if (!witness) {
      key = tag_ + "|" + std::to_string(reinterpret_cast<std::uintptr_t>(f.get())) + "|" + std::to_string(depth) +
            (quick ? "q" : "f");
      for (const auto& v : info.free) key += "|" + to_string(env.at(v));
      auto& cache = memo();
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto r = sample(f, info, env, depth, witness, quick);
    if (!witness) {
      auto& cache = memo();
      if (cache.size() > (1u << 18)) cache.clear();
      cache.emplace(std::move(key), r);
    }
    return r;
  }

  struct NodeInfo {
    FormulaPtr keep;
    std::vector<std::string> free;
    std::vector<HahnSeries> constants;
    std::set<std::uint64_t> powers;
  };

  static std::unordered_map<std::string, Tri>& memo() {
    thread_local std::unordered_map<std::string, Tri> cache;
    return cache;
  }

  // Held per node like recognize(), so the address stays valid as a key.
  static const NodeInfo& node_info(const FormulaPtr& f) {
    thread_local std::unordered_map<const Formula*, NodeInfo> cache;
    auto it = cache.find(f.get());
    if (it != cache.end()) return it->second;
    NodeInfo info;
    info.keep = f;
    auto fv = free_vars(f);
    info.free.assign(fv.begin(), fv.end());
    collect_constants(f, info);
    return cache.emplace(f.get(), std::move(info)).first->second;
  }

  Tri sample(const FormulaPtr& f, const NodeInfo& info, const Assignment& env, int depth, Assignment* witness,
             bool quick) {
    const bool exists = f->kind == K::Exists;
    auto cands = candidates(info, env, depth, quick && exists ? Pass::Quick : depth == 0 ? Pass::Full : Pass::Nested);
    bool unknown = false;
    for (const auto& c : cands) {
      auto local = env;
      local.insert_or_assign(f->var, c);
      auto r = run(f->args[0], local, depth + 1, nullptr);
      if (r == Tri::Unknown) {
        unknown = true;
        continue;
      }
      if (exists && r == Tri::True) {
        if (witness) *witness = {{f->var, c}};
        return Tri::True;
      }
      if (!exists && r == Tri::False) {
        if (witness) *witness = {{f->var, c}};
        return Tri::False;
      }
    }
    if (exists || unknown) return Tri::Unknown;
    return Tri::True;
  }

  void record_root_witness(const FormulaPtr& f, const Assignment& env, Assignment* witness) {
    auto r = match_root(f);
    if (!r) return;
    try {
      auto u = eval_term(r->u, env, g_);
      if (!root_exists(u, r->p, false)) u = series_neg(u);
      auto vu = v_of(u);
      auto cutoff = vu;
      if (u.terms().size() > 1) {
        auto gap = elem_sub(*g_, u.terms()[1].exponent, vu);
        cutoff = elem_add(*g_, vu, elem_scale(*g_, gap, 8));
      }
      *witness = {{f->var, pth_root(u, r->p, cutoff)}};
    } catch (const std::exception&) {
      // A root with an irrational leading coefficient has no exact witness to report.
    }
  }

  static void collect_constants(const FormulaPtr& f, NodeInfo& info) {
    auto term = [&](auto&& self, const TermPtr& t) -> void {
      if (!t) return;
      if (t->kind == TK::Pow && is_prime(t->exponent)) info.powers.insert(t->exponent);
      if (t->kind == TK::Const) {
        if (std::find(info.constants.begin(), info.constants.end(), *t->series) == info.constants.end()) {
          info.constants.push_back(*t->series);
        }
      }
      for (const auto& a : t->args) self(self, a);
    };
    term(term, f->lhs);
    term(term, f->rhs);
    for (const auto& a : f->args) collect_constants(a, info);
  }

  // Insertion-ordered list without repeats; a cheap hash avoids quadratic scans.
  struct CandidateList {
    std::vector<HahnSeries> items;
    std::unordered_multimap<std::size_t, std::size_t> index;
  };

  static std::size_t series_hash(const HahnSeries& s) {
    std::size_t h = s.terms().size() * 0x9e3779b97f4a7c15ull + (s.trunc() ? 1 : 0);
    auto mix = [&h](const Rational& q) {
      h ^= mpz_get_ui(q.get_num_mpz_t()) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h ^= mpz_get_ui(q.get_den_mpz_t()) + (static_cast<std::size_t>(mpz_sgn(q.get_num_mpz_t())) << 1) + (h << 6) + (h >> 2);
    };
    for (const auto& t : s.terms()) {
      mix(t.coeff);
      for (const auto& c : t.exponent.coords) mix(c);
    }
    return h;
  }

  void push(CandidateList& out, const HahnSeries& s) {
    auto h = series_hash(s);
    auto [lo, hi] = out.index.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      if (out.items[it->second] == s) return;
    }
    out.index.emplace(h, out.items.size());
    out.items.push_back(s);
  }

  // Skips coordinates that are not a group element (a half-integer in a Z coordinate).
  void push_monomial(CandidateList& out, const std::vector<Rational>& coords) {
    if (auto e = try_make_element(*g_, coords)) {
      push(out, HahnSeries::monomial(g_, 1, *e));
      push(out, HahnSeries::monomial(g_, -1, *e));
    }
  }

  // Quick: 0, +-1, the env values and constants, and p-th roots of their
  // valuations and of pairwise sums. Nested adds small monomials and a tenth
  // of the random budget; the outermost quantifier gets the full grid.
  enum class Pass { Quick, Nested, Full };

  std::vector<HahnSeries> candidates(const NodeInfo& info, const Assignment& env, int depth, Pass pass) {
    const auto& g = *g_;
    CandidateList out;
    push(out, HahnSeries::zero(g_));
    push(out, HahnSeries::constant(g_, 1));
    push(out, HahnSeries::constant(g_, -1));
    std::vector<HahnSeries> seeds;
    for (const auto& v : info.free) seeds.push_back(env.at(v));
    seeds.insert(seeds.end(), info.constants.begin(), info.constants.end());
    std::vector<GroupElement> exps;
    for (const auto& s : seeds) {
      push(out, s);
      push(out, series_neg(s));
      if (s.no_terms()) continue;
      auto v = v_of(s);
      if (std::find(exps.begin(), exps.end(), v) == exps.end()) exps.push_back(v);
    }
    for (std::size_t i = 0; i < exps.size(); ++i) {
      for (std::size_t k = i; k < exps.size(); ++k) {
        auto sum = i == k ? exps[i] : elem_add(g, exps[i], exps[k]);
        for (auto q : info.powers) {
          if (auto d = elem_divide(g, sum, q)) {
            push_monomial(out, d->coords);
            push_monomial(out, elem_neg(g, *d).coords);
          }
        }
      }
    }
    if (pass == Pass::Quick) return std::move(out.items);

    const std::size_t dims = g.total_arity();
    const Rational half(1, 2);
    const std::vector<Rational> full_multiples = {Rational(-1, 2), half, Rational(-1), Rational(1), Rational(-2), Rational(2)};
    const std::vector<Rational> nested_multiples = {Rational(-1), Rational(1)};
    for (const auto& e : exps) {
      for (const auto& m : pass == Pass::Full ? full_multiples : nested_multiples) {
        std::vector<Rational> base(dims);
        for (std::size_t j = 0; j < dims; ++j) base[j] = m * e.coords[j];
        push_monomial(out, base);
        if (pass != Pass::Full) continue;
        for (std::size_t j = 0; j < dims; ++j) {
          for (Rational d : {half, Rational(1), Rational(-1, 2), Rational(-1)}) {
            auto c = base;
            c[j] += d;
            push_monomial(out, c);
          }
        }
      }
    }
    for (std::size_t j = 0; j < dims; ++j) {
      for (Rational d : {half, Rational(1)}) {
        std::vector<Rational> c(dims);
        c[j] = d;
        if (auto e = try_make_element(g, c)) {
          auto t = HahnSeries::monomial(g_, 1, *e);
          push(out, series_add(HahnSeries::constant(g_, 1), t));
          push(out, t);
          push(out, series_neg(t));
        }
      }
    }
    const auto& random = random_samples(depth, pass == Pass::Full ? budget_.samples : std::max<std::size_t>(budget_.samples / 10, 5));
    out.items.insert(out.items.end(), random.begin(), random.end());
    return std::move(out.items);
  }

  const std::vector<HahnSeries>& random_samples(int depth, std::size_t n) {
    thread_local std::unordered_map<std::string, std::vector<HahnSeries>> cache;
    auto key = tag_ + "|" + std::to_string(depth) + "|" + std::to_string(n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (cache.size() > 64) cache.clear();
    std::vector<HahnSeries> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(sample_series(g_, budget_.seed + 7919 * depth + i));
    return cache.emplace(std::move(key), std::move(out)).first->second;
  }

  Decider decider_;
  Group g_;
  SampleBudget budget_;
  std::string tag_;
};

}  // namespace

HahnSeries eval_term(const TermPtr& t, const Assignment& env, const Group& g) {
  switch (t->kind) {
    case TK::Int:
      return HahnSeries::constant(g, Rational(t->value));
    case TK::Var: {
      auto it = env.find(t->name);
      if (it == env.end()) throw std::invalid_argument("unassigned variable " + t->name);
      return it->second;
    }
    case TK::Const:
      if (*t->series->group() != *g) throw std::invalid_argument("constant over a different group");
      return *t->series;
    case TK::Add:
      return series_add(eval_term(t->args[0], env, g), eval_term(t->args[1], env, g));
    case TK::Sub:
      return series_sub(eval_term(t->args[0], env, g), eval_term(t->args[1], env, g));
    case TK::Mul:
      return series_mul(eval_term(t->args[0], env, g), eval_term(t->args[1], env, g));
    case TK::Neg:
      return series_neg(eval_term(t->args[0], env, g));
    case TK::Pow:
      return series_pow(eval_term(t->args[0], env, g), t->exponent);
    case TK::Div: {
      auto den = eval_term(t->args[1], env, g);
      if (den.terms().size() != 1 || !den.is_exact()) {
        throw UnsupportedQuantifierPattern("division by a non-monomial outside a fraction atom");
      }
      return series_mul(eval_term(t->args[0], env, g), series_invert(den, v_of(den)));
    }
  }
  throw std::logic_error("bad term");
}

bool eval_decidable(const FormulaPtr& f, const Assignment& env, const Group& g) {
  return Decider(g).decide(f, env);
}

std::string to_string(EvalOutcome::Kind k) {
  switch (k) {
    case EvalOutcome::Kind::True:
      return "True";
    case EvalOutcome::Kind::False:
      return "False";
    case EvalOutcome::Kind::FalsifiedBy:
      return "FalsifiedBy";
    case EvalOutcome::Kind::UnknownOnSample:
      return "UnknownOnSample";
  }
  return "?";
}

EvalOutcome eval_sampled(const FormulaPtr& f, const Assignment& env, const Group& g, const SampleBudget& budget) {
  Sampler s(g, budget);
  Assignment witness;
  auto r = s.run(f, env, 0, &witness);
  EvalOutcome out;
  switch (r) {
    case Tri::True:
      out.kind = EvalOutcome::Kind::True;
      if (f->kind == K::Exists) out.witness = std::move(witness);
      break;
    case Tri::False:
      out.kind = f->kind == K::Forall ? EvalOutcome::Kind::FalsifiedBy : EvalOutcome::Kind::False;
      if (f->kind == K::Forall) out.witness = std::move(witness);
      break;
    case Tri::Unknown:
      out.kind = EvalOutcome::Kind::UnknownOnSample;
      break;
  }
  return out;
}

}  // namespace arclab
