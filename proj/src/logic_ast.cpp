#include <functional>
#include <sstream>
#include <stdexcept>

#include "arclab/logic.hpp"

namespace arclab {

namespace {

TermPtr make_term(Term t) { return std::make_shared<const Term>(std::move(t)); }
FormulaPtr make_formula(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

bool same_terms(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(*a[i] == *b[i])) return false;
  }
  return true;
}

}  // namespace

bool Term::operator==(const Term& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Int: return value == o.value;
    case Kind::Var: return name == o.name;
    case Kind::Const: return *series == *o.series;
    case Kind::Pow: return exponent == o.exponent && same_terms(args, o.args);
    default: return same_terms(args, o.args);
  }
}

bool Formula::operator==(const Formula& o) const {
  if (kind != o.kind || var != o.var || args.size() != o.args.size()) return false;
  if (lhs && !(*lhs == *o.lhs)) return false;
  if (rhs && !(*rhs == *o.rhs)) return false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!(*args[i] == *o.args[i])) return false;
  }
  return true;
}

TermPtr t_int(long v) {
  Term t;
  t.kind = Term::Kind::Int;
  t.value = v;
  return make_term(std::move(t));
}

TermPtr t_var(std::string name) {
  Term t;
  t.kind = Term::Kind::Var;
  t.name = std::move(name);
  return make_term(std::move(t));
}

TermPtr t_const(HahnSeries s) {
  Term t;
  t.kind = Term::Kind::Const;
  t.series = std::make_shared<const HahnSeries>(std::move(s));
  return make_term(std::move(t));
}

namespace {

TermPtr node(Term::Kind k, std::vector<TermPtr> args) {
  Term t;
  t.kind = k;
  t.args = std::move(args);
  return make_term(std::move(t));
}

}  // namespace

TermPtr t_add(TermPtr a, TermPtr b) { return node(Term::Kind::Add, {std::move(a), std::move(b)}); }
TermPtr t_sub(TermPtr a, TermPtr b) { return node(Term::Kind::Sub, {std::move(a), std::move(b)}); }
TermPtr t_mul(TermPtr a, TermPtr b) { return node(Term::Kind::Mul, {std::move(a), std::move(b)}); }
TermPtr t_neg(TermPtr a) { return node(Term::Kind::Neg, {std::move(a)}); }
TermPtr t_div(TermPtr a, TermPtr b) { return node(Term::Kind::Div, {std::move(a), std::move(b)}); }

TermPtr t_pow(TermPtr a, unsigned n) {
  Term t;
  t.kind = Term::Kind::Pow;
  t.args = {std::move(a)};
  t.exponent = n;
  return make_term(std::move(t));
}

FormulaPtr f_true() { return make_formula({Formula::Kind::True, {}, {}, {}, {}}); }
FormulaPtr f_false() { return make_formula({Formula::Kind::False, {}, {}, {}, {}}); }
FormulaPtr f_eq(TermPtr a, TermPtr b) { return make_formula({Formula::Kind::Eq, std::move(a), std::move(b), {}, {}}); }
FormulaPtr f_neq(TermPtr a, TermPtr b) {
  return make_formula({Formula::Kind::Neq, std::move(a), std::move(b), {}, {}});
}

FormulaPtr f_and(std::vector<FormulaPtr> args) {
  if (args.empty()) return f_true();
  if (args.size() == 1) return args.front();
  return make_formula({Formula::Kind::And, {}, {}, std::move(args), {}});
}

FormulaPtr f_or(std::vector<FormulaPtr> args) {
  if (args.empty()) return f_false();
  if (args.size() == 1) return args.front();
  return make_formula({Formula::Kind::Or, {}, {}, std::move(args), {}});
}

FormulaPtr f_not(FormulaPtr a) { return make_formula({Formula::Kind::Not, {}, {}, {std::move(a)}, {}}); }
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return make_formula({Formula::Kind::Implies, {}, {}, {std::move(a), std::move(b)}, {}});
}
FormulaPtr f_exists(std::string var, FormulaPtr body) {
  return make_formula({Formula::Kind::Exists, {}, {}, {std::move(body)}, std::move(var)});
}
FormulaPtr f_forall(std::string var, FormulaPtr body) {
  return make_formula({Formula::Kind::Forall, {}, {}, {std::move(body)}, std::move(var)});
}

namespace {

bool is_quantifier(const Formula& f) { return f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall; }

void collect(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == Term::Kind::Var) out.insert(t->name);
  for (const auto& a : t->args) collect(a, out);
}

void collect_free(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->lhs) collect(f->lhs, out);
  if (f->rhs) collect(f->rhs, out);
  if (is_quantifier(*f)) {
    std::set<std::string> inner;
    collect_free(f->args[0], inner);
    inner.erase(f->var);
    out.insert(inner.begin(), inner.end());
    return;
  }
  for (const auto& a : f->args) collect_free(a, out);
}

void collect_names(const FormulaPtr& f, std::set<std::string>& out) {
  if (f->lhs) collect(f->lhs, out);
  if (f->rhs) collect(f->rhs, out);
  if (!f->var.empty()) out.insert(f->var);
  for (const auto& a : f->args) collect_names(a, out);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (unsigned k = 1;; ++k) {
    auto candidate = base + std::to_string(k);
    if (!avoid.count(candidate)) return candidate;
  }
}

TermPtr subst_term(const TermPtr& t, const std::string& var, const TermPtr& r) {
  if (t->kind == Term::Kind::Var) return t->name == var ? r : t;
  if (t->args.empty()) return t;
  Term copy = *t;
  bool changed = false;
  for (auto& a : copy.args) {
    auto b = subst_term(a, var, r);
    changed = changed || b != a;
    a = std::move(b);
  }
  return changed ? make_term(std::move(copy)) : t;
}

}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> out;
  collect(t, out);
  return out;
}

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_free(f, out);
  return out;
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const TermPtr& r) {
  if (is_quantifier(*f)) {
    if (f->var == var) return f;
    auto body = f->args[0];
    if (!free_vars(body).count(var)) return f;
    auto rfree = free_vars(r);
    std::string bound = f->var;
    if (rfree.count(bound)) {
      std::set<std::string> avoid = rfree;
      collect_names(body, avoid);
      avoid.insert(var);
      std::string base = bound;
      while (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) base.pop_back();
      if (base.empty()) base = bound;
      auto renamed = fresh_name(base, avoid);
      body = substitute(body, bound, t_var(renamed));
      bound = renamed;
    }
    body = substitute(body, var, r);
    return f->kind == Formula::Kind::Exists ? f_exists(bound, body) : f_forall(bound, body);
  }
  Formula copy = *f;
  if (copy.lhs) copy.lhs = subst_term(copy.lhs, var, r);
  if (copy.rhs) copy.rhs = subst_term(copy.rhs, var, r);
  for (auto& a : copy.args) a = substitute(a, var, r);
  return make_formula(std::move(copy));
}

FormulaPtr apply_fraction(const FormulaPtr& tmpl, const TermPtr& num, const TermPtr& den, const std::string& var) {
  std::set<std::string> avoid;
  collect(num, avoid);
  collect(den, avoid);
  collect_names(tmpl, avoid);
  auto w = fresh_name("w", avoid);
  auto body = substitute(tmpl, var, t_var(w));
  return f_exists(w, f_and({f_eq(t_mul(t_var(w), den), num), f_neq(den, t_int(0)), body}));
}

namespace {

bool alpha_term(const TermPtr& a, const TermPtr& b, const std::map<std::string, int>& ma,
                const std::map<std::string, int>& mb) {
  if (a->kind != b->kind) return false;
  if (a->kind == Term::Kind::Var) {
    auto ia = ma.find(a->name), ib = mb.find(b->name);
    if ((ia == ma.end()) != (ib == mb.end())) return false;
    return ia == ma.end() ? a->name == b->name : ia->second == ib->second;
  }
  if (a->kind == Term::Kind::Int) return a->value == b->value;
  if (a->kind == Term::Kind::Const) return *a->series == *b->series;
  if (a->kind == Term::Kind::Pow && a->exponent != b->exponent) return false;
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!alpha_term(a->args[i], b->args[i], ma, mb)) return false;
  }
  return true;
}

bool alpha_formula(const FormulaPtr& a, const FormulaPtr& b, std::map<std::string, int> ma,
                   std::map<std::string, int> mb, int depth) {
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  if (a->lhs && !alpha_term(a->lhs, b->lhs, ma, mb)) return false;
  if (a->rhs && !alpha_term(a->rhs, b->rhs, ma, mb)) return false;
  if (is_quantifier(*a)) {
    ma[a->var] = depth;
    mb[b->var] = depth;
    return alpha_formula(a->args[0], b->args[0], std::move(ma), std::move(mb), depth + 1);
  }
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!alpha_formula(a->args[i], b->args[i], ma, mb, depth)) return false;
  }
  return true;
}

// Precedence levels: sums 1, products 2, unary minus 3, powers 4, atoms 5.
int term_level(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Add:
    case Term::Kind::Sub: return 1;
    case Term::Kind::Mul:
    case Term::Kind::Div: return 2;
    case Term::Kind::Neg: return 3;
    case Term::Kind::Pow: return 4;
    default: return 5;
  }
}

void print_term(std::ostream& os, const TermPtr& t, int required) {
  bool parens = term_level(*t) < required;
  if (parens) os << '(';
  switch (t->kind) {
    case Term::Kind::Int: os << t->value.get_str(); break;
    case Term::Kind::Var: os << t->name; break;
    case Term::Kind::Const: os << '[' << to_string(*t->series) << ']'; break;
    case Term::Kind::Add:
      print_term(os, t->args[0], 1);
      os << " + ";
      print_term(os, t->args[1], 2);
      break;
    case Term::Kind::Sub:
      print_term(os, t->args[0], 1);
      os << " - ";
      print_term(os, t->args[1], 2);
      break;
    case Term::Kind::Mul:
    case Term::Kind::Div:
      print_term(os, t->args[0], 2);
      os << (t->kind == Term::Kind::Mul ? "*" : "/");
      print_term(os, t->args[1], 3);
      break;
    case Term::Kind::Neg:
      os << '-';
      print_term(os, t->args[0], 3);
      break;
    case Term::Kind::Pow:
      print_term(os, t->args[0], 5);
      os << '^' << t->exponent;
      break;
  }
  if (parens) os << ')';
}

// Formula levels: quantifiers 0, implication 1, or 2, and 3, not 4, atoms 5.
int formula_level(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: return 0;
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    case Formula::Kind::Not: return 4;
    default: return 5;
  }
}

void print_formula(std::ostream& os, const FormulaPtr& f, int required) {
  bool parens = formula_level(*f) < required;
  if (parens) os << '(';
  switch (f->kind) {
    case Formula::Kind::True: os << "true"; break;
    case Formula::Kind::False: os << "false"; break;
    case Formula::Kind::Eq:
    case Formula::Kind::Neq:
      print_term(os, f->lhs, 1);
      os << (f->kind == Formula::Kind::Eq ? " = " : " != ");
      print_term(os, f->rhs, 1);
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) os << (f->kind == Formula::Kind::And ? " and " : " or ");
        print_formula(os, f->args[i], f->kind == Formula::Kind::And ? 4 : 3);
      }
      break;
    case Formula::Kind::Not:
      os << "not ";
      print_formula(os, f->args[0], 4);
      break;
    case Formula::Kind::Implies:
      print_formula(os, f->args[0], 2);
      os << " -> ";
      print_formula(os, f->args[1], 1);
      break;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      os << (f->kind == Formula::Kind::Exists ? "exists " : "forall ") << f->var << ". ";
      print_formula(os, f->args[0], 0);
      break;
  }
  if (parens) os << ')';
}

}  // namespace

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) { return alpha_formula(a, b, {}, {}, 0); }

std::string to_string(const TermPtr& t) {
  std::ostringstream os;
  print_term(os, t, 0);
  return os.str();
}

std::string to_string(const FormulaPtr& f) {
  std::ostringstream os;
  print_formula(os, f, 0);
  return os.str();
}

std::vector<FormulaPtr> universal_clauses(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    if (g->kind == Formula::Kind::Forall) {
      out.push_back(g);
      return;
    }
    if (g->kind == Formula::Kind::Exists) return;
    for (const auto& a : g->args) walk(a);
  };
  walk(f);
  return out;
}

}  // namespace arclab
