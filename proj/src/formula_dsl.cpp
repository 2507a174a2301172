#include <cctype>

#include "arclab/errors.hpp"
#include "arclab/logic.hpp"
#include "arclab/text_cursor.hpp"

namespace arclab {

namespace {

const std::set<std::string> kKeywords = {"exists", "forall", "and", "or", "not", "true", "false"};

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const FormulaParseOptions& options) : text_(text), in_(text), opt_(options) {}

  FormulaPtr run() {
    auto f = implication();
    if (!in_.at_end()) in_.fail("trailing input");
    if (opt_.parameters) {
      std::set<std::string> allowed(opt_.parameters->begin(), opt_.parameters->end());
      for (const auto& v : free_vars(f)) {
        if (!allowed.count(v)) throw ParseError("unbound variable " + v, 0);
      }
    }
    return f;
  }

 private:
  FormulaPtr implication() {
    auto lhs = disjunction();
    if (in_.accept("->")) return f_implies(lhs, implication());
    return lhs;
  }

  FormulaPtr disjunction() {
    std::vector<FormulaPtr> parts{conjunction()};
    while (in_.accept_word("or")) parts.push_back(conjunction());
    return f_or(std::move(parts));
  }

  FormulaPtr conjunction() {
    std::vector<FormulaPtr> parts{unary()};
    while (in_.accept_word("and")) parts.push_back(unary());
    return f_and(std::move(parts));
  }

  FormulaPtr unary() {
    if (in_.accept_word("not")) return f_not(unary());
    for (auto [word, exists] : {std::pair{"exists", true}, std::pair{"forall", false}}) {
      if (in_.accept_word(word)) {
        auto v = variable();
        in_.expect(".");
        auto body = implication();
        return exists ? f_exists(v, body) : f_forall(v, body);
      }
    }
    return primary();
  }

  FormulaPtr primary() {
    if (in_.accept_word("true")) return f_true();
    if (in_.accept_word("false")) return f_false();
    in_.skip_ws();
    std::size_t start = in_.position();
    if (in_.accept("(")) {
      // Either a parenthesized formula or the start of a term.
      try {
        auto f = implication();
        in_.expect(")");
        in_.skip_ws();
        char c = in_.peek();
        bool term_follows = c == '=' || (c == '!' && !in_.at_end()) || c == '+' || c == '*' || c == '/' || c == '^' ||
                            (c == '-' && !lookahead("->"));
        if (!term_follows) return f;
      } catch (const ParseError&) {
      }
      in_.reset(start);
    }
    for (auto [name, kind] : {std::pair{"psi_p", 0}, std::pair{"phi_pn", 2}, std::pair{"phi_p", 1}}) {
      if (lookahead_word(name)) {
        in_.accept(name);
        return macro(kind);
      }
    }
    return atom();
  }

  FormulaPtr macro(int kind) {
    in_.expect("[");
    std::uint64_t p = prime();
    std::uint64_t n = 0;
    if (kind == 2) {
      in_.expect(",");
      n = in_.natural();
    }
    in_.expect("]");
    in_.expect("(");
    auto arg = term();
    FormulaPtr tmpl;
    if (kind == 0) {
      tmpl = build_psi_p(p);
    } else if (kind == 1) {
      tmpl = build_phi_p(p);
    } else {
      std::vector<HahnSeries> params;
      in_.expect(",");
      in_.expect("params");
      in_.expect("=");
      do {
        params.push_back(series_literal());
      } while (in_.accept(","));
      std::size_t want = 1;
      for (std::uint64_t i = 0; i < n; ++i) want *= p;
      if (params.size() != want) in_.fail("phi_pn expects " + std::to_string(want) + " params");
      tmpl = build_phi_pn(p, n, params);
    }
    in_.expect(")");
    return instantiate(tmpl, arg);
  }

  std::uint64_t prime() {
    std::size_t at = in_.position();
    auto p = in_.natural();
    if (!is_prime(p)) {
      in_.reset(at);
      in_.fail(std::to_string(p) + " is not prime");
    }
    return p;
  }

  // Desugars divisions inside the argument as it is plugged into the template.
  FormulaPtr instantiate(const FormulaPtr& tmpl, const TermPtr& arg) {
    if (arg->kind == Term::Kind::Div) {
      auto num = arg->args[0], den = arg->args[1];
      if (contains_div(num) || contains_div(den)) return desugar_inner(tmpl, arg);
      return apply_fraction(tmpl, num, den);
    }
    if (contains_div(arg)) return desugar_inner(tmpl, arg);
    return substitute(tmpl, "x", arg);
  }

  FormulaPtr desugar_inner(const FormulaPtr& tmpl, const TermPtr& arg) {
    // Name the first division by a fresh variable and recurse on the rest.
    TermPtr div = first_div(arg);
    std::set<std::string> avoid = free_vars(arg);
    for (const auto& v : free_vars(tmpl)) avoid.insert(v);
    std::string w = "w";
    for (unsigned k = 1; avoid.count(w); ++k) w = "w" + std::to_string(k);
    auto rest = replace(arg, div, t_var(w));
    auto inner = instantiate(tmpl, rest);
    auto outer = f_exists(w, f_and({f_eq(t_mul(t_var(w), div->args[1]), div->args[0]),
                                    f_neq(div->args[1], t_int(0)), inner}));
    return desugar_atoms(outer);
  }

  static bool contains_div(const TermPtr& t) {
    if (t->kind == Term::Kind::Div) return true;
    for (const auto& a : t->args) {
      if (contains_div(a)) return true;
    }
    return false;
  }

  static TermPtr first_div(const TermPtr& t) {
    // Innermost-first so that the named quotient has division-free operands.
    for (const auto& a : t->args) {
      if (auto d = first_div(a)) return d;
    }
    return t->kind == Term::Kind::Div ? t : nullptr;
  }

  static TermPtr replace(const TermPtr& t, const TermPtr& target, const TermPtr& with) {
    if (t == target) return with;
    if (t->args.empty()) return t;
    Term copy = *t;
    for (auto& a : copy.args) a = replace(a, target, with);
    return std::make_shared<const Term>(std::move(copy));
  }

  // Atoms whose terms still contain a division get their own existential.
  FormulaPtr desugar_atoms(const FormulaPtr& f) {
    if (f->kind == Formula::Kind::Eq || f->kind == Formula::Kind::Neq) {
      TermPtr div = first_div(f->lhs);
      if (!div) div = first_div(f->rhs);
      if (!div) return f;
      auto avoid = free_vars(f);
      std::string w = "w";
      for (unsigned k = 1; avoid.count(w); ++k) w = "w" + std::to_string(k);
      auto atom = f->kind == Formula::Kind::Eq ? f_eq(replace(f->lhs, div, t_var(w)), replace(f->rhs, div, t_var(w)))
                                               : f_neq(replace(f->lhs, div, t_var(w)), replace(f->rhs, div, t_var(w)));
      return f_exists(w, f_and({f_eq(t_mul(t_var(w), div->args[1]), div->args[0]), f_neq(div->args[1], t_int(0)),
                                desugar_atoms(atom)}));
    }
    if (f->args.empty()) return f;
    Formula copy = *f;
    for (auto& a : copy.args) a = desugar_atoms(a);
    return std::make_shared<const Formula>(std::move(copy));
  }

  FormulaPtr atom() {
    auto lhs = term();
    FormulaPtr f;
    if (in_.accept("!=")) {
      f = f_neq(lhs, term());
    } else if (in_.accept("=")) {
      f = f_eq(lhs, term());
    } else {
      in_.fail("expected = or !=");
    }
    return desugar_atoms(f);
  }

  TermPtr term() {
    auto t = product();
    while (true) {
      if (lookahead("->")) return t;
      if (in_.accept("+")) {
        t = t_add(t, product());
      } else if (in_.accept("-")) {
        t = t_sub(t, product());
      } else {
        return t;
      }
    }
  }

  TermPtr product() {
    auto t = negation();
    while (true) {
      if (in_.accept("*")) {
        t = t_mul(t, negation());
      } else if (in_.accept("/")) {
        t = t_div(t, negation());
      } else {
        return t;
      }
    }
  }

  TermPtr negation() {
    if (!lookahead("->") && in_.accept("-")) return t_neg(negation());
    auto base = term_atom();
    if (in_.accept("^")) {
      auto n = in_.natural();
      return t_pow(base, static_cast<unsigned>(n));
    }
    return base;
  }

  TermPtr term_atom() {
    if (in_.peek_digit()) {
      std::size_t at = in_.position();
      Term t;
      t.kind = Term::Kind::Int;
      t.value = Integer(std::to_string(in_.natural()));
      (void)at;
      return std::make_shared<const Term>(std::move(t));
    }
    if (in_.peek() == '[') return t_const(series_literal());
    if (in_.accept("(")) {
      auto t = term();
      in_.expect(")");
      return t;
    }
    return t_var(variable());
  }

  HahnSeries series_literal() {
    in_.skip_ws();
    std::size_t start = in_.position();
    in_.expect("[");
    if (!opt_.group) in_.fail("series constant needs a value group");
    auto close = text_.find(']', start);
    if (close == std::string_view::npos) in_.fail("unterminated series constant");
    try {
      auto s = parse_series(opt_.group, text_.substr(start + 1, close - start - 1));
      in_.reset(close + 1);
      return s;
    } catch (const ParseError& e) {
      throw ParseError(e.what(), start + 1 + e.position());
    }
  }

  std::string variable() {
    in_.skip_ws();
    std::size_t at = in_.position();
    auto name = in_.identifier();
    if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0])) || kKeywords.count(name)) {
      in_.reset(at);
      in_.fail("expected variable");
    }
    return name;
  }

  bool lookahead(std::string_view token) {
    in_.skip_ws();
    return text_.substr(in_.position()).starts_with(token);
  }

  bool lookahead_word(std::string_view word) {
    in_.skip_ws();
    auto rest = text_.substr(in_.position());
    if (!rest.starts_with(word)) return false;
    return rest.size() > word.size() && rest[word.size()] == '[';
  }

  std::string_view text_;
  TextCursor in_;
  const FormulaParseOptions& opt_;
};

}  // namespace

FormulaPtr parse_formula(std::string_view text, const FormulaParseOptions& options) {
  return FormulaParser(text, options).run();
}

}  // namespace arclab
