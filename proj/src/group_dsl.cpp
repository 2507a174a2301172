#include "arclab/group_dsl.hpp"

#include "arclab/text_cursor.hpp"

namespace arclab {

namespace {

RealGenerator parse_generator(TextCursor& in) {
  if (in.accept_word("pi")) return RealGenerator::pi();
  return RealGenerator::rational(in.rational());
}

std::uint64_t parse_prime(TextCursor& in) {
  std::size_t at = in.position();
  std::uint64_t q = in.natural();
  if (!is_prime(q)) {
    in.reset(at);
    in.fail(std::to_string(q) + " is not prime");
  }
  return q;
}

ComponentKind parse_component(TextCursor& in) {
  in.skip_ws();
  std::size_t at = in.position();
  if (in.accept_word("Z")) return Zed{};
  if (in.accept_word("Q")) return Rat{};
  if (in.accept("Zloc(")) {
    auto q = parse_prime(in);
    in.expect(")");
    return LocZ{q};
  }
  if (in.accept("real(")) {
    FreeReal f;
    if (in.peek() == ')') in.fail("real() needs at least one generator");
    do {
      f.gens.push_back(parse_generator(in));
    } while (in.accept(","));
    in.expect(")");
    return f;
  }
  if (in.accept("omega_tower(")) {
    in.expect("start");
    in.expect("=");
    auto start = in.natural();
    in.expect(")");
    return OmegaTower{start};
  }
  if (in.accept("poly_module(")) {
    in.expect("Zloc(");
    auto q = parse_prime(in);
    in.expect(")");
    in.expect(",");
    auto gen = parse_generator(in);
    in.expect(")");
    return PolyModule{q, gen};
  }
  in.reset(at);
  in.fail("unknown component kind");
}

}  // namespace

LexWord parse_group(std::string_view text) {
  TextCursor in(text);
  in.expect("lex(");
  std::vector<ComponentKind> components;
  do {
    components.push_back(parse_component(in));
  } while (in.accept(","));
  in.expect(")");
  if (!in.at_end()) in.fail("trailing input");
  try {
    return LexWord(std::move(components));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

GroupElement parse_element(const LexWord& g, std::string_view text) {
  TextCursor in(text);
  in.expect("(");
  std::vector<Rational> coords;
  if (in.peek() != ')') {
    do {
      coords.push_back(in.rational());
    } while (in.accept(","));
  }
  in.expect(")");
  if (!in.at_end()) in.fail("trailing input");
  if (coords.size() != g.total_arity()) {
    throw ParseError("expected " + std::to_string(g.total_arity()) + " coordinates", 0);
  }
  try {
    return make_element(g, std::move(coords));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace arclab
