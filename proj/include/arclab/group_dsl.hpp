#pragma once

#include <string_view>

#include "arclab/oag.hpp"

namespace arclab {

/// Parses `lex(comp, ...)`; see README for the grammar. Throws ParseError.
LexWord parse_group(std::string_view text);

/// Parses an exponent tuple "(e1,e2,...)" shaped for `g`.
GroupElement parse_element(const LexWord& g, std::string_view text);

}  // namespace arclab
