#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arclab {

/// Syntax error in one of the textual DSLs, with a 0-based byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Element arithmetic requested on a schematic (analysis-only) group.
class NonEffectiveGroup : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quantified shape outside the supported decision patterns.
class UnsupportedQuantifierPattern : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arclab
