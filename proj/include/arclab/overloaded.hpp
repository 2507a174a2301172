#pragma once

namespace arclab {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace arclab
