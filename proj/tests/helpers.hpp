#pragma once

// Shared fixtures for the unit suites: the four standard degrees that the
// frozen oracle values below refer to.
//
//   conic          {(2,2), (-2,0), (0,-2)}            dual triangle of size 2
//   quartic        {(4,4), (-4,0), (0,-4)}            dual triangle of size 4
//   quartic_mixed  {(2,2), (2,2), (-4,0), (0,-4)}     same triangle, split hypotenuse
//   square         {(2,0), (0,2), (-2,0), (0,-2)}     unit square scaled by 2

#include <vector>

#include "lattice.hpp"

namespace refinv::fixtures {

inline std::vector<IVec> conic_raw() { return {{2, 2}, {-2, 0}, {0, -2}}; }
inline std::vector<IVec> quartic_raw() { return {{4, 4}, {-4, 0}, {0, -4}}; }
inline std::vector<IVec> quartic_mixed_raw() {
  return {{2, 2}, {2, 2}, {-4, 0}, {0, -4}};
}
inline std::vector<IVec> square_raw() {
  return {{2, 0}, {0, 2}, {-2, 0}, {0, -2}};
}

}  // namespace refinv::fixtures
