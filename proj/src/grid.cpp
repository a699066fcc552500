#include "ve2d/grid.hpp"

#include <cmath>
#include <string>

#include "ve2d/error.hpp"

namespace ve2d {

Grid::Grid(int n, double box_len) : n_(n), box_len_(box_len) {
  if (n < 8 || (n & (n - 1)) != 0) {
    throw InvalidArgument("grid size must be a power of two, at least 8, got " + std::to_string(n));
  }
  if (!(box_len > 0.0) || !std::isfinite(box_len)) {
    throw InvalidArgument("box length must be positive and finite");
  }
}

}  // namespace ve2d
