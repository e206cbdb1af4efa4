#include "rotbound/grid.hpp"

#include <cmath>
#include <string>

#include "rotbound/errors.hpp"

namespace rotbound {

Grid make_grid(int n, double extent) {
  if (n < 16 || n % 2 != 0) {
    throw InvalidArgument("grid size must be even and at least 16, got " + std::to_string(n));
  }
  if (!(extent > 0.0) || !std::isfinite(extent)) {
    throw InvalidArgument("grid extent must be positive");
  }
  return Grid{n, extent};
}

}  // namespace rotbound
