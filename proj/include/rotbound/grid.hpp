#pragma once

#include <cstddef>

namespace rotbound {

/// Square cell-centred grid on [-extent, extent]^2 with n points per axis.
/// Sample i sits at -extent + (i + 1/2) * spacing, so no node hits r = 0.
struct Grid {
  int n = 0;
  double extent = 0.0;

  double spacing() const noexcept { return 2.0 * extent / n; }
  double coord(int i) const noexcept { return -extent + (i + 0.5) * spacing(); }
  double cell_area() const noexcept { return spacing() * spacing(); }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
  // Row-major: the first coordinate x1 is the slow index.
  std::size_t index(int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i1) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(i2);
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Throws InvalidArgument for odd n, n < 16 or non-positive extent.
Grid make_grid(int n, double extent);

}  // namespace rotbound
