#pragma once

// Internal: per-axis complex exponential tables for plane-wave sums over a
// regular grid. Not installed.

#include <complex>
#include <numbers>
#include <vector>

#include "efl/lattice.hpp"

namespace efl::modes::detail {

/// Tables of e^{i * sign * (2*pi*n/L) * x} for every grid coordinate x of each
/// axis and every n in [-n_max, n_max]; a mode's phase at a point is the
/// product of three lookups.
struct PhaseTables {
  int width;  // 2*n_max + 1
  std::vector<Complex> tx, ty, tz;

  PhaseTables(const ModeLattice& lat, const GridSpec& grid, double sign) {
    const int n_max = lat.cutoff();
    width = 2 * n_max + 1;
    const double step = sign * 2.0 * std::numbers::pi / lat.box_edge();
    auto fill = [&](std::vector<Complex>& t, int extent, double x0, double h) {
      t.resize(static_cast<std::size_t>(extent) * width);
      for (int i = 0; i < extent; ++i) {
        const double x = x0 + h * i;
        for (int n = -n_max; n <= n_max; ++n)
          t[static_cast<std::size_t>(i) * width + (n + n_max)] =
              std::polar(1.0, step * n * x);
      }
    };
    fill(tx, grid.extents[0], grid.origin.x, grid.spacing.x);
    fill(ty, grid.extents[1], grid.origin.y, grid.spacing.y);
    fill(tz, grid.extents[2], grid.origin.z, grid.spacing.z);
  }

  const Complex* row_x(std::size_t i) const { return tx.data() + i * width; }
  const Complex* row_y(std::size_t j) const { return ty.data() + j * width; }
  const Complex* row_z(std::size_t k) const { return tz.data() + k * width; }
};

}  // namespace efl::modes::detail
