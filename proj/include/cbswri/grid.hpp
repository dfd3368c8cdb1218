#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbswri {

/// Uniform 2D grid with an absorbing pad of `pad` cells on all four edges.
/// The padded dimensions (nx + 2 pad, nz + 2 pad) are the transform
/// dimensions; all wavefields live on the padded grid, models on the
/// interior.
struct Grid2D {
  int nx = 0;       ///< interior samples along x
  int nz = 0;       ///< interior samples along z
  double dx = 0.0;  ///< grid spacing [m], identical in both directions
  int pad = 0;      ///< pad width [cells] on each edge

  Grid2D() = default;
  Grid2D(int nx_, int nz_, double dx_, int pad_)
      : nx(nx_), nz(nz_), dx(dx_), pad(pad_) {
    if (nx < 4 || nz < 4)
      throw std::invalid_argument("Grid2D: nx and nz must be >= 4");
    if (!(dx > 0.0) || !std::isfinite(dx))
      throw std::invalid_argument("Grid2D: dx must be positive and finite");
    if (pad < 0) throw std::invalid_argument("Grid2D: pad must be >= 0");
  }

  int nxp() const { return nx + 2 * pad; }
  int nzp() const { return nz + 2 * pad; }
  std::size_t interior_count() const {
    return static_cast<std::size_t>(nx) * nz;
  }
  std::size_t padded_count() const {
    return static_cast<std::size_t>(nxp()) * nzp();
  }

  /// Row-major (x fastest) linear index on the padded grid.
  std::size_t padded_index(int ixp, int izp) const {
    return static_cast<std::size_t>(izp) * nxp() + ixp;
  }
  /// Linear padded index of an interior node (ix, iz).
  std::size_t padded_index_of_interior(int ix, int iz) const {
    return padded_index(ix + pad, iz + pad);
  }
  std::size_t interior_index(int ix, int iz) const {
    return static_cast<std::size_t>(iz) * nx + ix;
  }

  /// Physical extent of the interior domain [m].
  double width() const { return (nx - 1) * dx; }
  double depth() const { return (nz - 1) * dx; }

  bool operator==(const Grid2D& o) const {
    return nx == o.nx && nz == o.nz && dx == o.dx && pad == o.pad;
  }
};

inline void require_same_grid(const Grid2D& a, const Grid2D& b,
                              const char* what) {
  if (!(a == b))
    throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

}  // namespace cbswri
