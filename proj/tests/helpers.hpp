#pragma once

#include <random>
#include <vector>

#include "cbswri/cbswri.hpp"

namespace testutil {

using namespace cbswri;

inline ComplexWavefield random_field(const Grid2D& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(g.padded_count());
  for (auto& x : v) x = cplx(u(rng), u(rng));
  return ComplexWavefield(g, std::move(v));
}

/// Random smooth model: background m0 with a few smooth Gaussian bumps of
/// relative amplitude up to `contrast`.
inline SquaredSlownessModel random_smooth_model(const Grid2D& g, double m0,
                                                double contrast,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(g.interior_count(), m0);
  const int nbumps = 3;
  for (int b = 0; b < nbumps; ++b) {
    const double cx = u(rng) * (g.nx - 1);
    const double cz = u(rng) * (g.nz - 1);
    const double amp = m0 * contrast * (2.0 * u(rng) - 1.0);
    const double sig = 0.15 * std::max(g.nx, g.nz) * (0.5 + u(rng));
    for (int iz = 0; iz < g.nz; ++iz)
      for (int ix = 0; ix < g.nx; ++ix) {
        const double r2 = (ix - cx) * (ix - cx) + (iz - cz) * (iz - cz);
        v[g.interior_index(ix, iz)] += amp * std::exp(-r2 / (2.0 * sig * sig));
      }
  }
  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return SquaredSlownessModel(g, std::move(v), 0.5 * lo, 2.0 * hi);
}

inline double rel_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace testutil
