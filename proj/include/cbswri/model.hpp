#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cbswri/grid.hpp"

namespace cbswri {

/// Squared slowness m = 1/v^2 [s^2/m^2] on the interior grid, with physical
/// box bounds. Immutable after construction.
class SquaredSlownessModel {
 public:
  SquaredSlownessModel(Grid2D grid, std::vector<double> values, double lo,
                       double hi)
      : grid_(grid), values_(std::move(values)), lo_(lo), hi_(hi) {
    if (values_.size() != grid_.interior_count())
      throw std::invalid_argument("model: value count != interior grid size");
    if (!(lo_ > 0.0) || !(lo_ <= hi_))
      throw std::invalid_argument("model: need 0 < m_lo <= m_hi");
    for (double v : values_) {
      if (!std::isfinite(v) || !(v > 0.0))
        throw std::invalid_argument("model: values must be finite, positive");
      if (v < lo_ || v > hi_)
        throw std::invalid_argument("model: value outside [m_lo, m_hi]");
    }
  }

  static SquaredSlownessModel homogeneous(Grid2D grid, double m,
                                          double lo = 0.0, double hi = 0.0) {
    if (lo == 0.0) lo = m * 0.5;
    if (hi == 0.0) hi = m * 2.0;
    return SquaredSlownessModel(grid, std::vector<double>(grid.interior_count(), m),
                                lo, hi);
  }

  /// Convenience: build from velocities [m/s].
  static SquaredSlownessModel from_velocity(Grid2D grid,
                                            const std::vector<double>& vel,
                                            double v_lo, double v_hi) {
    std::vector<double> m(vel.size());
    for (std::size_t i = 0; i < vel.size(); ++i) m[i] = 1.0 / (vel[i] * vel[i]);
    return SquaredSlownessModel(grid, std::move(m), 1.0 / (v_hi * v_hi),
                                1.0 / (v_lo * v_lo));
  }

  const Grid2D& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double at(int ix, int iz) const { return values_[grid_.interior_index(ix, iz)]; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::pair<double, double> bounds() const { return {lo_, hi_}; }

  double min_value() const {
    return *std::min_element(values_.begin(), values_.end());
  }
  double max_value() const {
    return *std::max_element(values_.begin(), values_.end());
  }

  SquaredSlownessModel with_values(std::vector<double> v) const {
    return SquaredSlownessModel(grid_, std::move(v), lo_, hi_);
  }

 private:
  Grid2D grid_;
  std::vector<double> values_;
  double lo_, hi_;
};

/// Extends a model onto the padded grid by replicating edge values into the
/// pad, so the pad introduces no new contrast.
inline std::vector<double> pad_extend(const SquaredSlownessModel& model) {
  const Grid2D& g = model.grid();
  std::vector<double> out(g.padded_count());
  const int nxp = g.nxp(), nzp = g.nzp(), pad = g.pad;
  for (int izp = 0; izp < nzp; ++izp) {
    const int iz = std::clamp(izp - pad, 0, g.nz - 1);
    for (int ixp = 0; ixp < nxp; ++ixp) {
      const int ix = std::clamp(ixp - pad, 0, g.nx - 1);
      out[g.padded_index(ixp, izp)] = model.at(ix, iz);
    }
  }
  return out;
}

/// Sampling guidance: dx should not exceed a quarter of the minimum
/// wavelength at the highest frequency of interest. Returns a warning
/// message when violated (never an error).
inline std::optional<std::string> grid_sampling_warning(
    const SquaredSlownessModel& model, double max_freq_hz) {
  const double v_min = 1.0 / std::sqrt(model.max_value());
  const double lambda_min = v_min / max_freq_hz;
  if (model.grid().dx > lambda_min / 4.0) {
    return "grid interval " + std::to_string(model.grid().dx) +
           " m exceeds a quarter of the minimum wavelength (" +
           std::to_string(lambda_min) + " m at " + std::to_string(max_freq_hz) +
           " Hz)";
  }
  return std::nullopt;
}

}  // namespace cbswri
