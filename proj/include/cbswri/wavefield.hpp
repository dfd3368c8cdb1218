#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cbswri/grid.hpp"

namespace cbswri {

using cplx = std::complex<double>;

/// Monochromatic complex field on the padded grid. Used for state variables,
/// source terms and wave-equation multipliers alike.
class ComplexWavefield {
 public:
  explicit ComplexWavefield(Grid2D grid)
      : grid_(grid), values_(grid.padded_count(), cplx{0.0, 0.0}) {}

  ComplexWavefield(Grid2D grid, std::vector<cplx> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.padded_count())
      throw std::invalid_argument("wavefield: value count != padded grid size");
    for (const cplx& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument("wavefield: non-finite value");
  }

  static ComplexWavefield zeros(Grid2D grid) { return ComplexWavefield(grid); }

  /// Unit point source at an interior node.
  static ComplexWavefield point_source(Grid2D grid, int ix, int iz,
                                       cplx amplitude = {1.0, 0.0}) {
    ComplexWavefield f(grid);
    f.values_[grid.padded_index_of_interior(ix, iz)] = amplitude;
    return f;
  }

  const Grid2D& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& mutable_values() { return values_; }
  cplx at_padded(int ixp, int izp) const {
    return values_[grid_.padded_index(ixp, izp)];
  }
  cplx at_interior(int ix, int iz) const {
    return values_[grid_.padded_index_of_interior(ix, iz)];
  }

  double norm2() const {
    double s = 0.0;
    for (const cplx& v : values_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const cplx& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid2D grid_;
  std::vector<cplx> values_;
};

inline ComplexWavefield operator+(const ComplexWavefield& a,
                                  const ComplexWavefield& b) {
  require_same_grid(a.grid(), b.grid(), "wavefield sum");
  ComplexWavefield out(a.grid());
  auto& o = out.mutable_values();
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = a.values()[i] + b.values()[i];
  return out;
}

inline ComplexWavefield operator-(const ComplexWavefield& a,
                                  const ComplexWavefield& b) {
  require_same_grid(a.grid(), b.grid(), "wavefield difference");
  ComplexWavefield out(a.grid());
  auto& o = out.mutable_values();
  for (std::size_t i = 0; i < o.size(); ++i)
    o[i] = a.values()[i] - b.values()[i];
  return out;
}

inline ComplexWavefield operator*(cplx s, const ComplexWavefield& a) {
  ComplexWavefield out(a.grid());
  auto& o = out.mutable_values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = s * a.values()[i];
  return out;
}

/// y += s * x
inline void axpy(cplx s, const ComplexWavefield& x, ComplexWavefield& y) {
  require_same_grid(x.grid(), y.grid(), "axpy");
  auto& o = y.mutable_values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += s * x.values()[i];
}

inline double rel_diff(const ComplexWavefield& a, const ComplexWavefield& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    num += std::norm(a.values()[i] - b.values()[i]);
    den += std::norm(b.values()[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

/// Unconjugated grid dot product a.b (reciprocity pairings).
inline cplx dot_unconj(const ComplexWavefield& a, const ComplexWavefield& b) {
  require_same_grid(a.grid(), b.grid(), "dot_unconj");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.values().size(); ++i)
    s += a.values()[i] * b.values()[i];
  return s;
}

/// Conjugated grid inner product <a, b> = sum conj(a) b.
inline cplx dot_conj(const ComplexWavefield& a, const ComplexWavefield& b) {
  require_same_grid(a.grid(), b.grid(), "dot_conj");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.values().size(); ++i)
    s += std::conj(a.values()[i]) * b.values()[i];
  return s;
}

}  // namespace cbswri
