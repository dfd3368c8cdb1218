#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cbswri/grid.hpp"
#include "cbswri/wavefield.hpp"

namespace cbswri {

struct Position {
  double x = 0.0;  ///< [m]
  double z = 0.0;  ///< [m]
};

/// Source and receiver positions in meters. Positions must lie inside the
/// interior domain and snap to the nearest grid node when an operator is
/// built on a grid.
struct AcquisitionGeometry {
  std::vector<Position> sources;
  std::vector<Position> receivers;

  int ns() const { return static_cast<int>(sources.size()); }
  int nr() const { return static_cast<int>(receivers.size()); }

  void validate() const {
    if (sources.empty()) throw std::invalid_argument("geometry: no sources");
    if (receivers.empty()) throw std::invalid_argument("geometry: no receivers");
    for (const auto& p : sources)
      if (!std::isfinite(p.x) || !std::isfinite(p.z))
        throw std::invalid_argument("geometry: non-finite source position");
    for (const auto& p : receivers)
      if (!std::isfinite(p.x) || !std::isfinite(p.z))
        throw std::invalid_argument("geometry: non-finite receiver position");
  }
};

/// Snaps a physical position to the nearest interior node.
inline std::pair<int, int> snap_to_node(const Grid2D& grid, Position p) {
  const int ix = static_cast<int>(std::lround(p.x / grid.dx));
  const int iz = static_cast<int>(std::lround(p.z / grid.dx));
  if (ix < 0 || ix >= grid.nx || iz < 0 || iz >= grid.nz)
    throw std::invalid_argument("position (" + std::to_string(p.x) + ", " +
                                std::to_string(p.z) +
                                ") m outside the interior domain");
  return {ix, iz};
}

/// Receiver sampling operator P: one unit entry per row, at the padded node
/// nearest to each receiver.
class ObservationOperator {
 public:
  ObservationOperator(const Grid2D& grid, const AcquisitionGeometry& geom)
      : grid_(grid) {
    geom.validate();
    nodes_.reserve(geom.receivers.size());
    for (const auto& p : geom.receivers) {
      auto [ix, iz] = snap_to_node(grid, p);
      nodes_.push_back(grid.padded_index_of_interior(ix, iz));
    }
  }

  const Grid2D& grid() const { return grid_; }
  int nr() const { return static_cast<int>(nodes_.size()); }
  const std::vector<std::size_t>& nodes() const { return nodes_; }

 private:
  Grid2D grid_;
  std::vector<std::size_t> nodes_;
};

/// P u: the wavefield values at the receiver nodes.
inline std::vector<cplx> sample(const ComplexWavefield& field,
                                const ObservationOperator& P) {
  require_same_grid(field.grid(), P.grid(), "sample");
  std::vector<cplx> out(P.nodes().size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = field.values()[P.nodes()[i]];
  return out;
}

/// P^T v: zero field carrying v at the receiver nodes.
inline ComplexWavefield inject(const std::vector<cplx>& values,
                               const ObservationOperator& P) {
  if (values.size() != P.nodes().size())
    throw std::invalid_argument("inject: value count != receiver count");
  ComplexWavefield out(P.grid());
  auto& o = out.mutable_values();
  for (std::size_t i = 0; i < values.size(); ++i) o[P.nodes()[i]] += values[i];
  return out;
}

/// Nr x Ns complex data panel for one frequency. Column s holds the trace of
/// source s; storage is column-major (per-source columns contiguous).
class DataMatrix {
 public:
  DataMatrix(double freq_hz, int nr, int ns)
      : freq_hz_(freq_hz), nr_(nr), ns_(ns),
        values_(static_cast<std::size_t>(nr) * ns, cplx{0.0, 0.0}) {
    if (nr < 1 || ns < 1) throw std::invalid_argument("DataMatrix: empty");
  }

  DataMatrix(double freq_hz, int nr, int ns, std::vector<cplx> values)
      : freq_hz_(freq_hz), nr_(nr), ns_(ns), values_(std::move(values)) {
    if (nr < 1 || ns < 1) throw std::invalid_argument("DataMatrix: empty");
    if (values_.size() != static_cast<std::size_t>(nr) * ns)
      throw std::invalid_argument("DataMatrix: size mismatch");
    for (const cplx& v : values_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::invalid_argument("DataMatrix: non-finite value");
  }

  double freq_hz() const { return freq_hz_; }
  int nr() const { return nr_; }
  int ns() const { return ns_; }
  cplx& at(int r, int s) { return values_[static_cast<std::size_t>(s) * nr_ + r]; }
  const cplx& at(int r, int s) const {
    return values_[static_cast<std::size_t>(s) * nr_ + r];
  }
  std::vector<cplx> column(int s) const {
    return std::vector<cplx>(values_.begin() + static_cast<std::size_t>(s) * nr_,
                             values_.begin() + static_cast<std::size_t>(s + 1) * nr_);
  }
  void set_column(int s, const std::vector<cplx>& col) {
    if (static_cast<int>(col.size()) != nr_)
      throw std::invalid_argument("DataMatrix: column length mismatch");
    std::copy(col.begin(), col.end(),
              values_.begin() + static_cast<std::size_t>(s) * nr_);
  }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& mutable_values() { return values_; }

  double frob_norm() const {
    double s = 0.0;
    for (const cplx& v : values_) s += std::norm(v);
    return std::sqrt(s);
  }

 private:
  double freq_hz_;
  int nr_, ns_;
  std::vector<cplx> values_;
};

inline DataMatrix operator-(const DataMatrix& a, const DataMatrix& b) {
  if (a.nr() != b.nr() || a.ns() != b.ns())
    throw std::invalid_argument("DataMatrix difference: shape mismatch");
  DataMatrix out(a.freq_hz(), a.nr(), a.ns());
  for (std::size_t i = 0; i < out.values().size(); ++i)
    out.mutable_values()[i] = a.values()[i] - b.values()[i];
  return out;
}

}  // namespace cbswri
