#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "cbswri/acquisition.hpp"
#include "cbswri/wavefield.hpp"

namespace cbswri {

/// Gaussian sketch matrix replacing `rows` sources or receivers by `cols`
/// random combinations. Entries are i.i.d. normal with variance 1/cols so
/// that E[X X^T] = I.
struct SketchOperator {
  int rows = 0;
  int cols = 0;
  std::vector<double> entries;  ///< row-major rows x cols
  std::uint64_t seed = 0;
  bool is_identity = false;

  double at(int r, int c) const { return entries[static_cast<std::size_t>(r) * cols + c]; }
};

inline SketchOperator make_sketch(int rows, int cols, std::uint64_t seed) {
  if (cols < 1 || cols > rows)
    throw std::invalid_argument("make_sketch: need 1 <= cols <= rows");
  SketchOperator op;
  op.rows = rows;
  op.cols = cols;
  op.seed = seed;
  op.entries.resize(static_cast<std::size_t>(rows) * cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(double(cols)));
  for (auto& e : op.entries) e = gauss(rng);
  return op;
}

/// Identity sketch (test hook): sketched pipelines collapse to the
/// unsketched ones bit for bit.
inline SketchOperator identity_sketch(int n) {
  SketchOperator op;
  op.rows = n;
  op.cols = n;
  op.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) op.entries[static_cast<std::size_t>(i) * n + i] = 1.0;
  op.is_identity = true;
  return op;
}

/// splitmix64 step; derives per-iteration seeds from a master seed so any
/// sketched run replays bit-identically from its manifest.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t iteration,
                                 std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (2 * iteration + stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Column j of the sketched batch: sum_r X(r, j) * fields[r].
inline std::vector<ComplexWavefield> sketch_fields(
    const std::vector<ComplexWavefield>& fields, const SketchOperator& X) {
  if (static_cast<int>(fields.size()) != X.rows)
    throw std::invalid_argument("sketch_fields: row count mismatch");
  std::vector<ComplexWavefield> out;
  out.reserve(X.cols);
  for (int j = 0; j < X.cols; ++j) {
    ComplexWavefield f(fields[0].grid());
    for (int r = 0; r < X.rows; ++r) {
      const double w = X.at(r, j);
      if (w != 0.0) axpy(cplx{w, 0.0}, fields[r], f);
    }
    out.push_back(std::move(f));
  }
  return out;
}

/// X^T applied to the receiver axis: out(j, s) = sum_r X(r, j) D(r, s).
inline DataMatrix sketch_rows(const DataMatrix& d, const SketchOperator& X) {
  if (d.nr() != X.rows)
    throw std::invalid_argument("sketch_rows: receiver count mismatch");
  DataMatrix out(d.freq_hz(), X.cols, d.ns());
  for (int s = 0; s < d.ns(); ++s)
    for (int j = 0; j < X.cols; ++j) {
      cplx acc{0.0, 0.0};
      for (int r = 0; r < X.rows; ++r) acc += X.at(r, j) * d.at(r, s);
      out.at(j, s) = acc;
    }
  return out;
}

/// Y applied to the source axis: out(r, j) = sum_s Y(s, j) D(r, s).
inline DataMatrix sketch_columns(const DataMatrix& d, const SketchOperator& Y) {
  if (d.ns() != Y.rows)
    throw std::invalid_argument("sketch_columns: source count mismatch");
  DataMatrix out(d.freq_hz(), d.nr(), Y.cols);
  for (int j = 0; j < Y.cols; ++j)
    for (int r = 0; r < d.nr(); ++r) {
      cplx acc{0.0, 0.0};
      for (int s = 0; s < Y.rows; ++s) acc += Y.at(s, j) * d.at(r, s);
      out.at(r, j) = acc;
    }
  return out;
}

}  // namespace cbswri
