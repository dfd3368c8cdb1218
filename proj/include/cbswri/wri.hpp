#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <concepts>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cbswri/acquisition.hpp"
#include "cbswri/born_series.hpp"
#include "cbswri/model.hpp"
#include "cbswri/parallel.hpp"
#include "cbswri/sketch.hpp"
#include "cbswri/wavefield.hpp"

namespace cbswri {

template <class S>
concept HelmholtzSolverLike =
    requires(const S s, const SquaredSlownessModel& m, double w,
             const ComplexWavefield& b) {
      { s.solve(m, w, b) } -> std::same_as<ComplexWavefield>;
      { s.solve_transposed(m, w, b) } -> std::same_as<ComplexWavefield>;
    };

/// Penalty, regularization and solver settings for the ADMM inversion.
struct WriConfig {
  double lam0 = 1e-2;           ///< wave-equation penalty weight
  double lam1 = 1.0;            ///< data penalty weight
  double lam0_fraction = 1e-2;  ///< fraction of the data-normal eigenvalue
                                ///< used to set lam0/lam1 per frequency
  double tikhonov_weight = 0.0;    ///< gamma, pull toward the prior model
  double m_lo = 0.0, m_hi = 0.0;   ///< box bounds; 0 = take from the model
  int max_inner_iters = 10;        ///< ADMM iterations per frequency batch
  CbsConfig solver;
  int threads = 1;

  double lam_ratio() const { return lam0 / lam1; }
  void validate() const {
    if (!(lam0 > 0.0) || !(lam1 > 0.0))
      throw std::invalid_argument("WriConfig: lam0, lam1 > 0");
    if (tikhonov_weight < 0.0)
      throw std::invalid_argument("WriConfig: tikhonov_weight >= 0");
    if (max_inner_iters < 0)
      throw std::invalid_argument("WriConfig: max_inner_iters >= 0");
  }
};

/// ADMM state for one frequency: current model, scaled multipliers and the
/// exact tally of Helmholtz solves spent so far.
struct WriState {
  SquaredSlownessModel model;
  std::vector<ComplexWavefield> lambda_b;  ///< per (effective) source
  DataMatrix lambda_d;
  int iteration = 0;
  long forward_solves = 0;
  long backward_solves = 0;
};

/// Starts the recursion at lambda_b = b, lambda_d = d.
inline WriState make_wri_state(SquaredSlownessModel model,
                               const std::vector<ComplexWavefield>& b,
                               const DataMatrix& d) {
  if (static_cast<int>(b.size()) != d.ns())
    throw std::invalid_argument("make_wri_state: source count mismatch");
  return WriState{std::move(model), b, d};
}

/// Per-iteration diagnostics; the residual norms are the multiplier
/// increments themselves.
struct WriIterationReport {
  int iteration = 0;
  double data_residual = 0.0;       ///< |d - P u|_F / |d|_F
  double wave_residual_mean = 0.0;  ///< mean_s |b_s - A u_s| / |b_s|
  int dead_points = 0;
  double lam_ratio = 0.0;
};

/// S applied to a source batch: column s samples the forward field of b_s.
template <HelmholtzSolverLike Solver>
DataMatrix forward_map(const Solver& solver, const SquaredSlownessModel& model,
                       double omega, const std::vector<ComplexWavefield>& sources,
                       const ObservationOperator& P, int threads = 1) {
  if (sources.empty()) throw std::invalid_argument("forward_map: no sources");
  DataMatrix d(omega / (2.0 * M_PI), P.nr(), static_cast<int>(sources.size()));
  std::vector<std::vector<cplx>> cols(sources.size());
  parallel_for(static_cast<int>(sources.size()), threads, [&](int s) {
    cols[s] = sample(solver.solve(model, omega, sources[s]), P);
  });
  for (int s = 0; s < d.ns(); ++s) d.set_column(s, cols[s]);
  return d;
}

/// Columns of S^T: one transposed solve per receiver, or per sketched
/// receiver combination when X is given. These fields are the reusable
/// backbone of one ADMM iteration.
template <HelmholtzSolverLike Solver>
std::vector<ComplexWavefield> adjoint_columns(
    const Solver& solver, const SquaredSlownessModel& model, double omega,
    const ObservationOperator& P, const SketchOperator* X = nullptr,
    int threads = 1) {
  const int nr = P.nr();
  const int ncols = X ? X->cols : nr;
  if (X && X->rows != nr)
    throw std::invalid_argument("adjoint_columns: sketch row count != Nr");
  std::vector<ComplexWavefield> cols(ncols, ComplexWavefield(model.grid()));
  parallel_for(ncols, threads, [&](int j) {
    std::vector<cplx> v(nr, cplx{0.0, 0.0});
    if (X) {
      for (int r = 0; r < nr; ++r) v[r] = X->at(r, j);
    } else {
      v[j] = 1.0;
    }
    cols[j] = solver.solve_transposed(model, omega, inject(v, P));
  });
  return cols;
}

/// Reduced data residual lambda_d - S lambda_b, one forward solve per
/// source. At iteration zero this is exactly d - S b.
template <HelmholtzSolverLike Solver>
DataMatrix reduced_residual(const Solver& solver,
                            const SquaredSlownessModel& model, double omega,
                            const ObservationOperator& P,
                            const std::vector<ComplexWavefield>& lambda_b,
                            const DataMatrix& lambda_d, int threads = 1) {
  DataMatrix out = lambda_d;
  std::vector<std::vector<cplx>> pv(lambda_b.size());
  parallel_for(static_cast<int>(lambda_b.size()), threads, [&](int s) {
    pv[s] = sample(solver.solve(model, omega, lambda_b[s]), P);
  });
  for (int s = 0; s < out.ns(); ++s)
    for (int r = 0; r < out.nr(); ++r) out.at(r, s) -= pv[s][r];
  return out;
}

/// Same residual computed from stored adjoint columns by reciprocity:
/// (S lambda_b)_j = Z_j . lambda_b (unconjugated), so no extra solves are
/// spent. With a receiver sketch the result lives in the sketched data space.
inline DataMatrix reduced_residual_from_columns(
    const std::vector<ComplexWavefield>& adj_cols,
    const std::vector<ComplexWavefield>& lambda_b, const DataMatrix& lambda_d,
    const SketchOperator* X = nullptr) {
  DataMatrix out = X ? sketch_rows(lambda_d, *X) : lambda_d;
  if (static_cast<int>(adj_cols.size()) != out.nr())
    throw std::invalid_argument("reduced_residual_from_columns: column count");
  for (int s = 0; s < out.ns(); ++s)
    for (int j = 0; j < out.nr(); ++j)
      out.at(j, s) -= dot_unconj(adj_cols[j], lambda_b[s]);
  return out;
}

/// Solves the dense data-space normal system (S S^H + lam_ratio I) x = rhs
/// per source column. The Gram matrix is built from grid inner products of
/// the stored adjoint columns and re-symmetrized to absorb solver noise.
inline DataMatrix solve_data_normal(const std::vector<ComplexWavefield>& adj_cols,
                                    double lam_ratio, const DataMatrix& rhs) {
  if (!(lam_ratio > 0.0))
    throw std::invalid_argument("solve_data_normal: lam_ratio > 0");
  const int m = static_cast<int>(adj_cols.size());
  if (rhs.nr() != m)
    throw std::invalid_argument("solve_data_normal: rhs row count mismatch");

  Eigen::MatrixXcd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      // (S S^H)(i, j) = sum_x Z_i(x) conj(Z_j(x))
      cplx g{0.0, 0.0};
      const auto& zi = adj_cols[i].values();
      const auto& zj = adj_cols[j].values();
      for (std::size_t x = 0; x < zi.size(); ++x) g += zi[x] * std::conj(zj[x]);
      G(i, j) = g;
      G(j, i) = std::conj(g);
    }
  G = 0.5 * (G + G.adjoint()).eval();
  for (int i = 0; i < m; ++i) G(i, i) += lam_ratio;

  Eigen::LLT<Eigen::MatrixXcd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "solve_data_normal: Gram factorization failed; increase lam0/lam1");

  DataMatrix out(rhs.freq_hz(), m, rhs.ns());
  for (int s = 0; s < rhs.ns(); ++s) {
    Eigen::VectorXcd c(m);
    for (int j = 0; j < m; ++j) c(j) = rhs.at(j, s);
    Eigen::VectorXcd x = llt.solve(c);
    for (int j = 0; j < m; ++j) out.at(j, s) = x(j);
  }
  return out;
}

/// Data-assimilated wavefields: one forward solve per source on the
/// composite right-hand side lambda_b + sum_j Z_j delta_de(j, s).
template <HelmholtzSolverLike Solver>
std::vector<ComplexWavefield> reconstruct_da_wavefields(
    const Solver& solver, const SquaredSlownessModel& model, double omega,
    const std::vector<ComplexWavefield>& lambda_b,
    const std::vector<ComplexWavefield>& adj_cols, const DataMatrix& delta_de,
    int threads = 1) {
  if (delta_de.ns() != static_cast<int>(lambda_b.size()) ||
      delta_de.nr() != static_cast<int>(adj_cols.size()))
    throw std::invalid_argument("reconstruct_da_wavefields: shape mismatch");
  std::vector<ComplexWavefield> u(lambda_b.size(),
                                  ComplexWavefield(model.grid()));
  parallel_for(static_cast<int>(lambda_b.size()), threads, [&](int s) {
    ComplexWavefield rhs = lambda_b[s];
    for (int j = 0; j < delta_de.nr(); ++j)
      axpy(delta_de.at(j, s), adj_cols[j], rhs);
    u[s] = solver.solve(model, omega, rhs);
  });
  return u;
}

struct ModelUpdateResult {
  SquaredSlownessModel model;
  int dead_points = 0;
};

/// Closed-form per-point model update minimizing
///   (gamma/2)|m - m_prior|^2 + (lam0/2) sum_s |lambda_b,s - A(m) u_s|^2
/// followed by projection onto the box bounds. Points where the quadratic
/// coefficient underflows keep their previous value and are counted.
inline ModelUpdateResult update_model(const SquaredSlownessModel& model,
                                      const std::vector<ComplexWavefield>& u,
                                      const std::vector<ComplexWavefield>& lambda_b,
                                      double omega, const WriConfig& cfg) {
  if (u.size() != lambda_b.size() || u.empty())
    throw std::invalid_argument("update_model: batch mismatch");
  const Grid2D& g = model.grid();
  const double w2 = omega * omega;
  const double gamma = cfg.tikhonov_weight;
  const double lam0 = cfg.lam0;
  const double lo = cfg.m_lo > 0.0 ? cfg.m_lo : model.lo();
  const double hi = cfg.m_hi > 0.0 ? cfg.m_hi : model.hi();

  const std::size_t np = g.padded_count();
  std::vector<double> num(np, 0.0), den(np, 0.0);
  Fft2d fft(g);
  const std::vector<double> ksq = squared_wavenumbers(g);
  std::vector<cplx> lap(np);
  for (std::size_t s = 0; s < u.size(); ++s) {
    fft.load(u[s].values());
    fft.forward();
    auto* b = fft.buffer();
    for (std::size_t i = 0; i < np; ++i) b[i] *= -ksq[i];
    fft.inverse();
    fft.store(lap);
    const auto& uv = u[s].values();
    const auto& lb = lambda_b[s].values();
    for (std::size_t i = 0; i < np; ++i) {
      const cplx r = lb[i] - lap[i];
      num[i] += lam0 * w2 * (std::conj(uv[i]) * r).real();
      den[i] += lam0 * w2 * w2 * std::norm(uv[i]);
    }
  }

  double den_max = 0.0;
  for (double d : den) den_max = std::max(den_max, d);
  const double dead_floor = 1e-14 * den_max;

  std::vector<double> out(model.values());
  int dead = 0;
  for (int iz = 0; iz < g.nz; ++iz)
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t ip = g.padded_index_of_interior(ix, iz);
      const std::size_t ii = g.interior_index(ix, iz);
      const double denom = gamma + den[ip];
      if (denom <= dead_floor || denom == 0.0) {
        ++dead;  // keep the previous value
        continue;
      }
      const double m_new = (gamma * model.values()[ii] + num[ip]) / denom;
      out[ii] = std::clamp(m_new, lo, hi);
    }
  return {SquaredSlownessModel(g, std::move(out), lo, hi), dead};
}

/// Gradient-ascent multiplier updates, exact and undamped:
///   lambda_b += b - A(m) u,   lambda_d += d - P u.
/// Returns the diagnostics carried by the increments.
inline std::pair<double, double> update_multipliers(
    WriState& state, const std::vector<ComplexWavefield>& u,
    const SquaredSlownessModel& new_model, double omega,
    const std::vector<ComplexWavefield>& b, const DataMatrix& d,
    const ObservationOperator& P) {
  if (u.size() != state.lambda_b.size() || u.size() != b.size())
    throw std::invalid_argument("update_multipliers: batch mismatch");
  detail::HelmholtzWorkspace ws(new_model, omega);
  std::vector<cplx> au;
  double wave_sum = 0.0;
  double data_num = 0.0;
  for (std::size_t s = 0; s < u.size(); ++s) {
    ws.apply_operator(u[s].values(), au);
    auto& lb = state.lambda_b[s].mutable_values();
    double rn = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < au.size(); ++i) {
      const cplx r = b[s].values()[i] - au[i];
      lb[i] += r;
      rn += std::norm(r);
      bn += std::norm(b[s].values()[i]);
    }
    wave_sum += bn > 0.0 ? std::sqrt(rn / bn) : 0.0;
    const std::vector<cplx> pu = sample(u[s], P);
    for (int r = 0; r < d.nr(); ++r) {
      const cplx rd = d.at(r, static_cast<int>(s)) - pu[r];
      state.lambda_d.at(r, static_cast<int>(s)) += rd;
      data_num += std::norm(rd);
    }
  }
  const double dn = d.frob_norm();
  return {wave_sum / static_cast<double>(u.size()),
          dn > 0.0 ? std::sqrt(data_num) / dn : 0.0};
}

struct WavefieldValidation {
  std::vector<double> m_est;  ///< padded grid, zero where masked out
  std::vector<char> mask;     ///< 1 where the estimate is valid
};

/// Recovers the model from a wavefield by the pointwise division
/// m = (b - Lap u) / (w^2 u), masking out low-amplitude points. Any
/// wave-equation error in u shows up directly as model error, which makes
/// this a sharp wavefield-accuracy diagnostic.
inline WavefieldValidation validate_model_from_wavefield(
    const ComplexWavefield& u, const ComplexWavefield& b, double omega,
    double amp_floor = 1e-3) {
  if (!(amp_floor > 0.0))
    throw std::invalid_argument("validate_model_from_wavefield: amp_floor > 0");
  require_same_grid(u.grid(), b.grid(), "validate_model_from_wavefield");
  const Grid2D& g = u.grid();
  const std::size_t np = g.padded_count();

  Fft2d fft(g);
  const std::vector<double> ksq = squared_wavenumbers(g);
  fft.load(u.values());
  fft.forward();
  auto* buf = fft.buffer();
  for (std::size_t i = 0; i < np; ++i) buf[i] *= -ksq[i];
  fft.inverse();
  std::vector<cplx> lap(np);
  fft.store(lap);

  const double floor_abs = amp_floor * u.max_abs();
  WavefieldValidation out;
  out.m_est.assign(np, 0.0);
  out.mask.assign(np, 0);
  const double w2 = omega * omega;
  for (std::size_t i = 0; i < np; ++i) {
    if (std::abs(u.values()[i]) >= floor_abs && floor_abs > 0.0) {
      out.mask[i] = 1;
      out.m_est[i] = ((b.values()[i] - lap[i]) / (w2 * u.values()[i])).real();
    }
  }
  return out;
}

/// One full ADMM iteration (adjoint columns, reduced residual, data-space
/// normal solve, DA reconstruction, model update, multiplier ascent).
/// Sketches, when given, shrink the receiver and source batches; the state's
/// multipliers live in the reduced source space in that case. Solve tallies
/// grow by exactly the number of Helmholtz solves launched.
template <HelmholtzSolverLike Solver>
WriIterationReport wri_iterate(WriState& state, const Solver& solver,
                               const DataMatrix& d,
                               const std::vector<ComplexWavefield>& b,
                               double omega, const ObservationOperator& P,
                               const WriConfig& cfg,
                               const SketchOperator* X = nullptr,
                               const SketchOperator* Y = nullptr) {
  cfg.validate();
  const std::vector<ComplexWavefield>* b_eff = &b;
  const DataMatrix* d_eff = &d;
  std::vector<ComplexWavefield> b_red;
  std::optional<DataMatrix> d_red;
  if (Y) {
    b_red = sketch_fields(b, *Y);
    d_red.emplace(sketch_columns(d, *Y));
    b_eff = &b_red;
    d_eff = &*d_red;
  }
  if (state.lambda_b.size() != b_eff->size() ||
      state.lambda_d.ns() != d_eff->ns())
    throw std::invalid_argument("wri_iterate: state/batch shape mismatch");

  const auto adj = adjoint_columns(solver, state.model, omega, P, X,
                                   cfg.threads);
  state.backward_solves += static_cast<long>(adj.size());

  const DataMatrix ddr =
      reduced_residual_from_columns(adj, state.lambda_b, state.lambda_d, X);
  const DataMatrix dde = solve_data_normal(adj, cfg.lam_ratio(), ddr);

  const auto u = reconstruct_da_wavefields(solver, state.model, omega,
                                           state.lambda_b, adj, dde,
                                           cfg.threads);
  state.forward_solves += static_cast<long>(u.size());

  ModelUpdateResult upd =
      update_model(state.model, u, state.lambda_b, omega, cfg);
  const auto [wave_mean, data_res] = update_multipliers(
      state, u, upd.model, omega, *b_eff, *d_eff, P);
  state.model = std::move(upd.model);
  ++state.iteration;

  WriIterationReport rep;
  rep.iteration = state.iteration;
  rep.data_residual = data_res;
  rep.wave_residual_mean = wave_mean;
  rep.dead_points = upd.dead_points;
  rep.lam_ratio = cfg.lam_ratio();
  return rep;
}

}  // namespace cbswri
