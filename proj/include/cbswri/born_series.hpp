#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cbswri/fft.hpp"
#include "cbswri/model.hpp"
#include "cbswri/wavefield.hpp"

namespace cbswri {

/// Controls for the preconditioned Born-series Helmholtz solver.
struct CbsConfig {
  double eta = 1e-8;       ///< relative wave-equation error threshold
  int max_iters = 100000;  ///< iteration cap
  std::optional<double> k0_sq_override;  ///< [rad^2/m^2]
  std::optional<double> eps_override;    ///< [rad^2/m^2]
  double eps_safety = 1.0;     ///< factor >= 1 on the minimal epsilon
  int divergence_window = 20;  ///< consecutive residual increases to flag

  void validate() const {
    if (!(eta > 0.0) || !(eta < 1.0))
      throw std::invalid_argument("CbsConfig: need 0 < eta < 1");
    if (max_iters < 1) throw std::invalid_argument("CbsConfig: max_iters >= 1");
    if (!(eps_safety >= 1.0))
      throw std::invalid_argument("CbsConfig: eps_safety >= 1");
    if (divergence_window < 2)
      throw std::invalid_argument("CbsConfig: divergence_window >= 2");
  }
};

struct CbsSolveReport {
  int iters = 0;
  double final_residual = 0.0;
  double k0_sq = 0.0;          ///< [rad^2/m^2]
  double eps = 0.0;            ///< [rad^2/m^2]
  double pseudo_speed = 0.0;   ///< [m per iteration], 2 k0 / eps
  double scattering_contrast = 0.0;  ///< nu = k_M/k0 - k0/k_M
  bool converged = false;
};

/// Raised when the residual grows monotonically over the divergence window,
/// which indicates epsilon below the convergence bound.
class CbsDivergenceError : public std::runtime_error {
 public:
  CbsDivergenceError(double eps, double bound)
      : std::runtime_error(
            "Born series diverged: eps = " + std::to_string(eps) +
            " rad^2/m^2 is below the convergence bound max|w^2 m - k0^2| = " +
            std::to_string(bound) + " rad^2/m^2"),
        eps_(eps), bound_(bound) {}
  double eps() const { return eps_; }
  double bound() const { return bound_; }

 private:
  double eps_, bound_;
};

/// Background squared wavenumber that minimizes epsilon and so maximizes the
/// series' pseudo speed: the midpoint of the w^2 m range over the padded
/// model.
inline double select_k0_sq(const SquaredSlownessModel& model, double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("select_k0_sq: omega > 0");
  const double w2 = omega * omega;
  // Pad replication adds no new values, so interior min/max suffice.
  return 0.5 * (w2 * model.min_value() + w2 * model.max_value());
}

namespace detail {
constexpr double kEpsFloorFraction = 1e-8;
}

/// Smallest attenuation that keeps the series convergent:
/// safety * max|w^2 m - k0^2|, floored at a small positive fraction of k0^2
/// so the preconditioner stays bounded for homogeneous media.
inline double select_eps(const SquaredSlownessModel& model, double omega,
                         double k0_sq, double safety = 1.0) {
  if (!(k0_sq > 0.0)) throw std::invalid_argument("select_eps: k0_sq > 0");
  const double w2 = omega * omega;
  const double dev = std::max(std::abs(w2 * model.min_value() - k0_sq),
                              std::abs(w2 * model.max_value() - k0_sq));
  return std::max(safety * dev, detail::kEpsFloorFraction * k0_sq);
}

/// Pad width [cells] for which the attenuated Green's function decays by at
/// least 60 dB across the pad.
inline int recommended_pad_cells(double k0_sq, double eps, double dx) {
  const double pad_m = 3.0 * std::log(10.0) * std::sqrt(k0_sq) / eps;
  const double cells = std::ceil(pad_m / dx);
  return cells < 2147483647.0 ? static_cast<int>(cells) : 2147483647;
}

namespace detail {

/// Scratch state shared by the per-call operator entry points and the solve
/// loop: one FFT workspace, the |k|^2 table and the padded w^2 m profile.
struct HelmholtzWorkspace {
  Grid2D grid;
  Fft2d fft;
  std::vector<double> ksq;
  std::vector<double> w2m;

  HelmholtzWorkspace(const SquaredSlownessModel& model, double omega)
      : grid(model.grid()), fft(grid), ksq(squared_wavenumbers(grid)) {
    const std::vector<double> mp = pad_extend(model);
    w2m.resize(mp.size());
    const double w2 = omega * omega;
    for (std::size_t i = 0; i < mp.size(); ++i) w2m[i] = w2 * mp[i];
  }

  /// A u = Lap u + w^2 m u with the spectral Laplacian.
  void apply_operator(const std::vector<cplx>& u, std::vector<cplx>& out) {
    fft.load(u);
    fft.forward();
    auto* b = fft.buffer();
    for (std::size_t i = 0; i < ksq.size(); ++i) b[i] *= -ksq[i];
    fft.inverse();
    out.resize(u.size());
    const auto* lap = fft.buffer();
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = lap[i] + w2m[i] * u[i];
  }

  /// G r with G = (Lap + k0^2 - i eps)^{-1}, in the Fourier domain.
  void apply_green(const std::vector<cplx>& r, double k0_sq, double eps,
                   std::vector<cplx>& out) {
    fft.load(r);
    fft.forward();
    auto* b = fft.buffer();
    const cplx shift(k0_sq, -eps);
    for (std::size_t i = 0; i < ksq.size(); ++i) b[i] /= (shift - ksq[i]);
    fft.inverse();
    out.resize(r.size());
    fft.store(out);
  }
};

}  // namespace detail

/// A u = Lap u + w^2 Diag(m) u on the padded grid (spectral Laplacian).
inline ComplexWavefield apply_helmholtz(const SquaredSlownessModel& model,
                                        double omega,
                                        const ComplexWavefield& u) {
  require_same_grid(model.grid(), u.grid(), "apply_helmholtz");
  detail::HelmholtzWorkspace ws(model, omega);
  ComplexWavefield out(u.grid());
  ws.apply_operator(u.values(), out.mutable_values());
  return out;
}

/// Attenuated homogeneous-background Green's operator applied spectrally:
/// output^(k) = input^(k) / (-|k|^2 + k0^2 - i eps).
inline ComplexWavefield green_apply(const ComplexWavefield& field,
                                    double k0_sq, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("green_apply: eps > 0");
  Fft2d fft(field.grid());
  const std::vector<double> ksq = squared_wavenumbers(field.grid());
  fft.load(field.values());
  fft.forward();
  auto* b = fft.buffer();
  const cplx shift(k0_sq, -eps);
  for (std::size_t i = 0; i < ksq.size(); ++i) b[i] /= (shift - ksq[i]);
  fft.inverse();
  ComplexWavefield out(field.grid());
  fft.store(out.mutable_values());
  return out;
}

/// Relative wave-equation error |A u - b| / |b|.
inline double wave_residual(const SquaredSlownessModel& model, double omega,
                            const ComplexWavefield& u,
                            const ComplexWavefield& b) {
  const double bn = b.norm2();
  if (!(bn > 0.0))
    throw std::invalid_argument("wave_residual: zero source term");
  ComplexWavefield au = apply_helmholtz(model, omega, u);
  double s = 0.0;
  for (std::size_t i = 0; i < au.values().size(); ++i)
    s += std::norm(au.values()[i] - b.values()[i]);
  return std::sqrt(s) / bn;
}

/// One preconditioned Born-series update,
///   u <- u - M G (A u - b),
/// with M = (-i/eps) Diag(w^2 dm + i eps) and dm = m - k0^2/w^2.
inline ComplexWavefield cbs_step(const ComplexWavefield& u,
                                 const ComplexWavefield& b,
                                 const SquaredSlownessModel& model,
                                 double omega, double k0_sq, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("cbs_step: eps > 0");
  require_same_grid(u.grid(), b.grid(), "cbs_step");
  detail::HelmholtzWorkspace ws(model, omega);
  std::vector<cplx> au, gr;
  ws.apply_operator(u.values(), au);
  for (std::size_t i = 0; i < au.size(); ++i) au[i] -= b.values()[i];
  ws.apply_green(au, k0_sq, eps, gr);
  ComplexWavefield out(u.grid());
  auto& o = out.mutable_values();
  const cplx minus_i_over_eps(0.0, -1.0 / eps);
  for (std::size_t i = 0; i < o.size(); ++i) {
    const cplx precond = minus_i_over_eps * cplx(ws.w2m[i] - k0_sq, eps);
    o[i] = u.values()[i] - precond * gr[i];
  }
  return out;
}

/// Solves (Lap + w^2 Diag(m)) u = b by the preconditioned Born series,
/// starting from u = 0 and iterating until the relative wave-equation error
/// drops below cfg.eta. Throws CbsDivergenceError when the residual grows
/// monotonically over cfg.divergence_window iterations; an exhausted
/// iteration cap returns a non-converged report instead.
inline std::pair<ComplexWavefield, CbsSolveReport> solve_helmholtz(
    const SquaredSlownessModel& model, double omega, const ComplexWavefield& b,
    const CbsConfig& cfg) {
  cfg.validate();
  require_same_grid(model.grid(), b.grid(), "solve_helmholtz");
  if (!(omega > 0.0)) throw std::invalid_argument("solve_helmholtz: omega > 0");

  CbsSolveReport rep;
  rep.k0_sq = cfg.k0_sq_override ? *cfg.k0_sq_override
                                 : select_k0_sq(model, omega);
  rep.eps = cfg.eps_override
                ? *cfg.eps_override
                : select_eps(model, omega, rep.k0_sq, cfg.eps_safety);
  if (!(rep.eps > 0.0))
    throw std::invalid_argument("solve_helmholtz: eps must be positive");
  rep.pseudo_speed = 2.0 * std::sqrt(rep.k0_sq) / rep.eps;
  const double w2 = omega * omega;
  const double k_m = std::sqrt(w2 * model.max_value());
  const double k0 = std::sqrt(rep.k0_sq);
  rep.scattering_contrast = k_m / k0 - k0 / k_m;

  const double bn = b.norm2();
  if (bn == 0.0) {
    rep.converged = true;
    return {ComplexWavefield::zeros(model.grid()), rep};
  }

  detail::HelmholtzWorkspace ws(model, omega);
  const double eq20_bound = std::max(std::abs(w2 * model.min_value() - rep.k0_sq),
                                     std::abs(w2 * model.max_value() - rep.k0_sq));
  const std::size_t n = ws.w2m.size();
  std::vector<cplx> precond(n);
  const cplx minus_i_over_eps(0.0, -1.0 / rep.eps);
  for (std::size_t i = 0; i < n; ++i)
    precond[i] = minus_i_over_eps * cplx(ws.w2m[i] - rep.k0_sq, rep.eps);

  std::vector<cplx> u(n, cplx{0.0, 0.0});
  std::vector<cplx> resid(n), gr(n);
  double prev_res = -1.0;
  int rising = 0;

  for (int t = 0;; ++t) {
    ws.apply_operator(u, resid);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      resid[i] -= b.values()[i];
      s += std::norm(resid[i]);
    }
    const double res = std::sqrt(s) / bn;
    rep.iters = t;
    rep.final_residual = res;
    if (res <= cfg.eta) {
      rep.converged = true;
      break;
    }
    if (prev_res >= 0.0 && res > prev_res) {
      if (++rising >= cfg.divergence_window)
        throw CbsDivergenceError(rep.eps, eq20_bound);
    } else {
      rising = 0;
    }
    prev_res = res;
    if (t == cfg.max_iters) break;

    ws.apply_green(resid, rep.k0_sq, rep.eps, gr);
    for (std::size_t i = 0; i < n; ++i) u[i] -= precond[i] * gr[i];
  }

  return {ComplexWavefield(model.grid(), std::move(u)), rep};
}

/// Transposed solve A^T u = b. The spectral operator is complex-symmetric
/// (in fact real), so this delegates to the forward solve; the entry point
/// exists so a non-symmetric discretization could be substituted.
inline std::pair<ComplexWavefield, CbsSolveReport> solve_helmholtz_transposed(
    const SquaredSlownessModel& model, double omega, const ComplexWavefield& b,
    const CbsConfig& cfg) {
  return solve_helmholtz(model, omega, b, cfg);
}

/// Helmholtz solver handle backed by the Born series; satisfies the solver
/// interface the inversion engine is templated on.
struct CbsHelmholtzSolver {
  CbsConfig cfg;

  ComplexWavefield solve(const SquaredSlownessModel& model, double omega,
                         const ComplexWavefield& b) const {
    return solve_helmholtz(model, omega, b, cfg).first;
  }
  ComplexWavefield solve_transposed(const SquaredSlownessModel& model,
                                    double omega,
                                    const ComplexWavefield& b) const {
    return solve_helmholtz_transposed(model, omega, b, cfg).first;
  }
};

}  // namespace cbswri
