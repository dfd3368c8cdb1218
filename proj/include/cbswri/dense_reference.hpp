#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <cstring>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cbswri/acquisition.hpp"
#include "cbswri/born_series.hpp"
#include "cbswri/model.hpp"
#include "cbswri/wavefield.hpp"

namespace cbswri {

/// Default cap on dense unknown counts. The dense paths exist for desk-scale
/// verification only.
constexpr std::size_t kDenseCap = 4096;

/// Explicitly assembled Helmholtz operator on the padded grid.
struct DenseOperator {
  std::size_t n = 0;
  Eigen::MatrixXcd entries;
};

namespace detail {
inline void check_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap)
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(n) +
                                " unknowns exceed the dense cap of " +
                                std::to_string(cap));
}
}  // namespace detail

/// Assembles A column by column: column j is the operator applied to the
/// j-th unit basis field, so the dense matrix agrees with the spectral
/// operator by construction.
inline DenseOperator assemble_helmholtz(const SquaredSlownessModel& model,
                                        double omega,
                                        std::size_t cap = kDenseCap) {
  const std::size_t n = model.grid().padded_count();
  detail::check_cap(n, cap, "assemble_helmholtz");
  detail::HelmholtzWorkspace ws(model, omega);
  DenseOperator op;
  op.n = n;
  op.entries.resize(n, n);
  std::vector<cplx> e(n, cplx{0.0, 0.0}), col;
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    ws.apply_operator(e, col);
    for (std::size_t i = 0; i < n; ++i) op.entries(i, j) = col[i];
    e[j] = 0.0;
  }
  return op;
}

/// Direct dense solve with one refinement pass; relative residual above
/// 1e-12 is treated as a singular operator.
inline ComplexWavefield direct_solve(const DenseOperator& op,
                                     const ComplexWavefield& b) {
  const std::size_t n = op.n;
  if (b.values().size() != n)
    throw std::invalid_argument("direct_solve: dimension mismatch");
  Eigen::Map<const Eigen::VectorXcd> bv(b.values().data(), n);
  const double bn = bv.norm();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(op.entries);
  Eigen::VectorXcd u = lu.solve(bv);
  Eigen::VectorXcd r = bv - op.entries * u;
  if (bn > 0.0 && r.norm() / bn > 1e-13) {
    u += lu.solve(r);
    r = bv - op.entries * u;
    if (r.norm() / bn > 1e-12)
      throw std::runtime_error("direct_solve: singular operator");
  }
  std::vector<cplx> out(n);
  Eigen::VectorXcd::Map(out.data(), n) = u;
  return ComplexWavefield(b.grid(), std::move(out));
}

/// Least-squares solution of the augmented system
///   minimize lam0 |rhs_wave - A u|^2 + lam1 |rhs_data - P u|^2
/// through the conjugate-transpose normal operator
/// lam0 A^H A + lam1 P^T P.
inline ComplexWavefield solve_augmented_normal(
    const SquaredSlownessModel& model, double omega,
    const ObservationOperator& P, double lam0, double lam1,
    const ComplexWavefield& rhs_wave, const std::vector<cplx>& rhs_data,
    std::size_t cap = kDenseCap) {
  const std::size_t n = model.grid().padded_count();
  detail::check_cap(n, cap, "solve_augmented_normal");
  if (!(lam0 > 0.0) || lam1 < 0.0)
    throw std::invalid_argument("solve_augmented_normal: need lam0 > 0, lam1 >= 0");
  if (rhs_data.size() != P.nodes().size())
    throw std::invalid_argument("solve_augmented_normal: data size mismatch");

  const DenseOperator A = assemble_helmholtz(model, omega, cap);
  Eigen::MatrixXcd N = lam0 * (A.entries.adjoint() * A.entries);
  for (std::size_t r = 0; r < P.nodes().size(); ++r)
    N(P.nodes()[r], P.nodes()[r]) += lam1;

  Eigen::Map<const Eigen::VectorXcd> rw(rhs_wave.values().data(), n);
  Eigen::VectorXcd rhs = lam0 * (A.entries.adjoint() * rw);
  for (std::size_t r = 0; r < P.nodes().size(); ++r)
    rhs(P.nodes()[r]) += lam1 * rhs_data[r];

  Eigen::LLT<Eigen::MatrixXcd> llt(N);
  Eigen::VectorXcd u;
  if (llt.info() == Eigen::Success) {
    u = llt.solve(rhs);
  } else {
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(N);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("solve_augmented_normal: singular normal matrix");
    u = ldlt.solve(rhs);
  }
  const double rn = (N * u - rhs).norm();
  if (rhs.norm() > 0.0 && rn / rhs.norm() > 1e-8)
    throw std::runtime_error("solve_augmented_normal: normal solve inaccurate");

  std::vector<cplx> out(n);
  Eigen::VectorXcd::Map(out.data(), n) = u;
  return ComplexWavefield(model.grid(), std::move(out));
}

/// Largest eigenvalue magnitude of the Born-series iteration operator
/// I - M G A, assembled densely.
inline double cbs_spectral_radius(const SquaredSlownessModel& model,
                                  double omega, double k0_sq, double eps,
                                  std::size_t cap = kDenseCap) {
  const std::size_t n = model.grid().padded_count();
  detail::check_cap(n, cap, "cbs_spectral_radius");
  detail::HelmholtzWorkspace ws(model, omega);

  Eigen::MatrixXcd A(n, n), G(n, n);
  std::vector<cplx> e(n, cplx{0.0, 0.0}), col;
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    ws.apply_operator(e, col);
    for (std::size_t i = 0; i < n; ++i) A(i, j) = col[i];
    ws.apply_green(e, k0_sq, eps, col);
    for (std::size_t i = 0; i < n; ++i) G(i, j) = col[i];
    e[j] = 0.0;
  }
  Eigen::MatrixXcd T = -(G * A);
  const cplx minus_i_over_eps(0.0, -1.0 / eps);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx m_i = minus_i_over_eps * cplx(ws.w2m[i] - k0_sq, eps);
    T.row(i) *= m_i;
    T(i, i) += 1.0;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(T, false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("cbs_spectral_radius: eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Largest eigenvalue of S0 S0^H with S0 = P A^{-1}, computed densely.
inline double largest_eig_data_normal_dense(const SquaredSlownessModel& model,
                                            double omega,
                                            const ObservationOperator& P,
                                            std::size_t cap = kDenseCap) {
  const std::size_t n = model.grid().padded_count();
  detail::check_cap(n, cap, "largest_eig_data_normal_dense");
  const DenseOperator A = assemble_helmholtz(model, omega, cap);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A.entries);
  const std::size_t nr = P.nodes().size();
  Eigen::MatrixXcd S(nr, n);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  for (std::size_t r = 0; r < nr; ++r) {
    e(P.nodes()[r]) = 1.0;
    // row r of S = (A^{-T} P^T e_r)^T; A is complex-symmetric.
    S.row(r) = lu.solve(e).transpose();
    e(P.nodes()[r]) = 0.0;
  }
  Eigen::MatrixXcd Q = S * S.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (Q + Q.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Largest eigenvalue of S0 S0^H by power iteration in the data space; each
/// step costs one adjoint and one forward solve. The start vector comes from
/// a fixed seed so runs are reproducible.
template <class Solver>
double largest_eig_data_normal(const SquaredSlownessModel& model, double omega,
                               const ObservationOperator& P,
                               const Solver& solver, double rel_tol = 1e-3,
                               int max_iters = 200, int* iters_out = nullptr) {
  const std::size_t nr = P.nodes().size();
  std::mt19937_64 rng(0x5eed0eb1u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> v(nr);
  for (auto& x : v) x = cplx(gauss(rng), gauss(rng));

  auto normalize = [&](std::vector<cplx>& w) {
    double s = 0.0;
    for (const auto& x : w) s += std::norm(x);
    s = std::sqrt(s);
    for (auto& x : w) x /= s;
    return s;
  };
  normalize(v);

  auto apply = [&](const std::vector<cplx>& x) {
    // S0^H x = conj(A^{-T} conj(P^T x)) handles a complex-symmetric A;
    // for the real spectral operator the conjugations are no-ops.
    ComplexWavefield t = inject(x, P);
    for (auto& c : t.mutable_values()) c = std::conj(c);
    ComplexWavefield y = solver.solve_transposed(model, omega, t);
    for (auto& c : y.mutable_values()) c = std::conj(c);
    ComplexWavefield w = solver.solve(model, omega, y);
    return sample(w, P);
  };

  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    std::vector<cplx> w = apply(v);
    // Rayleigh quotient; v is unit.
    cplx q{0.0, 0.0};
    for (std::size_t i = 0; i < nr; ++i) q += std::conj(v[i]) * w[i];
    const double est = q.real();
    normalize(w);
    v.swap(w);
    if (iters_out) *iters_out = it + 1;
    if (it > 0 && std::abs(est - lambda) <= rel_tol * std::abs(est)) {
      return est;
    }
    lambda = est;
  }
  throw std::runtime_error(
      "largest_eig_data_normal: power iteration did not converge");
}

/// Dense reference Helmholtz solver caching one LU factorization per
/// (model, omega) pair; used to replay the inversion pipeline with exact
/// inner solves on tiny grids.
class OracleHelmholtzSolver {
 public:
  explicit OracleHelmholtzSolver(std::size_t cap = kDenseCap) : cap_(cap) {}

  ComplexWavefield solve(const SquaredSlownessModel& model, double omega,
                         const ComplexWavefield& b) const {
    const auto& lu = factorization(model, omega);
    Eigen::Map<const Eigen::VectorXcd> bv(b.values().data(), b.values().size());
    Eigen::VectorXcd u = lu.solve(bv);
    std::vector<cplx> out(b.values().size());
    Eigen::VectorXcd::Map(out.data(), out.size()) = u;
    return ComplexWavefield(model.grid(), std::move(out));
  }

  ComplexWavefield solve_transposed(const SquaredSlownessModel& model,
                                    double omega,
                                    const ComplexWavefield& b) const {
    return solve(model, omega, b);  // complex-symmetric operator
  }

 private:
  using Lu = Eigen::PartialPivLU<Eigen::MatrixXcd>;

  static std::uint64_t fnv1a(const void* data, std::size_t bytes,
                             std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
    return h;
  }

  const Lu& factorization(const SquaredSlownessModel& model,
                          double omega) const {
    std::uint64_t key = fnv1a(model.values().data(),
                              model.values().size() * sizeof(double),
                              14695981039346656037ull);
    key = fnv1a(&omega, sizeof(omega), key);
    const int dims[3] = {model.grid().nx, model.grid().nz, model.grid().pad};
    key = fnv1a(dims, sizeof(dims), key);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      const DenseOperator A = assemble_helmholtz(model, omega, cap_);
      it = cache_.emplace(key, Lu(A.entries)).first;
    }
    return it->second;
  }

  std::size_t cap_;
  mutable std::map<std::uint64_t, Lu> cache_;
};

}  // namespace cbswri
