#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace cbswri;
using testutil::random_field;
using testutil::random_smooth_model;

namespace {
constexpr double kM0 = 2.5e-7;  // 2000 m/s background
}

TEST_CASE("assemble_helmholtz matches the spectral operator") {
  Grid2D g(4, 4, 10.0, 0);
  const double omega = 2.0 * M_PI * 20.0;
  SquaredSlownessModel m = SquaredSlownessModel::homogeneous(g, kM0);
  const DenseOperator A = assemble_helmholtz(m, omega);

  SECTION("diagonal equals w^2 m plus the circulant Laplacian diagonal") {
    const auto ksq = squared_wavenumbers(g);
    double lap_diag = 0.0;
    for (double k : ksq) lap_diag -= k;
    lap_diag /= static_cast<double>(ksq.size());
    for (std::size_t i = 0; i < A.n; ++i) {
      CHECK(std::abs(A.entries(i, i).real() - (omega * omega * kM0 + lap_diag)) <
            1e-9 * std::abs(lap_diag));
      CHECK(std::abs(A.entries(i, i).imag()) < 1e-9 * std::abs(lap_diag));
    }
  }

  SECTION("complex symmetry") {
    const double scale = A.entries.cwiseAbs().maxCoeff();
    const double asym = (A.entries - A.entries.transpose()).cwiseAbs().maxCoeff();
    CHECK(asym <= 1e-12 * scale);
  }

  SECTION("matrix-vector product agrees with apply_helmholtz") {
    const ComplexWavefield u = random_field(g, 5);
    const ComplexWavefield au = apply_helmholtz(m, omega, u);
    Eigen::Map<const Eigen::VectorXcd> uv(u.values().data(), A.n);
    Eigen::VectorXcd prod = A.entries * uv;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < A.n; ++i) {
      num += std::norm(prod(i) - au.values()[i]);
      den += std::norm(au.values()[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-12);
  }

  SECTION("cap is enforced") {
    Grid2D big(80, 80, 10.0, 0);
    SquaredSlownessModel mb = SquaredSlownessModel::homogeneous(big, kM0);
    CHECK_THROWS_AS(assemble_helmholtz(mb, omega, 4096), std::invalid_argument);
  }
}

TEST_CASE("direct_solve") {
  Grid2D g(4, 4, 10.0, 0);

  SECTION("identity-scaled operator divides by the scale") {
    DenseOperator op;
    op.n = g.padded_count();
    op.entries = 3.0 * Eigen::MatrixXcd::Identity(op.n, op.n);
    const ComplexWavefield b = random_field(g, 9);
    const ComplexWavefield u = direct_solve(op, b);
    for (std::size_t i = 0; i < op.n; ++i)
      CHECK(std::abs(u.values()[i] - b.values()[i] / 3.0) < 1e-14);
  }

  SECTION("solution is linear in the right-hand side") {
    const double omega = 2.0 * M_PI * 20.0;
    SquaredSlownessModel m = random_smooth_model(g, kM0, 0.2, 17);
    const DenseOperator A = assemble_helmholtz(m, omega);
    const ComplexWavefield b = random_field(g, 13);
    const ComplexWavefield u1 = direct_solve(A, b);
    const ComplexWavefield u2 = direct_solve(A, 2.0 * b);
    CHECK(rel_diff(u2, 2.0 * u1) < 1e-13);
  }

  SECTION("residual meets the direct-method bar") {
    const double omega = 2.0 * M_PI * 20.0;
    SquaredSlownessModel m = random_smooth_model(g, kM0, 0.2, 23);
    const DenseOperator A = assemble_helmholtz(m, omega);
    const ComplexWavefield b = random_field(g, 29);
    const ComplexWavefield u = direct_solve(A, b);
    Eigen::Map<const Eigen::VectorXcd> uv(u.values().data(), A.n);
    Eigen::Map<const Eigen::VectorXcd> bv(b.values().data(), A.n);
    CHECK((A.entries * uv - bv).norm() / bv.norm() <= 1e-12);
  }
}

TEST_CASE("solve_augmented_normal") {
  Grid2D g(6, 6, 10.0, 1);
  const double omega = 2.0 * M_PI * 18.0;
  SquaredSlownessModel m = random_smooth_model(g, kM0, 0.15, 31);
  AcquisitionGeometry geom;
  geom.sources.push_back({20.0, 20.0});
  geom.receivers = {{0.0, 10.0}, {10.0, 50.0}, {50.0, 30.0}, {40.0, 0.0}};
  ObservationOperator P(g, geom);
  const ComplexWavefield rhs_wave = random_field(g, 37);

  SECTION("lam1 = 0 reduces to the plain direct solve") {
    const DenseOperator A = assemble_helmholtz(m, omega);
    const ComplexWavefield u_direct = direct_solve(A, rhs_wave);
    const ComplexWavefield u_aug = solve_augmented_normal(
        m, omega, P, 1.0, 0.0, rhs_wave, std::vector<cplx>(P.nr(), cplx{}));
    CHECK(rel_diff(u_aug, u_direct) < 1e-9);
  }

  SECTION("consistent data leaves the exact wavefield optimal") {
    const DenseOperator A = assemble_helmholtz(m, omega);
    const ComplexWavefield u_direct = direct_solve(A, rhs_wave);
    const std::vector<cplx> d = sample(u_direct, P);
    const ComplexWavefield u_aug =
        solve_augmented_normal(m, omega, P, 1.0, 2.5, rhs_wave, d);
    CHECK(rel_diff(u_aug, u_direct) < 1e-9);
  }
}

TEST_CASE("largest data-normal eigenvalue") {
  Grid2D g(10, 10, 10.0, 0);
  const double omega = 2.0 * M_PI * 15.0;
  SquaredSlownessModel m = random_smooth_model(g, kM0, 0.2, 41);

  SECTION("single receiver equals the squared norm of one Green row") {
    AcquisitionGeometry geom;
    geom.sources.push_back({0.0, 0.0});
    geom.receivers = {{30.0, 40.0}};
    ObservationOperator P(g, geom);
    const DenseOperator A = assemble_helmholtz(m, omega);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A.entries);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(A.n);
    e(P.nodes()[0]) = 1.0;
    const double row_norm_sq = lu.solve(e).squaredNorm();
    const double eig = largest_eig_data_normal_dense(m, omega, P);
    CHECK(eig == Catch::Approx(row_norm_sq).epsilon(1e-10));
  }

  SECTION("duplicating a receiver doubles the eigenvalue") {
    AcquisitionGeometry geom;
    geom.sources.push_back({0.0, 0.0});
    geom.receivers = {{30.0, 40.0}};
    ObservationOperator P1(g, geom);
    geom.receivers.push_back({30.0, 40.0});
    ObservationOperator P2(g, geom);
    const double e1 = largest_eig_data_normal_dense(m, omega, P1);
    const double e2 = largest_eig_data_normal_dense(m, omega, P2);
    CHECK(e2 == Catch::Approx(2.0 * e1).epsilon(1e-9));
  }

  SECTION("power iteration agrees with the dense decomposition") {
    AcquisitionGeometry geom;
    geom.sources.push_back({0.0, 0.0});
    geom.receivers = {{0.0, 10.0}, {20.0, 60.0}, {80.0, 30.0}, {50.0, 90.0}};
    ObservationOperator P(g, geom);
    const double dense = largest_eig_data_normal_dense(m, omega, P);
    OracleHelmholtzSolver oracle;
    const double power = largest_eig_data_normal(m, omega, P, oracle, 1e-4, 200);
    CHECK(power == Catch::Approx(dense).epsilon(1e-3));
  }
}
