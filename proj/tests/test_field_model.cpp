#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace cbswri;
using testutil::random_field;

TEST_CASE("Grid2D validates its invariants") {
  CHECK_THROWS_AS(Grid2D(3, 8, 10.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(8, 3, 10.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(8, 8, 0.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(Grid2D(8, 8, 10.0, -1), std::invalid_argument);
  Grid2D g(8, 6, 10.0, 2);
  CHECK(g.nxp() == 12);
  CHECK(g.nzp() == 10);
  CHECK(g.interior_count() == 48);
  CHECK(g.padded_count() == 120);
}

TEST_CASE("types reject non-finite values at construction") {
  Grid2D g(4, 4, 5.0, 0);
  std::vector<double> bad(g.interior_count(), 1e-6);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SquaredSlownessModel(g, bad, 1e-7, 1e-5),
                  std::invalid_argument);

  std::vector<cplx> badf(g.padded_count(), cplx{0.0, 0.0});
  badf[1] = cplx(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_THROWS_AS(ComplexWavefield(g, badf), std::invalid_argument);

  std::vector<cplx> badd(4, cplx{0.0, 0.0});
  badd[2] = cplx(0.0, std::numeric_limits<double>::quiet_NaN());
  CHECK_THROWS_AS(DataMatrix(1.0, 2, 2, badd), std::invalid_argument);
}

TEST_CASE("model bounds are enforced") {
  Grid2D g(4, 4, 5.0, 0);
  std::vector<double> v(g.interior_count(), 2.0e-7);
  CHECK_THROWS_AS(SquaredSlownessModel(g, v, 3.0e-7, 4.0e-7),
                  std::invalid_argument);
  CHECK_THROWS_AS(SquaredSlownessModel(g, v, 0.0, 4.0e-7),
                  std::invalid_argument);
  CHECK_NOTHROW(SquaredSlownessModel(g, v, 1.0e-7, 4.0e-7));
}

TEST_CASE("sample reads receiver nodes") {
  Grid2D g(8, 8, 10.0, 1);
  AcquisitionGeometry geom;
  geom.sources.push_back({0.0, 0.0});
  geom.receivers = {{10.0, 20.0}, {50.0, 70.0}, {30.0, 0.0}};
  ObservationOperator P(g, geom);

  SECTION("zero wavefield samples to zero") {
    const auto v = sample(ComplexWavefield::zeros(g), P);
    for (const auto& x : v) CHECK(x == cplx{0.0, 0.0});
  }

  SECTION("unit wavefield samples to ones") {
    std::vector<cplx> ones(g.padded_count(), cplx{1.0, 0.0});
    const auto v = sample(ComplexWavefield(g, ones), P);
    for (const auto& x : v) CHECK(x == cplx{1.0, 0.0});
  }

  SECTION("random field samples by direct indexing") {
    const ComplexWavefield f = random_field(g, 42);
    const auto v = sample(f, P);
    CHECK(v[0] == f.at_interior(1, 2));
    CHECK(v[1] == f.at_interior(5, 7));
    CHECK(v[2] == f.at_interior(3, 0));
  }
}

TEST_CASE("inject is the adjoint point scatter") {
  Grid2D g(8, 8, 10.0, 2);
  AcquisitionGeometry geom;
  geom.sources.push_back({0.0, 0.0});
  geom.receivers = {{10.0, 20.0}, {50.0, 70.0}, {0.0, 40.0}};
  ObservationOperator P(g, geom);

  SECTION("zero data injects the zero field") {
    const auto f = inject(std::vector<cplx>(3, cplx{0.0, 0.0}), P);
    CHECK(f.norm2() == 0.0);
  }

  SECTION("single receiver injects a delta") {
    AcquisitionGeometry one;
    one.sources.push_back({0.0, 0.0});
    one.receivers = {{10.0, 20.0}};
    ObservationOperator P1(g, one);
    const auto f = inject({cplx{1.0, 0.0}}, P1);
    CHECK(f.at_interior(1, 2) == cplx{1.0, 0.0});
    CHECK(f.norm2() == 1.0);
  }

  SECTION("sample after inject recovers the data exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(3);
    for (auto& x : v) x = cplx(u(rng), u(rng));
    const auto round = sample(inject(v, P), P);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(round[i] == v[i]);
  }

  SECTION("inject after sample is idempotent") {
    const ComplexWavefield f = random_field(g, 3);
    const ComplexWavefield proj = inject(sample(f, P), P);
    const ComplexWavefield proj2 = inject(sample(proj, P), P);
    CHECK(rel_diff(proj2, proj) == 0.0);
  }

  SECTION("length mismatch is a hard error") {
    CHECK_THROWS_AS(inject(std::vector<cplx>(2, cplx{0.0, 0.0}), P),
                    std::invalid_argument);
  }
}

TEST_CASE("positions snap to the nearest node and must be interior") {
  Grid2D g(8, 8, 10.0, 0);
  auto [ix, iz] = snap_to_node(g, {14.9, 25.1});
  CHECK(ix == 1);
  CHECK(iz == 3);
  CHECK_THROWS_AS(snap_to_node(g, {-6.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(snap_to_node(g, {0.0, 76.0}), std::invalid_argument);
}

TEST_CASE("pad_extend replicates edges") {
  SECTION("pad zero is the identity") {
    Grid2D g(4, 4, 5.0, 0);
    std::vector<double> v(16);
    for (int i = 0; i < 16; ++i) v[i] = 1.0 + i;
    SquaredSlownessModel m(g, v, 0.5, 20.0);
    CHECK(pad_extend(m) == v);
  }

  SECTION("homogeneous model stays homogeneous") {
    Grid2D g(5, 4, 5.0, 3);
    SquaredSlownessModel m = SquaredSlownessModel::homogeneous(g, 2.5e-7);
    const auto p = pad_extend(m);
    for (double x : p) CHECK(x == 2.5e-7);
  }

  SECTION("4x4 ramp with pad 2 matches the hand-built array") {
    Grid2D g(4, 4, 5.0, 2);
    std::vector<double> v(16);
    for (int iz = 0; iz < 4; ++iz)
      for (int ix = 0; ix < 4; ++ix) v[g.interior_index(ix, iz)] = 1.0 + ix + 4 * iz;
    SquaredSlownessModel m(g, v, 0.5, 20.0);
    const std::vector<double> expected = {
        1,  1,  1,  2,  3,  4,  4,  4,
        1,  1,  1,  2,  3,  4,  4,  4,
        1,  1,  1,  2,  3,  4,  4,  4,
        5,  5,  5,  6,  7,  8,  8,  8,
        9,  9,  9,  10, 11, 12, 12, 12,
        13, 13, 13, 14, 15, 16, 16, 16,
        13, 13, 13, 14, 15, 16, 16, 16,
        13, 13, 13, 14, 15, 16, 16, 16,
    };
    CHECK(pad_extend(m) == expected);
  }

  SECTION("replication preserves min and max") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
      Grid2D g(4 + trial, 6, 5.0, 1 + trial);
      std::vector<double> v(g.interior_count());
      for (auto& x : v) x = u(rng) * 1e-7;
      SquaredSlownessModel m(g, v, 0.9e-7, 2.1e-7);
      const auto p = pad_extend(m);
      CHECK(*std::min_element(p.begin(), p.end()) == m.min_value());
      CHECK(*std::max_element(p.begin(), p.end()) == m.max_value());
    }
  }
}

TEST_CASE("grid sampling guidance warns past a quarter wavelength") {
  Grid2D g(8, 8, 100.0, 0);
  // v = 2000 m/s everywhere; at 10 Hz the minimum wavelength is 200 m.
  SquaredSlownessModel m = SquaredSlownessModel::homogeneous(g, 2.5e-7);
  CHECK(grid_sampling_warning(m, 10.0).has_value());
  CHECK(!grid_sampling_warning(m, 0.4).has_value());
}

TEST_CASE("geometry requires sources and receivers") {
  AcquisitionGeometry geom;
  CHECK_THROWS_AS(geom.validate(), std::invalid_argument);
  geom.sources.push_back({0.0, 0.0});
  CHECK_THROWS_AS(geom.validate(), std::invalid_argument);
  geom.receivers.push_back({1.0, 1.0});
  CHECK_NOTHROW(geom.validate());
}
