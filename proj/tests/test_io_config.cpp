#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace cbswri;

namespace {
std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}
}  // namespace

TEST_CASE("grid file round trip") {
  SECTION("real values") {
    const std::string path = temp_path("t_real.grid");
    std::vector<double> v(12);
    for (int i = 0; i < 12; ++i) v[i] = 0.5 * i - 3.0;
    write_grid_file(path, 4, 3, 12.5, v);
    const GridFile g = read_grid_file(path);
    CHECK(g.nx == 4);
    CHECK(g.nz == 3);
    CHECK(g.dx == 12.5);
    CHECK(g.ncomp == 1);
    CHECK(g.real_values == v);
  }

  SECTION("complex values") {
    const std::string path = temp_path("t_cplx.grid");
    std::vector<cplx> v(6);
    for (int i = 0; i < 6; ++i) v[i] = cplx(i, -i * 0.25);
    write_grid_file(path, 2, 3, 5.0, v);
    const GridFile g = read_grid_file(path);
    CHECK(g.ncomp == 2);
    CHECK(g.complex_values == v);
  }

  SECTION("binary layout is the documented one") {
    const std::string path = temp_path("t_layout.grid");
    write_grid_file(path, 1, 1, 2.0, std::vector<double>{7.0});
    std::ifstream is(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
    REQUIRE(bytes.size() == 8 + 4 + 4 + 8 + 4 + 8);
    CHECK(bytes.substr(0, 8) == "CBSWRI01");
    CHECK(static_cast<unsigned char>(bytes[8]) == 1);   // nx LE
    CHECK(static_cast<unsigned char>(bytes[12]) == 1);  // nz LE
  }

  SECTION("bad magic rejected") {
    const std::string path = temp_path("t_bad.grid");
    std::ofstream os(path, std::ios::binary);
    os << "NOTAGRID" << std::string(16, '\0');
    os.close();
    CHECK_THROWS_AS(read_grid_file(path), IoError);
  }

  SECTION("truncated file rejected") {
    const std::string path = temp_path("t_trunc.grid");
    write_grid_file(path, 4, 3, 12.5, std::vector<double>(12, 1.0));
    std::filesystem::resize_file(path, 40);
    CHECK_THROWS_AS(read_grid_file(path), IoError);
  }
}

TEST_CASE("geometry file round trip") {
  const std::string path = temp_path("t_geom.txt");
  AcquisitionGeometry geom;
  geom.sources = {{100.0, 0.0}, {200.0, 0.0}};
  geom.receivers = {{50.0, 10.0}, {150.0, 10.0}, {250.0, 10.0}};
  write_geometry_file(path, geom);
  const AcquisitionGeometry r = read_geometry_file(path);
  REQUIRE(r.ns() == 2);
  REQUIRE(r.nr() == 3);
  CHECK(r.sources[1].x == 200.0);
  CHECK(r.receivers[2].x == 250.0);

  std::ofstream os(path);
  os << "S 1.0 2.0\nQ 3.0 4.0\n";
  os.close();
  CHECK_THROWS_AS(read_geometry_file(path), IoError);
}

TEST_CASE("portable graymap emission") {
  SECTION("constant grid maps to mid-gray") {
    const std::string path = temp_path("t_const.pgm");
    write_pgm(path, 3, 2, std::vector<double>(6, 4.2));
    std::ifstream is(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
    const std::string header = "P5\n3 2\n255\n";
    REQUIRE(bytes.substr(0, header.size()) == header);
    for (std::size_t i = header.size(); i < bytes.size(); ++i)
      CHECK(static_cast<unsigned char>(bytes[i]) == 128);
  }

  SECTION("two-valued grid maps to 0 and 255") {
    const std::string path = temp_path("t_two.pgm");
    write_pgm(path, 2, 2, {1.0, 5.0, 5.0, 1.0});
    std::ifstream is(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
    const std::size_t off = bytes.size() - 4;
    CHECK(static_cast<unsigned char>(bytes[off + 0]) == 0);
    CHECK(static_cast<unsigned char>(bytes[off + 1]) == 255);
    CHECK(static_cast<unsigned char>(bytes[off + 2]) == 255);
    CHECK(static_cast<unsigned char>(bytes[off + 3]) == 0);
  }

  SECTION("ramp bytes match the hand computation") {
    const std::string path = temp_path("t_ramp.pgm");
    write_pgm(path, 4, 1, {0.0, 1.0, 2.0, 3.0});
    std::ifstream is(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)),
                      std::istreambuf_iterator<char>());
    const std::size_t off = bytes.size() - 4;
    // round(255 * v / 3): 0, 85, 170, 255
    CHECK(static_cast<unsigned char>(bytes[off + 0]) == 0);
    CHECK(static_cast<unsigned char>(bytes[off + 1]) == 85);
    CHECK(static_cast<unsigned char>(bytes[off + 2]) == 170);
    CHECK(static_cast<unsigned char>(bytes[off + 3]) == 255);
  }

  SECTION("non-finite data is an error") {
    CHECK_THROWS_AS(write_pgm(temp_path("t_nan.pgm"), 2, 1,
                              {1.0, std::numeric_limits<double>::quiet_NaN()}),
                    IoError);
  }
}

TEST_CASE("CSV writer is RFC-4180 shaped") {
  const std::string path = temp_path("t.csv");
  {
    CsvWriter csv(path);
    csv.row({"a", "b,c", "d\"e"});
    csv.row({"1", "2", "3"});
  }
  std::ifstream is(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(is)),
                    std::istreambuf_iterator<char>());
  CHECK(bytes == "a,\"b,c\",\"d\"\"e\"\r\n1,2,3\r\n");
}

TEST_CASE("run configuration parsing") {
  SECTION("values, comments and types") {
    const RunConfig cfg = RunConfig::from_string(
        "# comment\n"
        "grid.nx = 64\n"
        "grid.dx = 12.5  # trailing comment\n"
        "freq.paths = 1.5:2 ; 1.5:4\n"
        "forward.freqs = 1.0, 2.0, 3.5\n"
        "out.dir = /tmp/runs\n");
    CHECK(cfg.get_int("grid.nx") == 64);
    CHECK(cfg.get_double("grid.dx") == 12.5);
    CHECK(cfg.get_string("out.dir") == "/tmp/runs");
    const auto paths = cfg.get_pairs("freq.paths");
    REQUIRE(paths.size() == 2);
    CHECK(paths[1].second == 4.0);
    const auto freqs = cfg.get_list("forward.freqs");
    REQUIRE(freqs.size() == 3);
    CHECK(freqs[2] == 3.5);
    CHECK(cfg.get_int("grid.nz", 32) == 32);
  }

  SECTION("unknown keys are rejected") {
    CHECK_THROWS_AS(RunConfig::from_string("grid.nx = 4\nbogus.key = 1\n"),
                    ConfigError);
  }

  SECTION("duplicate keys are rejected") {
    CHECK_THROWS_AS(RunConfig::from_string("grid.nx = 4\ngrid.nx = 5\n"),
                    ConfigError);
  }

  SECTION("malformed lines and numbers are rejected") {
    CHECK_THROWS_AS(RunConfig::from_string("grid.nx\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_string("grid.nx = twelve\n").get_int("grid.nx"),
                    ConfigError);
  }

  SECTION("missing required key raises") {
    const RunConfig cfg = RunConfig::from_string("");
    CHECK_THROWS_AS(cfg.get_string("model.file"), ConfigError);
  }
}
