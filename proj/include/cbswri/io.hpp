#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbswri/acquisition.hpp"
#include "cbswri/grid.hpp"
#include "cbswri/wavefield.hpp"

namespace cbswri {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

constexpr char kGridMagic[8] = {'C', 'B', 'S', 'W', 'R', 'I', '0', '1'};

template <class T>
void put_le(std::ostream& os, T v) {
  // Host is little-endian; raw bytes are the wire format.
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("grid file truncated");
  return v;
}

}  // namespace detail

/// In-memory image of a binary grid file: magic "CBSWRI01", little-endian
/// u32 nx, u32 nz, f64 dx, u32 ncomp (1 real / 2 complex), then row-major
/// f64 values (real) or interleaved (re, im) pairs.
struct GridFile {
  std::uint32_t nx = 0;
  std::uint32_t nz = 0;
  double dx = 0.0;
  std::uint32_t ncomp = 1;
  std::vector<double> real_values;
  std::vector<cplx> complex_values;
};

inline void write_grid_file(const std::string& path, std::uint32_t nx,
                            std::uint32_t nz, double dx,
                            const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(nx) * nz)
    throw IoError("write_grid_file: size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(detail::kGridMagic, 8);
  detail::put_le<std::uint32_t>(os, nx);
  detail::put_le<std::uint32_t>(os, nz);
  detail::put_le<double>(os, dx);
  detail::put_le<std::uint32_t>(os, 1);
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!os) throw IoError("write failed: " + path);
}

inline void write_grid_file(const std::string& path, std::uint32_t nx,
                            std::uint32_t nz, double dx,
                            const std::vector<cplx>& values) {
  if (values.size() != static_cast<std::size_t>(nx) * nz)
    throw IoError("write_grid_file: size mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(detail::kGridMagic, 8);
  detail::put_le<std::uint32_t>(os, nx);
  detail::put_le<std::uint32_t>(os, nz);
  detail::put_le<double>(os, dx);
  detail::put_le<std::uint32_t>(os, 2);
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(cplx)));
  if (!os) throw IoError("write failed: " + path);
}

inline GridFile read_grid_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, detail::kGridMagic, 8) != 0)
    throw IoError(path + ": not a grid file (bad magic)");
  GridFile g;
  g.nx = detail::get_le<std::uint32_t>(is);
  g.nz = detail::get_le<std::uint32_t>(is);
  g.dx = detail::get_le<double>(is);
  g.ncomp = detail::get_le<std::uint32_t>(is);
  if (g.ncomp != 1 && g.ncomp != 2) throw IoError(path + ": bad ncomp");
  const std::size_t n = static_cast<std::size_t>(g.nx) * g.nz;
  if (g.ncomp == 1) {
    g.real_values.resize(n);
    is.read(reinterpret_cast<char*>(g.real_values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  } else {
    g.complex_values.resize(n);
    is.read(reinterpret_cast<char*>(g.complex_values.data()),
            static_cast<std::streamsize>(n * sizeof(cplx)));
  }
  if (!is) throw IoError(path + ": truncated data");
  return g;
}

/// Geometry text format: one "S x z" or "R x z" line per element, meters.
/// Blank lines and '#' comments are skipped.
inline AcquisitionGeometry read_geometry_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  AcquisitionGeometry geom;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    double x, z;
    if (!(ls >> x >> z) || (tag != "S" && tag != "R"))
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 'S x z' or 'R x z'");
    if (tag == "S")
      geom.sources.push_back({x, z});
    else
      geom.receivers.push_back({x, z});
  }
  return geom;
}

inline void write_geometry_file(const std::string& path,
                                const AcquisitionGeometry& geom) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  for (const auto& p : geom.sources) os << "S " << p.x << " " << p.z << "\n";
  for (const auto& p : geom.receivers) os << "R " << p.x << " " << p.z << "\n";
}

/// 8-bit binary portable graymap, min-max normalized; a constant field maps
/// to mid-gray 128.
inline void write_pgm(const std::string& path, std::uint32_t nx,
                      std::uint32_t nz, const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(nx) * nz)
    throw IoError("write_pgm: size mismatch");
  double lo = values[0], hi = values[0];
  for (double v : values) {
    if (!std::isfinite(v)) throw IoError("write_pgm: non-finite data");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "P5\n" << nx << " " << nz << "\n255\n";
  std::vector<unsigned char> row(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    row[i] = (hi > lo) ? static_cast<unsigned char>(
                             std::lround(255.0 * (values[i] - lo) / (hi - lo)))
                       : static_cast<unsigned char>(128);
  }
  os.write(reinterpret_cast<const char*>(row.data()),
           static_cast<std::streamsize>(row.size()));
  if (!os) throw IoError("write failed: " + path);
}

/// Minimal RFC-4180 CSV writer: comma separators, CRLF row endings, quoting
/// only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : os_(path) {
    if (!os_) throw IoError("cannot open " + path + " for writing");
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << escape(cells[i]);
    }
    os_ << "\r\n";
  }

 private:
  static std::string escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
    return out;
  }
  std::ofstream os_;
};

inline std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    const std::streamsize n = is.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!is) break;
  }
  return h;
}

/// Compact frequency tag used in data file names: fixed six decimals with
/// trailing zeros kept, e.g. 1.500000.
inline std::string freq_tag(double f_hz) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", f_hz);
  return buf;
}

inline std::string data_file_name(double f_hz) {
  return "data_" + freq_tag(f_hz) + "Hz.grid";
}

}  // namespace cbswri
