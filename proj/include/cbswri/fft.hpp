#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "cbswri/grid.hpp"

namespace cbswri {

namespace detail {
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// In-place complex 2D FFT workspace for one padded grid. Plan creation is
/// serialized globally (FFTW planning is not thread-safe); execution on the
/// instance's own buffer is. One instance per concurrent solve.
class Fft2d {
 public:
  explicit Fft2d(const Grid2D& grid) : n_(grid.padded_count()) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    // FFTW_ESTIMATE keeps planning deterministic and cheap.
    fwd_ = fftw_plan_dft_2d(grid.nzp(), grid.nxp(), buf_, buf_, FFTW_FORWARD,
                            FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(grid.nzp(), grid.nxp(), buf_, buf_, FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  }

  ~Fft2d() {
    std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
  }

  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  std::size_t size() const { return n_; }
  std::complex<double>* buffer() {
    return reinterpret_cast<std::complex<double>*>(buf_);
  }

  void load(const std::vector<std::complex<double>>& src) {
    std::copy(src.begin(), src.end(), buffer());
  }
  void store(std::vector<std::complex<double>>& dst) const {
    const auto* b = reinterpret_cast<const std::complex<double>*>(buf_);
    std::copy(b, b + n_, dst.begin());
  }

  void forward() { fftw_execute(fwd_); }

  /// Inverse transform, normalized by 1/N so forward + inverse is identity.
  void inverse() {
    fftw_execute(inv_);
    const double scale = 1.0 / static_cast<double>(n_);
    auto* b = buffer();
    for (std::size_t i = 0; i < n_; ++i) b[i] *= scale;
  }

 private:
  std::size_t n_;
  fftw_complex* buf_;
  fftw_plan fwd_, inv_;
};

/// |k|^2 table on the padded grid, in the FFT's native mode ordering,
/// built from the standard discrete wavenumbers 2*pi*f with
/// f = i/(n dx) for i <= n/2 and (i-n)/(n dx) beyond.
inline std::vector<double> squared_wavenumbers(const Grid2D& grid) {
  const int nxp = grid.nxp(), nzp = grid.nzp();
  auto axis = [&](int n) {
    std::vector<double> k(n);
    const double dk = 2.0 * M_PI / (n * grid.dx);
    for (int i = 0; i < n; ++i) {
      const int m = (i <= n / 2) ? i : i - n;
      k[i] = dk * m;
    }
    return k;
  };
  const std::vector<double> kx = axis(nxp), kz = axis(nzp);
  std::vector<double> ksq(grid.padded_count());
  for (int iz = 0; iz < nzp; ++iz)
    for (int ix = 0; ix < nxp; ++ix)
      ksq[grid.padded_index(ix, iz)] = kx[ix] * kx[ix] + kz[iz] * kz[iz];
  return ksq;
}

}  // namespace cbswri
