#pragma once

// Thin RAII layer over FFTW. Buffers are always fftw_malloc'd so plans see
// the same alignment on every call and results are bit-reproducible.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace qsound::sonify::detail {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

/// Unnormalized complex transform with exponent sign +1 (FFTW_BACKWARD).
class BackwardDft {
 public:
  explicit BackwardDft(std::size_t n);
  ~BackwardDft();
  BackwardDft(const BackwardDft&) = delete;
  BackwardDft& operator=(const BackwardDft&) = delete;

  std::size_t size() const { return n_; }
  void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  std::size_t n_;
  FftwBuffer<fftw_complex> in_;
  FftwBuffer<fftw_complex> out_;
  fftw_plan plan_ = nullptr;
};

/// Real-input forward transform returning bins 0..n/2.
class RealForwardDft {
 public:
  explicit RealForwardDft(std::size_t n);
  ~RealForwardDft();
  RealForwardDft(const RealForwardDft&) = delete;
  RealForwardDft& operator=(const RealForwardDft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }
  void execute(std::span<const double> in, std::span<std::complex<double>> out);

 private:
  std::size_t n_;
  FftwBuffer<double> in_;
  FftwBuffer<fftw_complex> out_;
  fftw_plan plan_ = nullptr;
};

}  // namespace qsound::sonify::detail
