#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include "qsound/error.hpp"

namespace qsound::sonify::detail {
namespace {

// The FFTW planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
FftwBuffer<T> allocate(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (p == nullptr) throw Error("fftw_malloc failed");
  return FftwBuffer<T>(p);
}

}  // namespace

BackwardDft::BackwardDft(std::size_t n)
    : n_(n), in_(allocate<fftw_complex>(n)), out_(allocate<fftw_complex>(n)) {
  if (n == 0) throw InvalidArgument("DFT length must be positive");
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  if (plan_ == nullptr) throw Error("FFTW planning failed");
}

BackwardDft::~BackwardDft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_);
}

void BackwardDft::execute(std::span<const std::complex<double>> in,
                          std::span<std::complex<double>> out) {
  std::memcpy(in_.get(), in.data(), sizeof(fftw_complex) * n_);
  fftw_execute(plan_);
  std::memcpy(static_cast<void*>(out.data()), out_.get(), sizeof(fftw_complex) * n_);
}

RealForwardDft::RealForwardDft(std::size_t n)
    : n_(n), in_(allocate<double>(n)), out_(allocate<fftw_complex>(n / 2 + 1)) {
  if (n == 0) throw InvalidArgument("DFT length must be positive");
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
  if (plan_ == nullptr) throw Error("FFTW planning failed");
}

RealForwardDft::~RealForwardDft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan_);
}

void RealForwardDft::execute(std::span<const double> in, std::span<std::complex<double>> out) {
  std::memcpy(in_.get(), in.data(), sizeof(double) * n_);
  fftw_execute(plan_);
  std::memcpy(static_cast<void*>(out.data()), out_.get(), sizeof(fftw_complex) * bins());
}

}  // namespace qsound::sonify::detail
