#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace specklepuf::detail {

namespace {

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

struct PlanDestroy {
  void operator()(fftw_plan_s* p) const noexcept {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace

void fft2d(Grid<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0) return;

  // Always run on an fftw_malloc buffer so SIMD alignment, and hence the
  // chosen codelets and rounding, is the same on every call.
  std::unique_ptr<fftw_complex, FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  auto* as_std = reinterpret_cast<std::complex<double>*>(buf.get());
  std::copy(data.storage().begin(), data.storage().end(), as_std);

  std::unique_ptr<fftw_plan_s, PlanDestroy> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_2d(static_cast<int>(data.rows()), static_cast<int>(data.cols()),
                                buf.get(), buf.get(), inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) as_std[i] *= scale;
  }
  std::copy(as_std, as_std + n, data.storage().begin());
}

double fft_frequency(std::size_t k, std::size_t n) noexcept {
  const auto signed_k = (k <= (n - 1) / 2) ? static_cast<double>(k)
                                           : static_cast<double>(k) - static_cast<double>(n);
  return signed_k / static_cast<double>(n);
}

}  // namespace specklepuf::detail
