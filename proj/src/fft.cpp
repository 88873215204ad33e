#include "modvar/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "modvar/error.hpp"

namespace modvar::fft {

namespace {

// fftw_plan_* is not thread safe; fftw_execute_dft on a cached plan is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n1, std::size_t n2, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(n1, n2, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(n1 * n2);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = n2 == 0
                         ? fftw_plan_dft_1d(static_cast<int>(n1), buf, buf, sign, flags)
                         : fftw_plan_dft_2d(static_cast<int>(n1), static_cast<int>(n2), buf, buf,
                                            sign, flags);
    require(plan != nullptr, ErrorCode::invalid_argument, "fft: planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(std::span<cplx> data, std::size_t n1, std::size_t n2, int sign) {
  const std::size_t total = n2 == 0 ? n1 : n1 * n2;
  require(data.size() == total && total > 0, ErrorCode::invalid_argument, "fft: size mismatch");
  fftw_plan plan = cache().get(n1, n2, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(total));
  for (auto& v : data) v *= scale;
}

}  // namespace

void forward(std::span<cplx> data) { run(data, data.size(), 0, FFTW_FORWARD); }
void inverse(std::span<cplx> data) { run(data, data.size(), 0, FFTW_BACKWARD); }

void forward_2d(std::span<cplx> data, std::size_t n1, std::size_t n2) {
  run(data, n1, n2, FFTW_FORWARD);
}
void inverse_2d(std::span<cplx> data, std::size_t n1, std::size_t n2) {
  run(data, n1, n2, FFTW_BACKWARD);
}

}  // namespace modvar::fft
