#include "deltanls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace deltanls {

namespace {

// One forward/backward plan pair per size. Plans are created with
// FFTW_UNALIGNED so they can execute on any caller buffer via
// fftw_execute_dft, which is thread safe; creation is serialized.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

PlanPair get_plans(int n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
  if (!buf) throw std::runtime_error("fftw_alloc_complex failed");
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  if (!p.forward || !p.backward) throw std::runtime_error("fftw planning failed");
  cache.emplace(n, p);
  return p;
}

}  // namespace

void dft_forward(int n, const Complex* in, Complex* out) {
  PlanPair p = get_plans(n);
  fftw_execute_dft(p.forward,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void dft_inverse(int n, const Complex* in, Complex* out) {
  PlanPair p = get_plans(n);
  fftw_execute_dft(p.backward,
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace deltanls
