#include "pulseforge/pulsegen/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "pulseforge/common.hpp"

namespace pulseforge::pulsegen {

namespace {

// FFTW planning is not thread-safe; execution of a plan on its own buffers is.
std::mutex plan_mutex;

struct PlanCache {
  std::map<std::pair<int, int>, fftw_plan> plans;  // (n, sign) -> plan
  std::vector<std::complex<double>> buf_in, buf_out;

  ~PlanCache() {
    std::lock_guard<std::mutex> lock(plan_mutex);
    for (auto& [k, p] : plans) fftw_destroy_plan(p);
  }

  fftw_plan get(int n, int sign) {
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    std::lock_guard<std::mutex> lock(plan_mutex);
    buf_in.resize(n);
    buf_out.resize(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf_in.data()),
                                   reinterpret_cast<fftw_complex*>(buf_out.data()), sign,
                                   FFTW_ESTIMATE);
    if (!p) throw Error("fftw_plan_dft_1d failed");
    plans.emplace(std::make_pair(n, sign), p);
    return p;
  }
};

thread_local PlanCache cache;

// DFT with both indices offset by n/2:
//   out[j] = sum_k in[k] exp(sign * 2 pi i (j - H)(k - H) / n),  H = n/2.
// Equivalent to rotating input and output by H around a plain DFT.
std::vector<std::complex<double>> centered_dft(const std::vector<std::complex<double>>& in,
                                               int sign) {
  const int n = static_cast<int>(in.size());
  const int h = n / 2;
  fftw_plan plan = cache.get(n, sign);
  auto& bin = cache.buf_in;
  auto& bout = cache.buf_out;
  bin.resize(n);
  bout.resize(n);
  for (int k = 0; k < n; ++k) bin[k] = in[(k + h) % n];
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(bin.data()),
                   reinterpret_cast<fftw_complex*>(bout.data()));
  std::vector<std::complex<double>> out(n);
  for (int j = 0; j < n; ++j) out[j] = bout[(j + h) % n];
  return out;
}

}  // namespace

std::vector<std::complex<double>> time_to_freq(const std::vector<std::complex<double>>& in,
                                               double dt) {
  auto out = centered_dft(in, FFTW_FORWARD);
  for (auto& v : out) v *= dt;
  return out;
}

std::vector<std::complex<double>> freq_to_time(const std::vector<std::complex<double>>& in,
                                               double delta_omega) {
  auto out = centered_dft(in, FFTW_BACKWARD);
  const double scale = delta_omega / (2.0 * constants::pi);
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace pulseforge::pulsegen
