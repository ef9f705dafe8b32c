#include "lyapinit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "lyapinit/errors.hpp"

namespace lyapinit {

SampleMoments sample_moments(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw UsageError("sample moments need at least two values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double c = v - mean;
    const double c2 = c * c;
    m2 += c2;
    m3 += c2 * c;
    m4 += c2 * c2;
  }
  const double nd = static_cast<double>(n);
  SampleMoments out;
  out.mean = mean;
  out.variance = m2 / (nd - 1.0);
  const double pop_var = m2 / nd;
  if (pop_var > 0.0) {
    out.skewness = (m3 / nd) / std::pow(pop_var, 1.5);
    out.excess_kurtosis = (m4 / nd) / (pop_var * pop_var) - 3.0;
  }
  return out;
}

MCEstimate make_estimate(std::vector<double> values, bool keep_values) {
  const auto m = sample_moments(values);
  MCEstimate est;
  est.mean = m.mean;
  est.trials = values.size();
  est.std_error = std::sqrt(m.variance / static_cast<double>(values.size()));
  if (keep_values) est.per_trial_values = std::move(values);
  return est;
}

unsigned default_workers() {
  if (const char* env = std::getenv("LYAPINIT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
      // fall through to hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, begin, end] {
        try {
          for (std::size_t i = begin; i < end; ++i) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw UsageError("KS statistic needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    sup = std::max(sup, std::abs(i / na - j / nb));
  }
  return sup;
}

}  // namespace lyapinit
