#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace nilwalk {

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  nlohmann::json to_json() const {
    return {{"mean", mean}, {"std_error", std_error}, {"samples", samples}, {"seed", seed}};
  }
};

struct ComplexEstimate {
  std::complex<double> mean;
  double std_error = 0.0;  // of the complex mean, sqrt(se_re^2 + se_im^2)
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool exact = false;
};

// Running mean and centered second moment with the pairwise merge of Chan et al.
class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  void merge(const Accumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? std::max(0.0, m2_ / static_cast<double>(n_ - 1)) : 0.0; }
  double std_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

  EstimateWithError estimate(std::uint64_t seed) const { return {mean_, std_error(), n_, seed}; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct ComplexAccumulator {
  Accumulator re, im;
  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  void merge(const ComplexAccumulator& o) {
    re.merge(o.re);
    im.merge(o.im);
  }
  std::uint64_t count() const { return re.count(); }
  ComplexEstimate estimate(std::uint64_t seed) const {
    return {{re.mean(), im.mean()}, std::hypot(re.std_error(), im.std_error()), re.count(), seed, false};
  }
};

inline constexpr std::uint64_t kChunkSize = 4096;

// Runs per_sample(index, acc) for every index in [begin, end). Samples are
// grouped in fixed chunks, each filled by one worker, and chunk results are
// merged in index order, so the result does not depend on `threads`.
template <class Acc, class F>
Acc run_chunked(std::uint64_t begin, std::uint64_t end, int threads, F&& per_sample) {
  if (end <= begin) return Acc{};
  const std::uint64_t chunks = (end - begin + kChunkSize - 1) / kChunkSize;
  std::vector<Acc> parts(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        const std::uint64_t lo = begin + c * kChunkSize, hi = std::min(end, lo + kChunkSize);
        for (std::uint64_t i = lo; i < hi; ++i) per_sample(i, parts[c]);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next = chunks;
    }
  };
  const int t = static_cast<int>(std::clamp<std::uint64_t>(threads < 1 ? 1 : threads, 1, chunks));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  Acc total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace nilwalk
