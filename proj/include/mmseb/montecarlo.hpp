#pragma once

#include <algorithm>
#include <concepts>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mmseb/errors.hpp"
#include "mmseb/rng.hpp"

namespace mmseb {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Sample budget and determinism key of a Monte Carlo run. The result is a
/// pure function of (n, seed, workers).
struct McOptions {
  std::size_t n = 500'000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
};

unsigned default_workers();

/// Mean, unbiased variance and standard error of the mean of a sample.
struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
};

SampleStats sample_stats(std::span<const double> values);

/// Unbiased variance of `values` together with its moment-based standard
/// error sqrt((m4 - s^4 (n-3)/(n-1)) / n).
McEstimate sample_variance_estimate(std::span<const double> values, std::uint64_t seed);

/// Regression (control-variate) estimate of E[f] given paired draws (f_i, g_i)
/// and the exact E[g]. The standard error comes from the residual f - c g.
McEstimate control_variate_mean(std::span<const double> f, std::span<const double> g,
                                double g_mean, std::uint64_t seed);

/// Evaluates `draw(rng)` n times. The n draws are split into `workers`
/// contiguous chunks; chunk c uses Rng(split_seed(seed, c)), so the output
/// depends only on (n, seed, workers). Throws NonFiniteSample on NaN/inf.
template <class Draw>
std::vector<double> draw_samples(const Draw& draw, std::size_t n, std::uint64_t seed,
                                 unsigned workers = 1) {
  std::vector<double> out(n);
  const unsigned chunks = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  auto run_chunk = [&](unsigned c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    Rng rng(split_seed(seed, c));
    for (std::size_t i = begin; i < end; ++i) out[i] = draw(rng);
  };
  if (chunks == 1) {
    run_chunk(0);
  } else {
    std::vector<std::exception_ptr> errors(chunks);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (unsigned c = 0; c < chunks; ++c) {
      pool.emplace_back([&, c] {
        try {
          run_chunk(c);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(out[i]))
      throw NonFiniteSample("draw " + std::to_string(i) + " produced " + std::to_string(out[i]));
  }
  return out;
}

/// Runs body(i) for i in [0, n) on `workers` threads, each owning a
/// contiguous block of indices. Exceptions are rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, const Body& body) {
  const unsigned chunks =
      std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (chunks == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (unsigned c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c] {
      try {
        for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) body(i);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <class Draw>
  requires std::invocable<const Draw&, Rng&>
McEstimate mc_mean(const Draw& draw, std::size_t n, std::uint64_t seed, unsigned workers = 1) {
  if (n < 2) throw InvalidArgument("mc_mean needs n >= 2");
  const auto values = draw_samples(draw, n, seed, workers);
  const auto stats = sample_stats(values);
  return {stats.mean, stats.std_error, n, seed};
}

/// f(sampler(rng)) form of mc_mean.
template <class F, class Sampler>
  requires std::invocable<const Sampler&, Rng&>
McEstimate mc_mean(const F& f, const Sampler& sampler, std::size_t n, std::uint64_t seed,
                   unsigned workers = 1) {
  return mc_mean([&](Rng& rng) { return static_cast<double>(f(sampler(rng))); }, n, seed, workers);
}

template <class Draw>
  requires std::invocable<const Draw&, Rng&>
McEstimate mc_variance(const Draw& draw, std::size_t n, std::uint64_t seed, unsigned workers = 1) {
  if (n < 2) throw InvalidArgument("mc_variance needs n >= 2");
  const auto values = draw_samples(draw, n, seed, workers);
  return sample_variance_estimate(values, seed);
}

template <class F, class Sampler>
  requires std::invocable<const Sampler&, Rng&>
McEstimate mc_variance(const F& f, const Sampler& sampler, std::size_t n, std::uint64_t seed,
                       unsigned workers = 1) {
  return mc_variance([&](Rng& rng) { return static_cast<double>(f(sampler(rng))); }, n, seed,
                     workers);
}

}  // namespace mmseb
