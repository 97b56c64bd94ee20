#include "mmseb/montecarlo.hpp"

#include <cmath>
#include <thread>

namespace mmseb {

unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

SampleStats sample_stats(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw InvalidArgument("sample statistics need at least two values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(n - 1);
  return {mean, var, std::sqrt(var / static_cast<double>(n))};
}

McEstimate sample_variance_estimate(std::span<const double> values, std::uint64_t seed) {
  const std::size_t n = values.size();
  const auto stats = sample_stats(values);
  double m4 = 0.0;
  for (double v : values) {
    const double d2 = (v - stats.mean) * (v - stats.mean);
    m4 += d2 * d2;
  }
  const double nd = static_cast<double>(n);
  m4 /= nd;
  const double s2 = stats.variance;
  const double var_of_s2 = (m4 - s2 * s2 * (nd - 3.0) / (nd - 1.0)) / nd;
  return {s2, std::sqrt(std::max(0.0, var_of_s2)), n, seed};
}

McEstimate control_variate_mean(std::span<const double> f, std::span<const double> g,
                                double g_mean, std::uint64_t seed) {
  const std::size_t n = f.size();
  if (n < 3 || g.size() != n) throw InvalidArgument("control variate needs >= 3 paired draws");
  const auto fs = sample_stats(f);
  const auto gs = sample_stats(g);
  double cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) cov += (f[i] - fs.mean) * (g[i] - gs.mean);
  cov /= static_cast<double>(n - 1);
  const double c = gs.variance > 0.0 ? cov / gs.variance : 0.0;
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = f[i] - c * (g[i] - g_mean);
  const auto rs = sample_stats(residual);
  // One degree of freedom is spent on c.
  const double se = std::sqrt(rs.variance * static_cast<double>(n - 1) /
                              static_cast<double>(n - 2) / static_cast<double>(n));
  return {rs.mean, se, n, seed};
}

}  // namespace mmseb
