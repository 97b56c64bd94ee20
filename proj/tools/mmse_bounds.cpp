// mmse_bounds: experiment runner for the MMSE bounds library.
//
//   mmse_bounds figure --figure gaussian --out gaussian.csv
//   mmse_bounds gamma --alpha 2 --beta 3
//   mmse_bounds verify --sweep 20
//
// MMSEB_SEED overrides the default seed of every subcommand.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mmseb/errors.hpp"
#include "mmseb/experiments.hpp"
#include "mmseb/verify.hpp"

namespace {

std::uint64_t default_seed() {
  const char* env = std::getenv("MMSEB_SEED");
  if (env == nullptr || *env == '\0') return 42;
  std::uint64_t seed = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, seed);
  if (res.ec != std::errc() || res.ptr != end)
    throw mmseb::InvalidArgument(std::string("MMSEB_SEED is not an unsigned integer: ") + env);
  return seed;
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 42;
  try {
    seed = default_seed();
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }

  CLI::App app{"MMSE of exponential-family channels and Poincare lower bounds"};
  app.require_subcommand(1);

  std::string figure = "gaussian";
  std::string sigma_grid;
  std::string out = "-";
  std::size_t samples = 500'000;
  std::size_t outer = 2'000;
  std::size_t inner = 2'000;
  double alpha = 0.4;
  double beta = 1.0;
  unsigned workers = 1;
  std::size_t sweep = 1;

  auto* fig = app.add_subcommand("figure", "Tabulate MMSE, lower bound and Cramer-Rao over a noise grid");
  fig->add_option("--figure", figure, "gaussian | bpsk | sparse")
      ->check(CLI::IsMember({"gaussian", "bpsk", "sparse"}))
      ->capture_default_str();
  fig->add_option("--sigma-grid", sigma_grid, "Comma-separated noise variances (default: 12 points in [0.1, 1000])");
  fig->add_option("--samples", samples, "Monte Carlo samples for MMSE without a closed form")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40))
      ->capture_default_str();
  fig->add_option("--alpha", alpha, "Sparse-prior activity probability")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  fig->add_option("--outer", outer, "Outer prior draws of the lower bound")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 32))
      ->capture_default_str();
  fig->add_option("--inner", inner, "Inner channel draws per prior draw")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 32))
      ->capture_default_str();
  fig->add_option("--out", out, "CSV path, '-' for stdout; a .plot.py companion is written next to files")
      ->capture_default_str();

  auto* gam = app.add_subcommand("gamma", "Gamma-prior worked example");
  double shape = 1.0;
  gam->add_option("--alpha", shape, "Gamma shape")->check(CLI::PositiveNumber)->capture_default_str();
  gam->add_option("--beta", beta, "Gamma rate")->check(CLI::PositiveNumber)->capture_default_str();
  gam->add_option("--samples", samples, "Monte Carlo samples per estimator")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40))
      ->capture_default_str();

  auto* ver = app.add_subcommand("verify", "Run the invariant suites; JSON summary on stdout");
  ver->add_option("--sweep", sweep, "Consecutive seeds in the soundness sweep")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  for (auto* sub : {fig, gam, ver}) {
    sub->add_option("--seed", seed, "Seed (default 42, or $MMSEB_SEED)")->capture_default_str();
    sub->add_option("--workers", workers, "Worker threads; part of the determinism key")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (fig->parsed()) {
      mmseb::FigureConfig config;
      config.figure = mmseb::parse_figure(figure);
      if (!sigma_grid.empty()) config.sigma_grid = mmseb::parse_sigma_grid(sigma_grid);
      config.samples = samples;
      config.seed = seed;
      config.workers = workers;
      config.n_outer = outer;
      config.n_inner = inner;
      config.alpha = alpha;
      const auto rows = mmseb::run_figure(config);
      if (out == "-") {
        mmseb::write_curve_csv(std::cout, rows);
      } else {
        std::ofstream csv(out, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open " + out);
        mmseb::write_curve_csv(csv, rows);
        std::ofstream script(out + ".plot.py", std::ios::binary);
        if (!script) throw std::runtime_error("cannot open " + out + ".plot.py");
        script << mmseb::plot_script(out, config.figure);
        if (!csv || !script) throw std::runtime_error("write failed for " + out);
      }
      return 0;
    }
    if (gam->parsed()) {
      const auto report = mmseb::run_gamma_example(shape, beta, {samples, seed, workers});
      mmseb::print_gamma_report(std::cout, report);
      return report.all_within() ? 0 : 1;
    }
    mmseb::VerifyConfig config;
    config.seed = seed;
    config.sweep_seeds = sweep;
    config.workers = workers;
    const auto report = mmseb::run_verification(config);
    std::cout << report.to_json() << '\n';
    return report.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
