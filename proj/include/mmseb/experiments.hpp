#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mmseb/bounds.hpp"
#include "mmseb/linalg.hpp"
#include "mmseb/mmse.hpp"

namespace mmseb {

enum class Figure { kGaussian, kBpsk, kSparse };

Figure parse_figure(const std::string& name);
std::string figure_name(Figure figure);

/// 12 log-spaced noise variances on [0.1, 1000].
std::vector<double> default_sigma_grid();

/// Parses "0.1,1,10"; throws InvalidArgument unless all entries are positive,
/// finite and strictly increasing.
std::vector<double> parse_sigma_grid(const std::string& text);
void validate_sigma_grid(const std::vector<double>& grid);

struct FigureConfig {
  Figure figure = Figure::kGaussian;
  std::vector<double> sigma_grid = default_sigma_grid();
  /// Monte Carlo budget for MMSE columns without a closed form.
  std::size_t samples = 500'000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::size_t n_outer = 2'000;
  std::size_t n_inner = 2'000;
  /// Sparse-prior activity probability.
  double alpha = 0.4;
  /// Input covariance for the Gaussian figure; defaults to reference_covariance_6d().
  std::optional<Matrix> covariance;
};

/// One noise level of an experiment.
struct CurveRow {
  double sigma2_n = 0.0;
  double mmse = 0.0;
  double mmse_se = 0.0;
  double poincare_lb = 0.0;
  double poincare_lb_se = 0.0;
  std::optional<double> cramer_rao;
  double variance_target = 0.0;
};

/// Evaluates every grid point. Throws SoundnessViolation if any row has
/// lb > mmse + 3 (se_lb + se_mmse) + 64 eps Tr Cov(X).
std::vector<CurveRow> run_figure(const FigureConfig& config);

/// Header plus one RFC-4180 row per point; numbers use the shortest
/// round-trip representation, independent of locale.
void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows);

/// matplotlib script that plots `csv_path`.
std::string plot_script(const std::string& csv_path, Figure figure);

struct GammaReport {
  double shape = 0.0;
  double rate = 0.0;
  double closed_form = 0.0;
  Theorem1Estimate theorem1;
  McEstimate classical;
  GammaExampleTerms terms;
  GammaExampleTermEstimates terms_mc;

  /// Both MC routes and all three terms within 3 SE of their closed forms.
  bool all_within(double multiplier = 3.0) const;
};

GammaReport run_gamma_example(double shape, double rate, const McOptions& options);
void print_gamma_report(std::ostream& out, const GammaReport& report);

}  // namespace mmseb
