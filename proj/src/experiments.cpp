#include "mmseb/experiments.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <memory>
#include <limits>
#include <sstream>

#include "mmseb/errors.hpp"

namespace mmseb {
namespace {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& token) {
  double v = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw InvalidArgument("not a number: '" + token + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Figure parse_figure(const std::string& name) {
  if (name == "gaussian") return Figure::kGaussian;
  if (name == "bpsk") return Figure::kBpsk;
  if (name == "sparse") return Figure::kSparse;
  throw InvalidArgument("unknown figure '" + name + "' (expected gaussian, bpsk or sparse)");
}

std::string figure_name(Figure figure) {
  switch (figure) {
    case Figure::kGaussian: return "gaussian";
    case Figure::kBpsk: return "bpsk";
    case Figure::kSparse: return "sparse";
  }
  return "unknown";
}

std::vector<double> default_sigma_grid() {
  std::vector<double> grid(12);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = std::pow(10.0, -1.0 + 4.0 * static_cast<double>(i) / 11.0);
  return grid;
}

void validate_sigma_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("noise grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
      throw InvalidArgument("noise variances must be positive and finite");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw InvalidArgument("noise grid must be strictly increasing");
  }
}

std::vector<double> parse_sigma_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) grid.push_back(parse_number(trim(token)));
  validate_sigma_grid(grid);
  return grid;
}

std::vector<CurveRow> run_figure(const FigureConfig& config) {
  validate_sigma_grid(config.sigma_grid);
  std::shared_ptr<const PriorModel> prior;
  Matrix covariance;
  switch (config.figure) {
    case Figure::kGaussian:
      covariance = config.covariance.value_or(reference_covariance_6d());
      prior = std::make_shared<GaussianPrior>(covariance);
      break;
    case Figure::kBpsk: prior = std::make_shared<BpskPrior>(); break;
    case Figure::kSparse: prior = std::make_shared<SparsePrior>(config.alpha); break;
  }
  std::vector<CurveRow> rows;
  rows.reserve(config.sigma_grid.size());
  for (std::size_t r = 0; r < config.sigma_grid.size(); ++r) {
    const double s2 = config.sigma_grid[r];
    const JointModel joint(prior, std::make_shared<GaussianChannel>(s2, prior->dim()));
    CurveRow row;
    row.sigma2_n = s2;
    row.variance_target = prior->trace_covariance();
    switch (config.figure) {
      case Figure::kGaussian:
        row.mmse = mmse_gaussian_closed_form(covariance, s2);
        row.cramer_rao = cramer_rao_bound(joint);
        break;
      case Figure::kBpsk: row.mmse = mmse_bpsk(s2); break;
      case Figure::kSparse: {
        const auto est =
            mmse_theorem1_mc(joint, {config.samples, split_seed(config.seed, 2 * r), config.workers});
        row.mmse = est.estimate.value;
        row.mmse_se = est.estimate.std_error;
        break;
      }
    }
    BoundOptions bound_options;
    bound_options.n_outer = config.n_outer;
    bound_options.n_inner = config.n_inner;
    bound_options.seed = split_seed(config.seed, 2 * r + 1);
    bound_options.workers = config.workers;
    const McEstimate lb = poincare_lb_gaussian(joint, bound_options);
    row.poincare_lb = lb.value;
    row.poincare_lb_se = lb.std_error;
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * row.variance_target;
    if (row.poincare_lb > row.mmse + 3.0 * (row.poincare_lb_se + row.mmse_se) + roundoff) {
      std::ostringstream msg;
      msg << "lower bound " << row.poincare_lb << " exceeds mmse " << row.mmse
          << " + 3 SE at sigma2_n = " << s2;
      throw SoundnessViolation(msg.str());
    }
    rows.push_back(row);
  }
  return rows;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
  out << "sigma2_n,mmse,mmse_se,poincare_lb,poincare_lb_se,cramer_rao,variance_target\r\n";
  for (const auto& row : rows) {
    out << format_number(row.sigma2_n) << ',' << format_number(row.mmse) << ','
        << format_number(row.mmse_se) << ',' << format_number(row.poincare_lb) << ','
        << format_number(row.poincare_lb_se) << ','
        << (row.cramer_rao ? format_number(*row.cramer_rao) : std::string()) << ','
        << format_number(row.variance_target) << "\r\n";
  }
}

std::string plot_script(const std::string& csv_path, Figure figure) {
  std::ostringstream s;
  s << "# Plots " << csv_path << " (generated by mmse_bounds).\n"
    << "import csv\n"
    << "import matplotlib.pyplot as plt\n\n"
    << "rows = list(csv.DictReader(open(" << std::quoted(csv_path) << ", newline='')))\n"
    << "s2 = [float(r['sigma2_n']) for r in rows]\n"
    << "plt.loglog(s2, [float(r['mmse']) for r in rows], '-', label='MMSE')\n"
    << "plt.loglog(s2, [float(r['poincare_lb']) for r in rows], '--', label='Poincare bound')\n";
  if (figure == Figure::kGaussian)
    s << "plt.loglog(s2, [float(r['cramer_rao']) for r in rows], ':', label='Cramer-Rao')\n";
  s << "plt.xlabel('noise variance')\n"
    << "plt.ylabel('MSE')\n"
    << "plt.title(" << std::quoted(figure_name(figure) + " input") << ")\n"
    << "plt.legend()\n"
    << "plt.savefig(" << std::quoted(csv_path + ".png") << ", dpi=150)\n";
  return s.str();
}

bool GammaReport::all_within(double multiplier) const {
  auto ok = [multiplier](const McEstimate& est, double exact) {
    return std::abs(est.value - exact) <= multiplier * est.std_error;
  };
  return ok(theorem1.estimate, closed_form) && ok(classical, closed_form) &&
         ok(terms_mc.second_moment, terms.second_moment) && ok(terms_mc.cross, terms.cross) &&
         ok(terms_mc.inverse_square, terms.inverse_square);
}

GammaReport run_gamma_example(double shape, double rate, const McOptions& options) {
  const JointModel joint(std::make_shared<GammaPrior>(shape, rate),
                         std::make_shared<GammaVarianceChannel>());
  GammaReport report;
  report.shape = shape;
  report.rate = rate;
  report.closed_form = mmse_gamma_example(shape, rate);
  report.theorem1 = mmse_theorem1_mc(joint, options);
  report.classical =
      mmse_classical_mc(joint, {options.n, split_seed(options.seed, 1), options.workers});
  report.terms = gamma_example_terms(shape, rate);
  report.terms_mc =
      gamma_example_terms_mc(shape, rate, {options.n, split_seed(options.seed, 2), options.workers});
  return report;
}

void print_gamma_report(std::ostream& out, const GammaReport& r) {
  auto line = [&](const char* label, const McEstimate& est, double exact) {
    out << "  " << std::left << std::setw(26) << label << std::setprecision(8)
        << est.value << " +- " << std::setprecision(3) << est.std_error << "   closed form "
        << std::setprecision(8) << exact << "   z = " << std::setprecision(3)
        << (est.std_error > 0 ? (est.value - exact) / est.std_error : 0.0) << '\n';
  };
  out << "gamma prior alpha = " << r.shape << ", beta = " << r.rate << '\n';
  out << "  closed-form mmse          " << std::setprecision(10) << r.closed_form << '\n';
  line("score Monte Carlo", r.theorem1.estimate, r.closed_form);
  line("classical Monte Carlo", r.classical, r.closed_form);
  line("E[X^2]", r.terms_mc.second_moment, r.terms.second_moment);
  line("E[X/(Y^2+beta)]", r.terms_mc.cross, r.terms.cross);
  line("E[1/(Y^2+beta)^2]", r.terms_mc.inverse_square, r.terms.inverse_square);
  out << "  rank rejections           " << r.theorem1.rank_rejections << '\n';
  out << "  status                    " << (r.all_within() ? "PASS" : "FAIL") << '\n';
}

}  // namespace mmseb
