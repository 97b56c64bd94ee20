#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmseb/bounds.hpp"
#include "mmseb/errors.hpp"
#include "mmseb/experiments.hpp"
#include "mmseb/mmse.hpp"
#include "mmseb/verify.hpp"

namespace py = pybind11;
using namespace mmseb;

namespace {

McOptions mc_options(std::size_t n, std::uint64_t seed, unsigned workers) { return {n, seed, workers}; }

BoundOptions bound_options(std::size_t n_outer, std::size_t n_inner, std::uint64_t seed, unsigned workers,
                           bool control_variate) {
  BoundOptions o;
  o.n_outer = n_outer;
  o.n_inner = n_inner;
  o.seed = seed;
  o.workers = workers;
  o.control_variate = control_variate;
  return o;
}

}  // namespace

PYBIND11_MODULE(_mmseb, m) {
  m.doc() = "MMSE of exponential-family channels and Poincare lower bounds";

  auto base = py::register_exception<Error>(m, "MmsebError", PyExc_RuntimeError);
  const py::tuple value_bases = py::make_tuple(base, py::handle(PyExc_ValueError));
  py::register_exception<InvalidArgument>(m, "InvalidArgument", value_bases);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<UnsupportedStrategy>(m, "UnsupportedStrategy", base.ptr());
  py::register_exception<RankDeficient>(m, "RankDeficient", base.ptr());
  py::register_exception<NotPSD>(m, "NotPSD", base.ptr());
  py::register_exception<WrongChannel>(m, "WrongChannel", base.ptr());
  py::register_exception<SoundnessViolation>(m, "SoundnessViolation", base.ptr());

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("value", &McEstimate::value)
      .def_readonly("std_error", &McEstimate::std_error)
      .def_readonly("n_samples", &McEstimate::n_samples)
      .def_readonly("seed", &McEstimate::seed)
      .def("__repr__", [](const McEstimate& e) {
        std::ostringstream out;
        out.precision(17);
        out << "McEstimate(value=" << e.value << ", std_error=" << e.std_error << ")";
        return out.str();
      });

  py::class_<ChannelModel, std::shared_ptr<ChannelModel>>(m, "ChannelModel")
      .def_property_readonly("name", &ChannelModel::name)
      .def_property_readonly("input_dim", &ChannelModel::input_dim)
      .def_property_readonly("output_dim", &ChannelModel::output_dim)
      .def("log_cond_pdf", &ChannelModel::log_cond_pdf, py::arg("x"), py::arg("y"))
      .def("sufficient_statistic", &ChannelModel::sufficient_statistic, py::arg("y"))
      .def("jacobian_T", &ChannelModel::jacobian_T, py::arg("y"));
  py::class_<GaussianChannel, ChannelModel, std::shared_ptr<GaussianChannel>>(m, "GaussianChannel")
      .def(py::init<double, std::size_t>(), py::arg("noise_variance"), py::arg("dim") = 1)
      .def_property_readonly("noise_variance", &GaussianChannel::noise_variance);
  py::class_<GammaVarianceChannel, ChannelModel, std::shared_ptr<GammaVarianceChannel>>(
      m, "GammaVarianceChannel")
      .def(py::init<>());

  py::class_<PriorModel, std::shared_ptr<PriorModel>>(m, "PriorModel")
      .def_property_readonly("name", &PriorModel::name)
      .def_property_readonly("dim", &PriorModel::dim)
      .def("mean", &PriorModel::mean)
      .def("trace_covariance", &PriorModel::trace_covariance);
  py::class_<GaussianPrior, PriorModel, std::shared_ptr<GaussianPrior>>(m, "GaussianPrior")
      .def(py::init<Matrix>(), py::arg("covariance"))
      .def(py::init<Matrix, Vector>(), py::arg("covariance"), py::arg("mean"));
  py::class_<BpskPrior, PriorModel, std::shared_ptr<BpskPrior>>(m, "BpskPrior").def(py::init<>());
  py::class_<SparsePrior, PriorModel, std::shared_ptr<SparsePrior>>(m, "SparsePrior")
      .def(py::init<double>(), py::arg("alpha"));
  py::class_<GammaPrior, PriorModel, std::shared_ptr<GammaPrior>>(m, "GammaPrior")
      .def(py::init<double, double>(), py::arg("shape"), py::arg("rate"));
  py::class_<PointMassPrior, PriorModel, std::shared_ptr<PointMassPrior>>(m, "PointMassPrior")
      .def(py::init<Vector>(), py::arg("location"));

  py::class_<JointModel>(m, "JointModel")
      .def(py::init([](std::shared_ptr<PriorModel> prior, std::shared_ptr<ChannelModel> channel,
                       std::optional<std::size_t> mc_marginal_samples, std::uint64_t seed) {
             if (mc_marginal_samples)
               return JointModel(prior, channel, MonteCarloMarginal{*mc_marginal_samples, seed});
             return JointModel(prior, channel);
           }),
           py::arg("prior"), py::arg("channel"), py::arg("mc_marginal_samples") = py::none(),
           py::arg("seed") = 42)
      .def_property_readonly("has_closed_form", &JointModel::has_closed_form);

  m.def("reference_covariance_6d", &reference_covariance_6d);
  m.def("marginal_log_pdf", &marginal_log_pdf, py::arg("joint"), py::arg("y"));
  m.def("info_density", &info_density, py::arg("joint"), py::arg("x"), py::arg("y"));
  m.def("grad_y_info_density", &grad_y_info_density, py::arg("joint"), py::arg("x"), py::arg("y"));
  m.def("cond_mean_tweedie", &cond_mean_tweedie, py::arg("joint"), py::arg("y"));

  m.def(
      "mmse_classical_mc",
      [](const JointModel& joint, std::size_t n, std::uint64_t seed, unsigned workers) {
        return mmse_classical_mc(joint, mc_options(n, seed, workers));
      },
      py::arg("joint"), py::arg("n") = 500'000, py::arg("seed") = 42, py::arg("workers") = 1);
  m.def(
      "mmse_theorem1_mc",
      [](const JointModel& joint, std::size_t n, std::uint64_t seed, unsigned workers) {
        return mmse_theorem1_mc(joint, mc_options(n, seed, workers)).estimate;
      },
      py::arg("joint"), py::arg("n") = 500'000, py::arg("seed") = 42, py::arg("workers") = 1);
  m.def("mmse_gaussian_closed_form", &mmse_gaussian_closed_form, py::arg("covariance"),
        py::arg("noise_variance"));
  m.def("mmse_bpsk", &mmse_bpsk, py::arg("noise_variance"));
  m.def("mmse_gamma_example", &mmse_gamma_example, py::arg("shape"), py::arg("rate"));

  m.def("bakry_emery_constant",
        py::overload_cast<const ChannelModel&, const Vector&>(&bakry_emery_constant), py::arg("channel"),
        py::arg("x"));
  m.def("rho", py::overload_cast<const ChannelModel&>(&rho), py::arg("channel"));
  m.def(
      "cond_info_variance",
      [](const JointModel& joint, const Vector& x, std::size_t n_inner, std::uint64_t seed) {
        return cond_info_variance(joint, x, n_inner, seed);
      },
      py::arg("joint"), py::arg("x"), py::arg("n_inner") = 2'000, py::arg("seed") = 42);
  m.def(
      "poincare_lb_gaussian",
      [](const JointModel& joint, std::size_t n_outer, std::size_t n_inner, std::uint64_t seed,
         unsigned workers, bool control_variate) {
        return poincare_lb_gaussian(joint, bound_options(n_outer, n_inner, seed, workers, control_variate));
      },
      py::arg("joint"), py::arg("n_outer") = 2'000, py::arg("n_inner") = 2'000, py::arg("seed") = 42,
      py::arg("workers") = 1, py::arg("control_variate") = false);
  m.def(
      "poincare_lower_bound",
      [](const JointModel& joint, std::size_t n_outer, std::size_t n_inner, std::uint64_t seed,
         unsigned workers) {
        const auto b = poincare_lower_bound(joint, bound_options(n_outer, n_inner, seed, workers, false));
        py::dict out;
        out["estimate"] = b.estimate;
        out["rho"] = b.rho;
        out["trivial"] = b.trivial;
        out["diagnostic"] = b.diagnostic;
        return out;
      },
      py::arg("joint"), py::arg("n_outer") = 2'000, py::arg("n_inner") = 2'000, py::arg("seed") = 42,
      py::arg("workers") = 1);
  m.def("cramer_rao_gaussian", &cramer_rao_gaussian, py::arg("fisher_info"), py::arg("dim"),
        py::arg("noise_variance"));
  m.def("cramer_rao_bound", &cramer_rao_bound, py::arg("joint"));

  m.def("default_sigma_grid", &default_sigma_grid);
  m.def(
      "figure_csv",
      [](const std::string& figure, std::optional<std::vector<double>> sigma_grid, std::size_t samples,
         std::uint64_t seed, unsigned workers, std::size_t n_outer, std::size_t n_inner, double alpha) {
        FigureConfig c;
        c.figure = parse_figure(figure);
        if (sigma_grid) c.sigma_grid = *sigma_grid;
        c.samples = samples;
        c.seed = seed;
        c.workers = workers;
        c.n_outer = n_outer;
        c.n_inner = n_inner;
        c.alpha = alpha;
        std::ostringstream out;
        write_curve_csv(out, run_figure(c));
        return out.str();
      },
      py::arg("figure"), py::arg("sigma_grid") = py::none(), py::arg("samples") = 500'000,
      py::arg("seed") = 42, py::arg("workers") = 1, py::arg("n_outer") = 2'000, py::arg("n_inner") = 2'000,
      py::arg("alpha") = 0.4);
  m.def(
      "verify",
      [](std::uint64_t seed, std::size_t sweep_seeds) {
        VerifyConfig c;
        c.seed = seed;
        c.sweep_seeds = sweep_seeds;
        return run_verification(c).to_json();
      },
      py::arg("seed") = 42, py::arg("sweep_seeds") = 1);
}
