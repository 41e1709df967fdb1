#include "blml/algorithms.hpp"
#include "blml/bandwidth.hpp"
#include "blml/errors.hpp"
#include "blml/kde.hpp"
#include "blml/pointprocess.hpp"
#include "blml/surrogate.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace blml;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// 1-D arrays are n samples; 2-D arrays are n rows of d coordinates
SampleSet to_samples(const Array& a)
{
  if (a.ndim() == 1)
    return SampleSet(std::vector<double>(a.data(), a.data() + a.size()));
  if (a.ndim() == 2)
    return SampleSet(static_cast<std::size_t>(a.shape(1)),
                     std::vector<double>(a.data(), a.data() + a.size()));
  throw py::value_error("samples must be a 1-D or 2-D array");
}

Array to_array(const std::vector<double>& v)
{
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Array nodes_array(const SampleSet& s)
{
  if (s.dim() == 1)
    return to_array(s.values());
  Array out({ static_cast<py::ssize_t>(s.size()), static_cast<py::ssize_t>(s.dim()) });
  std::copy(s.values().begin(), s.values().end(), out.mutable_data());
  return out;
}

CutoffFrequency to_cutoff(const std::vector<double>& fc)
{
  return fc.size() == 1 ? CutoffFrequency(fc[0]) : CutoffFrequency(fc);
}

BlmlFit fit(const Array& samples,
            const std::vector<double>& fc,
            const std::string& algo,
            std::optional<std::vector<double>> fs,
            double tol)
{
  const auto s = to_samples(samples);
  SolverOptions opt;
  opt.tol = tol;
  if (algo == "trivial")
    return fit_trivial(s, to_cutoff(fc), opt);
  if (algo == "quick")
    return fit_quick(s, to_cutoff(fc), std::move(fs), opt);
  if (algo == "bqp") {
    BqpOptions b;
    b.solver = opt;
    return fit_bqp(s, to_cutoff(fc), b);
  }
  throw ConfigError("unknown algorithm '" + algo + "'");
}

py::dict report_dict(const MiseReport& r)
{
  py::dict d;
  d["estimator"] = r.estimator;
  d["pdf"] = r.pdf;
  d["fc"] = r.fc;
  d["sizes"] = r.sizes;
  d["mean_ise"] = r.mean_ise;
  d["stderr_ise"] = r.stderr_ise;
  d["failures"] = r.failures;
  d["slope"] = loglog_slope(r);
  return d;
}

py::dict ks_dict(const KsReport& r)
{
  py::dict d;
  d["z"] = to_array(r.z);
  d["ks_distance"] = r.ks_distance;
  d["normalized_ks"] = r.normalized_ks;
  d["pass"] = r.pass;
  return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Band-limited maximum-likelihood density estimation.";

  static py::exception<Error> base(m, "BlmlError", PyExc_RuntimeError);
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  static py::exception<RefusalError> refusal(m, "RefusalError", base.ptr());
  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const RefusalError& e) {
      py::set_error(refusal, e.what());
    } catch (const ConvergenceError& e) {
      py::set_error(convergence, e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<BlmlFit>(m, "Fit")
    .def_property_readonly("nodes", [](const BlmlFit& f) { return nodes_array(f.nodes); })
    .def_property_readonly("weights", [](const BlmlFit& f) { return f.weights; })
    .def_property_readonly("coefficients",
                           [](const BlmlFit& f) {
                             const auto& c = f.coefficients.values;
                             return to_array(std::vector<double>(c.data(), c.data() + c.size()));
                           })
    .def_property_readonly("fc", [](const BlmlFit& f) { return f.fc.values(); })
    .def_readonly("n", &BlmlFit::n)
    .def_readonly("algorithm", &BlmlFit::algorithm)
    .def_property_readonly("log_likelihood", &BlmlFit::log_likelihood)
    .def_property_readonly("mnll", [](const BlmlFit& f) { return mnll(f); })
    .def("__call__",
         [](const BlmlFit& f, const Array& x) { return to_array(eval_density(f, to_samples(x))); },
         py::arg("x"))
    .def("__repr__", [](const BlmlFit& f) {
      return "<Fit " + f.algorithm + " n=" + std::to_string(f.n) +
             " nodes=" + std::to_string(f.nodes.size()) + ">";
    });

  m.def("fit", &fit, py::arg("samples"), py::arg("fc"), py::arg("algo") = "trivial",
        py::arg("fs") = py::none(), py::arg("tol") = 0.0,
        "BLML fit; fc holds one cut-off per dimension.");

  m.def("cbar", &cbar, py::arg("g"), py::arg("n"), py::arg("fc"));

  m.def(
    "kde",
    [](const Array& samples, const Array& x, const std::string& kernel, std::vector<double> fc,
       double constant) {
      const auto s = to_samples(samples);
      const auto kind = parse_kernel_kind(kernel);
      std::vector<double> h = fc;
      if (kind != KernelKind::sinc)
        for (auto& v : h)
          v = kde_bandwidth(kind, v, s.size(), constant);
      return to_array(kde_eval(kde_fit(s, kind, h), to_samples(x)));
    },
    py::arg("samples"), py::arg("x"), py::arg("kernel") = "gauss2", py::arg("fc"),
    py::arg("constant") = 0.4, "KDE at x with the bandwidth schedule for cut-off fc.");

  m.def(
    "pdf",
    [](const std::string& name, const Array& x) {
      const auto p = AnalyticPdf::from_name(name);
      std::vector<double> out(static_cast<std::size_t>(x.size()));
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = p(x.data()[i]);
      return to_array(out);
    },
    py::arg("name"), py::arg("x"));

  m.def(
    "sample",
    [](const std::string& name, std::size_t n, std::uint64_t seed) {
      return to_array(AnalyticPdf::from_name(name).sample(n, seed).values());
    },
    py::arg("name"), py::arg("n"), py::arg("seed") = 1);

  m.def(
    "ise",
    [](const BlmlFit& f, const std::string& truth) {
      return ise(as_density(f), AnalyticPdf::from_name(truth));
    },
    py::arg("fit"), py::arg("truth"));

  m.def(
    "mise",
    [](const std::string& pdf, const std::vector<std::string>& estimators,
       std::vector<std::size_t> sizes, std::size_t reps, std::uint64_t seed, double fc) {
      std::vector<EstimatorSpec> specs;
      for (const auto& e : estimators) {
        EstimatorSpec s;
        s.kind = parse_estimator_kind(e);
        specs.push_back(s);
      }
      MiseOptions o;
      o.sizes = std::move(sizes);
      o.reps = reps;
      o.seed = seed;
      py::list out;
      for (const auto& r : mise_sweep(specs, AnalyticPdf::from_name(pdf), fc, o))
        out.append(report_dict(r));
      return out;
    },
    py::arg("pdf"), py::arg("estimators"), py::arg("sizes"), py::arg("reps") = 20,
    py::arg("seed") = 1, py::arg("fc") = 0.8);

  m.def(
    "mnll_scan",
    [](const Array& samples, const std::vector<double>& grid, const std::string& algo) {
      const auto scan = mnll_scan(to_samples(samples), grid, parse_scan_algorithm(algo));
      py::dict d;
      d["fc"] = scan.fc;
      d["mnll"] = scan.mnll;
      d["valid"] = scan.valid;
      return d;
    },
    py::arg("samples"), py::arg("grid"), py::arg("algo") = "trivial");

  m.def(
    "detect_knee",
    [](const std::vector<double>& fc, const std::vector<double>& curve) {
      return detect_knee(fc, curve);
    },
    py::arg("fc"), py::arg("curve"));

  m.def(
    "ks_uniform", [](std::vector<double> z) { return ks_dict(ks_uniform(std::move(z))); },
    py::arg("z"), "Normalized KS distance of rescaled times against U(0,1).");

  m.def(
    "time_rescale_constant",
    [](const std::vector<double>& times, double t_begin, double t_end, double rate, double dt) {
      SpikeTrain train;
      train.times = times;
      train.t_begin = t_begin;
      train.t_end = t_end;
      train.track.t0 = t_begin;
      train.track.dt = dt;
      train.track.steps = static_cast<std::size_t>(std::ceil((t_end - t_begin) / dt - 1e-9)) + 1;
      return ks_dict(time_rescale(train, [rate](double, std::span<const double>) { return rate; }));
    },
    py::arg("times"), py::arg("t_begin"), py::arg("t_end"), py::arg("rate"), py::arg("dt") = 0.01,
    "Time-rescaling KS check of events against a constant rate.");
}
