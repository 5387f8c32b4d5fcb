/*
 * Copyright 2026 The uberr Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uberr/artifacts.hpp"
#include "uberr/config.hpp"
#include "uberr/errors.hpp"
#include "uberr/evaluation.hpp"
#include "uberr/features.hpp"
#include "uberr/gp.hpp"
#include "uberr/pipeline.hpp"
#include "uberr/selection.hpp"
#include "uberr/transforms.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_uberr, m) {
  m.doc() = "uberr core bindings";
  m.attr("__version__") = UBERR_VERSION;

  py::register_exception<uberr::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<uberr::UndefinedMetric>(m, "UndefinedMetric", PyExc_ArithmeticError);
  py::register_exception<uberr::FitError>(m, "FitError", PyExc_RuntimeError);
  py::register_exception<uberr::StageError>(m, "StageError", PyExc_RuntimeError);

  py::class_<uberr::BoxCoxFit>(m, "BoxCoxFit")
      .def(py::init<>())
      .def_readwrite("shift", &uberr::BoxCoxFit::shift)
      .def_readwrite("lmbda", &uberr::BoxCoxFit::lambda);
  m.def("boxcox_fit", [](const std::vector<double>& v) { return uberr::boxcox_fit(v); });
  m.def("boxcox_apply", &uberr::boxcox_apply);
  m.def("boxcox_invert", &uberr::boxcox_invert);
  m.def("dcor", [](const std::vector<double>& x, const std::vector<double>& y) { return uberr::dcor(x, y); });

  py::class_<uberr::KernelParams>(m, "KernelParams")
      .def(py::init<>())
      .def(py::init([](double s, std::vector<double> l, double n) { return uberr::KernelParams{s, std::move(l), n}; }),
           py::arg("signal_variance"), py::arg("lengthscales"), py::arg("noise_variance"))
      .def_readwrite("signal_variance", &uberr::KernelParams::signal_variance)
      .def_readwrite("lengthscales", &uberr::KernelParams::lengthscales)
      .def_readwrite("noise_variance", &uberr::KernelParams::noise_variance);
  m.def("kernel_eval", [](const std::vector<double>& a, const std::vector<double>& b, const uberr::KernelParams& p) {
    return uberr::kernel_eval(a, b, p);
  });
  m.def("alpha_from_weights",
        [](const std::vector<double>& w, double base) { return uberr::alpha_from_weights(w, base); });

  py::class_<uberr::GPModel>(m, "GPModel")
      .def(py::init<Eigen::MatrixXd, Eigen::VectorXd, Eigen::VectorXd, uberr::KernelParams>(), py::arg("inputs"),
           py::arg("targets"), py::arg("alpha"), py::arg("params"))
      .def_property_readonly("params", &uberr::GPModel::params)
      .def("log_marginal_likelihood", &uberr::GPModel::log_marginal_likelihood)
      .def("log_marginal_likelihood_gradient",
           [](const uberr::GPModel& g) {
             auto r = g.log_marginal_likelihood_gradient();
             return py::make_tuple(r.value, r.gradient);
           })
      .def(
          "predict",
          [](const uberr::GPModel& g, const Eigen::MatrixXd& x, bool include_noise) {
            const auto p = g.predict(x, include_noise);
            Eigen::VectorXd mean(static_cast<Eigen::Index>(p.size())), std(static_cast<Eigen::Index>(p.size()));
            for (std::size_t i = 0; i < p.size(); ++i) {
              mean[static_cast<Eigen::Index>(i)] = p[i].mean;
              std[static_cast<Eigen::Index>(i)] = p[i].std;
            }
            return py::make_tuple(mean, std);
          },
          py::arg("points"), py::arg("include_noise") = false);
  m.def(
      "fit_gp",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha, int restarts,
         std::uint64_t seed) {
        uberr::FitConfig cfg;
        cfg.restarts = restarts;
        return uberr::fit(x, y, alpha, cfg, seed);
      },
      py::arg("inputs"), py::arg("targets"), py::arg("alpha"), py::arg("restarts") = 5, py::arg("seed") = 0);

  auto dists = [](const std::vector<double>& mean, const std::vector<double>& std) {
    if (mean.size() != std.size()) throw uberr::InputError("mean and std differ in length");
    std::vector<uberr::PredictiveDistribution> p;
    for (std::size_t i = 0; i < mean.size(); ++i) p.push_back({mean[i], std[i], true});
    return p;
  };
  m.def("nlpd", [dists](const std::vector<double>& mean, const std::vector<double>& std, const std::vector<double>& y) {
    return uberr::nlpd(dists(mean, std), y);
  });
  m.def("mse", [dists](const std::vector<double>& mean, const std::vector<double>& std, const std::vector<double>& y) {
    return uberr::mse(dists(mean, std), y);
  });
  m.def("coverage95",
        [dists](const std::vector<double>& mean, const std::vector<double>& std, const std::vector<double>& y) {
          return uberr::coverage95(dists(mean, std), y);
        });

  m.def("feature_names", &uberr::feature_names);
  m.def("config_reference", &uberr::config_reference);
  m.def("config_hash", [](const std::string& text) { return uberr::config_hash(uberr::parse_config(text)); },
        py::arg("text") = "");
  m.def(
      "run_stage",
      [](const std::string& stage, const std::string& out_dir, const std::string& config_text) {
        uberr::Pipeline p(uberr::parse_config(config_text), out_dir);
        const auto o = p.run(stage);
        return py::make_tuple(o.reused, o.outputs);
      },
      py::arg("stage"), py::arg("out_dir"), py::arg("config_text") = "");
}
