/*
 * Copyright 2026 The ewspipe Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ewspipe/error.hpp"
#include "ewspipe/pipeline.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>

namespace py = pybind11;
using namespace ews;

namespace {

json parse_config(const std::string& text)
{
    return text.empty() ? json::object() : json::parse(text);
}

py::array_t<double> to_array(const std::vector<double>& v)
{
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
    if (a.ndim() != 1) throw Error(ErrorKind::InvalidArgument, "expected a 1-d array");
    return {a.data(), a.data() + a.size()};
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Early-warning dataset generation, preprocessing and evaluation";

    static py::exception<Error> error_type(m, "EwsError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(error_type.ptr())(std::string(e.what()));
            err.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error_type.ptr(), err.ptr());
        }
    });

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init([](std::string id, const std::string& label, const py::array_t<double>& values) {
                 return TimeSeries(std::move(id), parse_label(label), from_array(values));
             }),
             py::arg("id"), py::arg("label"), py::arg("values"))
        .def_readwrite("id", &TimeSeries::id)
        .def_property(
            "label", [](const TimeSeries& t) { return std::string(to_string(t.label)); },
            [](TimeSeries& t, const std::string& s) { t.label = parse_label(s); })
        .def_property(
            "values", [](const TimeSeries& t) { return to_array(t.values); },
            [](TimeSeries& t, const py::array_t<double>& a) { t.values = from_array(a); })
        .def_property(
            "mask",
            [](const TimeSeries& t) {
                py::array_t<bool> out(static_cast<py::ssize_t>(t.mask.size()));
                auto r = out.mutable_unchecked<1>();
                for (std::size_t i = 0; i < t.mask.size(); ++i) r(static_cast<py::ssize_t>(i)) = t.mask[i];
                return out;
            },
            [](TimeSeries& t, const std::vector<bool>& mask) { t.mask = mask; })
        .def_readwrite("dt", &TimeSeries::dt)
        .def_readwrite("meta", &TimeSeries::meta)
        .def_property_readonly("eval_start_index", &TimeSeries::eval_start_index)
        .def("__len__", &TimeSeries::size)
        .def("__repr__", [](const TimeSeries& t) {
            return "<TimeSeries " + t.id + " " + std::string(to_string(t.label)) + " n=" + std::to_string(t.size()) +
                   ">";
        });

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("series", &Dataset::series)
        .def_property(
            "manifest_json", [](const Dataset& d) { return d.manifest.dump(); },
            [](Dataset& d, const std::string& s) { d.manifest = json::parse(s); });

    m.def("read_dataset", [](const fs::path& p) { return read_dataset(p); }, py::arg("path"));
    m.def("write_dataset", [](const fs::path& p, const Dataset& d) { write_dataset(p, d); }, py::arg("path"),
          py::arg("dataset"));

    m.def(
        "generate_rapo",
        [](std::size_t n_pairs, std::uint64_t seed, const std::string& config, std::size_t threads) {
            py::gil_scoped_release release;
            return pipeline::generate_rapo_dataset(n_pairs, seed, pipeline::rapo_config_from_json(parse_config(config)),
                                                   threads);
        },
        py::arg("n_pairs"), py::arg("seed"), py::arg("config") = "", py::arg("threads") = 1);
    m.def(
        "generate_nisir",
        [](const std::vector<std::string>& kinds, std::size_t n_per_kind, std::uint64_t seed, const std::string& config,
           std::size_t threads) {
            std::vector<nisir::NoiseKind> parsed;
            for (const auto& k : kinds) parsed.push_back(nisir::parse_noise_kind(k));
            py::gil_scoped_release release;
            return pipeline::generate_nisir_dataset(parsed, n_per_kind, seed,
                                                    pipeline::nisir_config_from_json(parse_config(config)), threads);
        },
        py::arg("kinds"), py::arg("n_per_kind"), py::arg("seed"), py::arg("config") = "", py::arg("threads") = 1);
    m.def(
        "generate_testbed",
        [](const std::string& model, std::uint64_t seed, const std::string& config, std::size_t threads) {
            const auto parsed = testbed::parse_model(model);
            py::gil_scoped_release release;
            return pipeline::generate_testbed_dataset(parsed, seed,
                                                      pipeline::testbed_config_from_json(parse_config(config)), threads);
        },
        py::arg("model"), py::arg("seed"), py::arg("config") = "", py::arg("threads") = 1);
    m.def(
        "preprocess",
        [](const Dataset& d, std::uint64_t seed, const std::string& config, std::size_t threads) {
            py::gil_scoped_release release;
            return pipeline::preprocess_dataset(d, pipeline::preprocess_config_from_json(parse_config(config)), seed,
                                                threads);
        },
        py::arg("dataset"), py::arg("seed"), py::arg("config") = "", py::arg("threads") = 1);
    m.def(
        "replay",
        [](const std::string& manifest, std::size_t threads) {
            const auto j = json::parse(manifest);
            py::gil_scoped_release release;
            return pipeline::replay_manifest(j, threads);
        },
        py::arg("manifest_json"), py::arg("threads") = 1);
    m.def(
        "score",
        [](const Dataset& d, double window_frac, const std::string& indicator, double span, std::size_t threads) {
            EwiConfig ewi;
            ewi.window_frac = window_frac;
            ewi.indicator = parse_indicator(indicator);
            LowessConfig lowess;
            lowess.span = span;
            std::vector<PredictionRecord> preds;
            {
                py::gil_scoped_release release;
                preds = pipeline::score_dataset(d, ewi, lowess, threads);
            }
            py::list out;
            for (const auto& p : preds) out.append(py::make_tuple(p.id, p.p_transcritical, p.eval_start_index));
            return out;
        },
        py::arg("dataset"), py::arg("window_frac") = 0.5, py::arg("indicator") = "variance", py::arg("span") = 0.2,
        py::arg("threads") = 1);

    m.def(
        "lowess",
        [](const py::array_t<double>& y, double span, int iters) {
            return to_array(lowess_smooth(from_array(y), LowessConfig{span, iters}));
        },
        py::arg("y"), py::arg("span") = 0.2, py::arg("robustness_iters") = 3);
    m.def("kendall_tau", [](const py::array_t<double>& x) { return kendall_tau(from_array(x)); }, py::arg("x"));
    m.def(
        "ewi_score",
        [](const py::array_t<double>& values, double window_frac, const std::string& indicator) {
            TimeSeries ts("x", BifurcationLabel::Unlabeled, from_array(values));
            return ewi_score(ts, EwiConfig{window_frac, parse_indicator(indicator), 10});
        },
        py::arg("values"), py::arg("window_frac") = 0.5, py::arg("indicator") = "variance");
    m.def(
        "roc",
        [](const py::array_t<double>& scores, const std::vector<bool>& positive) {
            const auto r = roc_from_scores(from_array(scores), positive);
            py::dict d;
            d["thresholds"] = to_array(r.thresholds);
            d["fpr"] = to_array(r.fpr);
            d["tpr"] = to_array(r.tpr);
            d["auc"] = r.auc;
            return d;
        },
        py::arg("scores"), py::arg("positive"));
    m.def(
        "stratified_split",
        [](const std::vector<std::string>& ids, const std::vector<std::string>& labels, std::array<double, 3> ratios,
           std::uint64_t seed) {
            if (ids.size() != labels.size()) throw Error(ErrorKind::InvalidArgument, "ids and labels differ in length");
            LabelList l;
            for (std::size_t i = 0; i < ids.size(); ++i) l.emplace_back(ids[i], parse_label(labels[i]));
            const auto s = stratified_split(l, {ratios[0], ratios[1], ratios[2]}, seed);
            py::dict d;
            d["train"] = s.train;
            d["val"] = s.val;
            d["test"] = s.test;
            return d;
        },
        py::arg("ids"), py::arg("labels"), py::arg("ratios") = std::array<double, 3>{0.8, 0.15, 0.05},
        py::arg("seed") = 0);
    m.attr("__version__") = pipeline::kGeneratorVersion;
}
