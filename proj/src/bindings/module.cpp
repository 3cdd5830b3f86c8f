#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "anobench/errors.hpp"
#include "anobench/likelihood.hpp"
#include "anobench/pipeline.hpp"
#include "anobench/scoring.hpp"
#include "anobench/series.hpp"
#include "anobench/stats.hpp"
#include "anobench/timeutil.hpp"

namespace py = pybind11;
using namespace anobench;

PYBIND11_MODULE(_core, m) {
    m.doc() = "anobench core: telemetry anomaly-detection benchmark pipeline";
    m.attr("__version__") = "0.1.0";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<MissingInputError>(m, "MissingInputError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<TrainingDivergence>(m, "TrainingDivergence");
    py::register_exception<IoError>(m, "IoError");

    // --- time ---
    py::class_<OffsetDateTime>(m, "OffsetDateTime")
        .def(py::init([](int64_t epoch, int32_t offset) {
                 return OffsetDateTime{epoch, offset};
             }),
             py::arg("epoch_seconds"), py::arg("offset_seconds") = 0)
        .def_readwrite("epoch_seconds", &OffsetDateTime::epoch_seconds)
        .def_readwrite("offset_seconds", &OffsetDateTime::offset_seconds)
        .def("__repr__", [](const OffsetDateTime& t) { return format_iso8601(t); });
    m.def("floor_to_interval", &floor_to_interval, py::arg("timestamp"),
          py::arg("interval_seconds") = kDefaultIntervalSeconds);
    m.def("parse_iso8601", [](const std::string& s) { return parse_iso8601(s); });
    m.def("format_iso8601", &format_iso8601);
    m.def("utc_civil", &utc_civil, py::arg("year"), py::arg("month"), py::arg("day"),
          py::arg("hour") = 0, py::arg("minute") = 0, py::arg("second") = 0);
    m.def("format_utc", &format_utc);

    // --- column grammar ---
    py::enum_<Kind>(m, "Kind").value("CLIENT", Kind::Client).value("SERVER", Kind::Server);
    py::enum_<StatName>(m, "StatName")
        .value("MINIMUM", StatName::Minimum)
        .value("MAXIMUM", StatName::Maximum)
        .value("MEDIAN", StatName::Median)
        .value("AVERAGE", StatName::Average)
        .value("COUNT", StatName::Count)
        .value("STD_DEV", StatName::StdDev)
        .value("SKEWNESS", StatName::Skewness)
        .value("KURTOSIS", StatName::Kurtosis);
    py::class_<SeriesKey>(m, "SeriesKey")
        .def(py::init([](std::string location, Kind kind, std::string host, std::string method,
                         int status_code, std::string endpoint) {
                 return make_series_key(std::move(location), kind, std::move(host),
                                        std::move(method), status_code, std::move(endpoint));
             }),
             py::arg("location"), py::arg("kind"), py::arg("host"), py::arg("method"),
             py::arg("status_code"), py::arg("endpoint"))
        .def_readwrite("location", &SeriesKey::location)
        .def_readwrite("kind", &SeriesKey::kind)
        .def_readwrite("host", &SeriesKey::host)
        .def_readwrite("method", &SeriesKey::method)
        .def_readwrite("status_code", &SeriesKey::status_code)
        .def_readwrite("endpoint", &SeriesKey::endpoint)
        .def("validate", &SeriesKey::validate)
        .def("is_5xx", &SeriesKey::is_5xx)
        .def("__eq__", [](const SeriesKey& a, const SeriesKey& b) { return a == b; });
    m.def("render_column_name", [](const SeriesKey& key, StatName stat) {
        return render_column_name(key, stat).rendered;
    });
    m.def("parse_column_name", [](const std::string& text) { return parse_column_name(text); });

    // --- statistics ---
    py::class_<AggregateStats>(m, "AggregateStats")
        .def_readonly("minimum", &AggregateStats::minimum)
        .def_readonly("maximum", &AggregateStats::maximum)
        .def_readonly("median", &AggregateStats::median)
        .def_readonly("average", &AggregateStats::average)
        .def_readonly("count", &AggregateStats::count)
        .def_readonly("std_dev", &AggregateStats::std_dev)
        .def_readonly("skewness", &AggregateStats::skewness)
        .def_readonly("kurtosis", &AggregateStats::kurtosis);
    m.def("compute_stats", [](const std::vector<double>& values) {
        return compute_stats(std::span<const double>(values.data(), values.size()));
    });

    // --- likelihood ---
    m.def("gaussian_tail_q", &gaussian_tail_q);
    py::class_<LikelihoodParams>(m, "LikelihoodParams")
        .def(py::init([](int long_window, int short_window, double threshold,
                         double sigma_floor) {
                 LikelihoodParams p{long_window, short_window, threshold, sigma_floor};
                 p.validate();
                 return p;
             }),
             py::arg("long_window") = 30, py::arg("short_window") = 2,
             py::arg("threshold") = 0.9996, py::arg("sigma_floor") = 1e-9)
        .def_readwrite("long_window", &LikelihoodParams::long_window)
        .def_readwrite("short_window", &LikelihoodParams::short_window)
        .def_readwrite("threshold", &LikelihoodParams::threshold)
        .def_readwrite("sigma_floor", &LikelihoodParams::sigma_floor);
    py::class_<LikelihoodPoint>(m, "LikelihoodPoint")
        .def_readonly("likelihood", &LikelihoodPoint::likelihood)
        .def_readonly("mean_long", &LikelihoodPoint::mean_long)
        .def_readonly("std_long", &LikelihoodPoint::std_long)
        .def_readonly("mean_short", &LikelihoodPoint::mean_short)
        .def_readonly("warmup", &LikelihoodPoint::warmup);
    py::class_<AnomalyLikelihood>(m, "AnomalyLikelihood")
        .def(py::init<LikelihoodParams>())
        .def("update", &AnomalyLikelihood::update)
        .def_property_readonly("count", &AnomalyLikelihood::count);
    m.def("classify", &classify);

    // --- scoring ---
    py::class_<CostProfile>(m, "CostProfile")
        .def(py::init([](std::string name, double tp, double fn, double fp, double tn) {
                 return CostProfile{std::move(name), tp, fn, fp, tn};
             }),
             py::arg("name"), py::arg("tp_weight") = 1.0, py::arg("fn_weight") = 1.0,
             py::arg("fp_weight") = 0.11, py::arg("tn_weight") = 1.0)
        .def_readonly("name", &CostProfile::name)
        .def_readonly("tp_weight", &CostProfile::tp_weight)
        .def_readonly("fn_weight", &CostProfile::fn_weight)
        .def_readonly("fp_weight", &CostProfile::fp_weight)
        .def_readonly("tn_weight", &CostProfile::tn_weight);
    m.def("standard_profile", []() { return standard_profile(); });
    m.def("reward_low_fn_profile", []() { return reward_low_fn_profile(); });
    m.def("profile_by_name", [](const std::string& n) { return profile_by_name(n); });
    py::class_<AnomalyWindow>(m, "AnomalyWindow")
        .def(py::init([](int number, int64_t start, int64_t end, int source) {
                 return AnomalyWindow{number, utc_time(start), utc_time(end), source};
             }),
             py::arg("number"), py::arg("start"), py::arg("end"), py::arg("source") = 1)
        .def_readonly("number", &AnomalyWindow::number)
        .def_readonly("source", &AnomalyWindow::source)
        .def_property_readonly("start",
                               [](const AnomalyWindow& w) { return w.start.epoch_seconds; })
        .def_property_readonly("end",
                               [](const AnomalyWindow& w) { return w.end.epoch_seconds; });
    py::class_<DetectionSeries>(m, "DetectionSeries")
        .def(py::init([](std::vector<int64_t> axis, std::vector<bool> flags) {
                 DetectionSeries s{std::move(axis), std::move(flags)};
                 s.validate();
                 return s;
             }),
             py::arg("axis"), py::arg("flags"))
        .def_readonly("axis", &DetectionSeries::axis)
        .def_readonly("flags", &DetectionSeries::flags);
    py::class_<NabScore>(m, "NabScore")
        .def_readonly("raw", &NabScore::raw)
        .def_readonly("raw_null", &NabScore::raw_null)
        .def_readonly("raw_perfect", &NabScore::raw_perfect)
        .def_readonly("normalized", &NabScore::normalized);
    m.def("nab_detection_weight", &nab_detection_weight);
    m.def("nab_score", &nab_score, py::arg("series"), py::arg("windows"), py::arg("profile"));

    // --- pipeline ---
    py::class_<StageTiming>(m, "StageTiming")
        .def_readonly("stage", &StageTiming::stage)
        .def_readonly("seconds", &StageTiming::seconds);
    py::class_<OutputDigest>(m, "OutputDigest")
        .def_readonly("path", &OutputDigest::path)
        .def_readonly("bytes", &OutputDigest::bytes)
        .def_readonly("sha256", &OutputDigest::sha256);
    py::class_<RunManifest>(m, "RunManifest")
        .def_readonly("config_sha256", &RunManifest::config_sha256)
        .def_readonly("seed", &RunManifest::seed)
        .def_readonly("version", &RunManifest::version)
        .def_readonly("timings", &RunManifest::timings)
        .def_readonly("outputs", &RunManifest::outputs);
    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def_static("from_json", &PipelineConfig::from_json)
        .def_static("from_json_file", &PipelineConfig::from_json_file)
        .def_readwrite("seed", &PipelineConfig::seed)
        .def_readwrite("out_dir", &PipelineConfig::out_dir)
        .def("apply_seed", &PipelineConfig::apply_seed)
        .def("validate", &PipelineConfig::validate)
        .def("to_json", &PipelineConfig::to_json)
        .def("path", &PipelineConfig::path);
    m.def("default_desk_config", &default_desk_config);
    m.def("stage_generate", &stage_generate);
    m.def("stage_aggregate", &stage_aggregate);
    m.def("stage_train", &stage_train, py::call_guard<py::gil_scoped_release>());
    m.def("stage_detect", &stage_detect, py::call_guard<py::gil_scoped_release>());
    m.def("stage_score", [](const PipelineConfig& cfg) { return score_report_json(stage_score(cfg)); });
    m.def("stage_sweep", &stage_sweep);
    m.def("run_all", &run_all, py::call_guard<py::gil_scoped_release>());
    m.def("read_manifest", &read_manifest);
}
