#include "anobench/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anobench/csv.hpp"
#include "anobench/digest.hpp"
#include "anobench/errors.hpp"
#include "anobench/logging.hpp"

namespace anobench {

namespace {

using nlohmann::json;

// Time fields accept epoch seconds or the files' ISO form.
int64_t time_field(const json& v, const std::string& what) {
    if (v.is_number_integer()) return v.get<int64_t>();
    if (v.is_string()) return parse_iso8601(v.get<std::string>()).epoch_seconds;
    throw ConfigError(what + " must be epoch seconds or an ISO-8601 string");
}

void expect_object(const json& j, const std::string& what) {
    if (!j.is_object()) {
        throw ConfigError(what + " must be a JSON object");
    }
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

void read_time(const json& j, const char* key, int64_t& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    out = time_field(*it, key);
}

}  // namespace

void PipelineConfig::validate() const {
    if (out_dir.empty()) {
        throw ConfigError("out_dir is empty");
    }
    if (aggregation.interval_seconds <= 0) {
        throw ConfigError("aggregation interval must be positive");
    }
    if (aggregation.malformed_threshold < 0.0 ||
        aggregation.malformed_threshold > 1.0) {
        throw ConfigError("malformed_threshold must lie in [0, 1]");
    }
    SplitSpec split{features.train_start, features.train_end, features.test_start,
                    features.test_end, features.anomaly_buffer_seconds};
    split.validate();
    if (detector.kind == DetectorKind::Ann) {
        if (detector.ann.input_dim > 0) detector.ann.validate();
    } else {
        if (detector.gru.input_dim > 0) detector.gru.validate();
    }
    detector.train.validate();
    likelihood.validate();
    if (scoring.profiles.empty()) {
        throw ConfigError("scoring needs at least one profile");
    }
    for (const auto& name : scoring.profiles) {
        profile_by_name(name);  // throws on unknown names
    }
}

std::string PipelineConfig::path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
}

void PipelineConfig::apply_seed(uint64_t new_seed) {
    seed = new_seed;
    generator.seed = new_seed;
    detector.train.seed = new_seed;
}

std::string PipelineConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir;

    json g;
    g["seed"] = generator.seed;
    g["start"] = format_utc(generator.start);
    g["end"] = format_utc(generator.end);
    g["locations"] = generator.locations;
    g["hosts"] = generator.hosts;
    g["endpoints"] = generator.endpoints;
    g["methods"] = generator.methods;
    g["base_rate"] = generator.base_rate;
    g["daily_amp"] = generator.daily_amp;
    g["weekly_amp"] = generator.weekly_amp;
    g["error_rate_normal"] = generator.error_rate_normal;
    g["annotation_lead_seconds"] = generator.annotation_lead_seconds;
    g["interval_seconds"] = generator.interval_seconds;
    g["anomalies"] = json::array();
    for (const auto& a : generator.anomalies) {
        g["anomalies"].push_back({{"start", format_utc(a.start)},
                                  {"end", format_utc(a.end)},
                                  {"locations", a.locations},
                                  {"error_multiplier", a.error_multiplier},
                                  {"latency_multiplier", a.latency_multiplier},
                                  {"source", a.source}});
    }
    g["downtimes"] = json::array();
    for (const auto& d : generator.downtimes) {
        g["downtimes"].push_back({{"location", d.location},
                                  {"start", format_utc(d.start)},
                                  {"end", format_utc(d.end)}});
    }
    j["generator"] = std::move(g);

    j["aggregation"] = {
        {"interval_seconds", aggregation.interval_seconds},
        {"on_malformed",
         aggregation.on_malformed == MalformedPolicy::Fail ? "fail" : "skip"},
        {"malformed_threshold", aggregation.malformed_threshold},
        {"range_start", format_utc(aggregation.range_start)},
        {"range_end", format_utc(aggregation.range_end)},
    };

    j["features"] = {
        {"train_start", format_utc(features.train_start)},
        {"train_end", format_utc(features.train_end)},
        {"test_start", format_utc(features.test_start)},
        {"test_end", format_utc(features.test_end)},
        {"anomaly_buffer_seconds", features.anomaly_buffer_seconds},
    };

    json det;
    det["kind"] = detector.kind == DetectorKind::Ann ? "ann" : "gru";
    det["ann"] = {{"input_dim", detector.ann.input_dim},
                  {"encoder_widths", detector.ann.encoder_widths},
                  {"latent", detector.ann.latent},
                  {"leaky_slope", detector.ann.leaky_slope},
                  {"batch_norm", detector.ann.batch_norm},
                  {"dropout", detector.ann.dropout}};
    det["gru"] = {{"input_dim", detector.gru.input_dim},
                  {"encoder_layers", detector.gru.encoder_layers},
                  {"decoder_layers", detector.gru.decoder_layers},
                  {"units", detector.gru.units},
                  {"latent", detector.gru.latent},
                  {"seq_len", detector.gru.seq_len},
                  {"relu_cell", detector.gru.relu_cell}};
    det["train"] = {
        {"epochs", detector.train.epochs},
        {"batch_size", detector.train.batch_size},
        {"learning_rate", detector.train.learning_rate},
        {"optimizer",
         detector.train.optimizer == nn::OptimizerKind::Adam ? "adam"
                                                             : "sgd_momentum"},
        {"momentum", detector.train.momentum},
        {"beta1", detector.train.beta1},
        {"beta2", detector.train.beta2},
        {"adam_eps", detector.train.adam_eps},
        {"seed", detector.train.seed},
    };
    j["detector"] = std::move(det);

    j["likelihood"] = {
        {"long_window", likelihood.long_window},
        {"short_window", likelihood.short_window},
        {"threshold", likelihood.threshold},
        {"sigma_floor", likelihood.sigma_floor},
    };

    j["scoring"] = {{"profiles", scoring.profiles}};

    j["paths"] = {
        {"records", paths.records},
        {"anomaly_windows", paths.anomaly_windows},
        {"location_downtime", paths.location_downtime},
        {"unpivoted", paths.unpivoted},
        {"pivoted", paths.pivoted},
        {"scaler", paths.scaler},
        {"weights", paths.weights},
        {"loss_curve", paths.loss_curve},
        {"detect", paths.detect},
        {"score_json", paths.score_json},
        {"score_csv", paths.score_csv},
        {"sweep", paths.sweep},
        {"manifest", paths.manifest},
        {"config_echo", paths.config_echo},
    };

    return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    expect_object(j, "config");

    PipelineConfig cfg = default_desk_config();
    read_into(j, "seed", cfg.seed);
    read_into(j, "out_dir", cfg.out_dir);

    bool generator_seed_given = false;
    bool train_seed_given = false;

    if (auto it = j.find("generator"); it != j.end()) {
        expect_object(*it, "generator");
        const json& g = *it;
        generator_seed_given = g.contains("seed");
        read_into(g, "seed", cfg.generator.seed);
        read_time(g, "start", cfg.generator.start);
        read_time(g, "end", cfg.generator.end);
        read_into(g, "locations", cfg.generator.locations);
        read_into(g, "hosts", cfg.generator.hosts);
        read_into(g, "endpoints", cfg.generator.endpoints);
        read_into(g, "methods", cfg.generator.methods);
        read_into(g, "base_rate", cfg.generator.base_rate);
        read_into(g, "daily_amp", cfg.generator.daily_amp);
        read_into(g, "weekly_amp", cfg.generator.weekly_amp);
        read_into(g, "error_rate_normal", cfg.generator.error_rate_normal);
        read_into(g, "annotation_lead_seconds",
                  cfg.generator.annotation_lead_seconds);
        read_into(g, "interval_seconds", cfg.generator.interval_seconds);
        if (auto an = g.find("anomalies"); an != g.end()) {
            cfg.generator.anomalies.clear();
            for (const auto& a : *an) {
                expect_object(a, "anomaly");
                AnomalyInjection inj;
                read_time(a, "start", inj.start);
                read_time(a, "end", inj.end);
                read_into(a, "locations", inj.locations);
                read_into(a, "error_multiplier", inj.error_multiplier);
                read_into(a, "latency_multiplier", inj.latency_multiplier);
                read_into(a, "source", inj.source);
                cfg.generator.anomalies.push_back(std::move(inj));
            }
        }
        if (auto dn = g.find("downtimes"); dn != g.end()) {
            cfg.generator.downtimes.clear();
            for (const auto& d : *dn) {
                expect_object(d, "downtime");
                DowntimeSpec spec;
                read_into(d, "location", spec.location);
                read_time(d, "start", spec.start);
                read_time(d, "end", spec.end);
                cfg.generator.downtimes.push_back(std::move(spec));
            }
        }
    }

    if (auto it = j.find("aggregation"); it != j.end()) {
        expect_object(*it, "aggregation");
        const json& a = *it;
        read_into(a, "interval_seconds", cfg.aggregation.interval_seconds);
        if (auto m = a.find("on_malformed"); m != a.end()) {
            const std::string v = m->get<std::string>();
            if (v == "skip") {
                cfg.aggregation.on_malformed = MalformedPolicy::Skip;
            } else if (v == "fail") {
                cfg.aggregation.on_malformed = MalformedPolicy::Fail;
            } else {
                throw ConfigError("on_malformed must be 'skip' or 'fail'");
            }
        }
        read_into(a, "malformed_threshold", cfg.aggregation.malformed_threshold);
        read_time(a, "range_start", cfg.aggregation.range_start);
        read_time(a, "range_end", cfg.aggregation.range_end);
    }

    if (auto it = j.find("features"); it != j.end()) {
        expect_object(*it, "features");
        const json& f = *it;
        read_time(f, "train_start", cfg.features.train_start);
        read_time(f, "train_end", cfg.features.train_end);
        read_time(f, "test_start", cfg.features.test_start);
        read_time(f, "test_end", cfg.features.test_end);
        read_into(f, "anomaly_buffer_seconds",
                  cfg.features.anomaly_buffer_seconds);
    }

    if (auto it = j.find("detector"); it != j.end()) {
        expect_object(*it, "detector");
        const json& d = *it;
        if (auto k = d.find("kind"); k != d.end()) {
            const std::string v = k->get<std::string>();
            if (v == "ann") {
                cfg.detector.kind = DetectorKind::Ann;
            } else if (v == "gru") {
                cfg.detector.kind = DetectorKind::Gru;
            } else {
                throw ConfigError("detector kind must be 'ann' or 'gru'");
            }
        }
        if (auto a = d.find("ann"); a != d.end()) {
            expect_object(*a, "detector.ann");
            read_into(*a, "input_dim", cfg.detector.ann.input_dim);
            read_into(*a, "encoder_widths", cfg.detector.ann.encoder_widths);
            read_into(*a, "latent", cfg.detector.ann.latent);
            read_into(*a, "leaky_slope", cfg.detector.ann.leaky_slope);
            read_into(*a, "batch_norm", cfg.detector.ann.batch_norm);
            read_into(*a, "dropout", cfg.detector.ann.dropout);
        }
        if (auto gj = d.find("gru"); gj != d.end()) {
            expect_object(*gj, "detector.gru");
            read_into(*gj, "input_dim", cfg.detector.gru.input_dim);
            read_into(*gj, "encoder_layers", cfg.detector.gru.encoder_layers);
            read_into(*gj, "decoder_layers", cfg.detector.gru.decoder_layers);
            read_into(*gj, "units", cfg.detector.gru.units);
            read_into(*gj, "latent", cfg.detector.gru.latent);
            read_into(*gj, "seq_len", cfg.detector.gru.seq_len);
            read_into(*gj, "relu_cell", cfg.detector.gru.relu_cell);
        }
        if (auto t = d.find("train"); t != d.end()) {
            expect_object(*t, "detector.train");
            train_seed_given = t->contains("seed");
            read_into(*t, "epochs", cfg.detector.train.epochs);
            read_into(*t, "batch_size", cfg.detector.train.batch_size);
            read_into(*t, "learning_rate", cfg.detector.train.learning_rate);
            if (auto o = t->find("optimizer"); o != t->end()) {
                const std::string v = o->get<std::string>();
                if (v == "adam") {
                    cfg.detector.train.optimizer = nn::OptimizerKind::Adam;
                } else if (v == "sgd_momentum") {
                    cfg.detector.train.optimizer = nn::OptimizerKind::SgdMomentum;
                } else {
                    throw ConfigError(
                        "optimizer must be 'adam' or 'sgd_momentum'");
                }
            }
            read_into(*t, "momentum", cfg.detector.train.momentum);
            read_into(*t, "beta1", cfg.detector.train.beta1);
            read_into(*t, "beta2", cfg.detector.train.beta2);
            read_into(*t, "adam_eps", cfg.detector.train.adam_eps);
            read_into(*t, "seed", cfg.detector.train.seed);
        }
    }

    if (auto it = j.find("likelihood"); it != j.end()) {
        expect_object(*it, "likelihood");
        read_into(*it, "long_window", cfg.likelihood.long_window);
        read_into(*it, "short_window", cfg.likelihood.short_window);
        read_into(*it, "threshold", cfg.likelihood.threshold);
        read_into(*it, "sigma_floor", cfg.likelihood.sigma_floor);
    }

    if (auto it = j.find("scoring"); it != j.end()) {
        expect_object(*it, "scoring");
        read_into(*it, "profiles", cfg.scoring.profiles);
    }

    if (auto it = j.find("paths"); it != j.end()) {
        expect_object(*it, "paths");
        const json& p = *it;
        read_into(p, "records", cfg.paths.records);
        read_into(p, "anomaly_windows", cfg.paths.anomaly_windows);
        read_into(p, "location_downtime", cfg.paths.location_downtime);
        read_into(p, "unpivoted", cfg.paths.unpivoted);
        read_into(p, "pivoted", cfg.paths.pivoted);
        read_into(p, "scaler", cfg.paths.scaler);
        read_into(p, "weights", cfg.paths.weights);
        read_into(p, "loss_curve", cfg.paths.loss_curve);
        read_into(p, "detect", cfg.paths.detect);
        read_into(p, "score_json", cfg.paths.score_json);
        read_into(p, "score_csv", cfg.paths.score_csv);
        read_into(p, "sweep", cfg.paths.sweep);
        read_into(p, "manifest", cfg.paths.manifest);
        read_into(p, "config_echo", cfg.paths.config_echo);
    }

    // An explicit top-level seed reseeds the derived sections unless they
    // pinned their own.
    if (j.contains("seed")) {
        if (!generator_seed_given) cfg.generator.seed = cfg.seed;
        if (!train_seed_given) cfg.detector.train.seed = cfg.seed;
    }

    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
    auto in = csv::open_input(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

PipelineConfig default_desk_config() {
    PipelineConfig cfg;
    cfg.seed = 20240122;
    cfg.out_dir = "out";

    const int64_t start = utc_civil(2024, 1, 22);  // a Monday
    const int64_t week = kSecondsPerWeek;
    const int64_t end = start + 6 * week;
    const int64_t test_start = start + 3 * week;

    auto& g = cfg.generator;
    g.seed = cfg.seed;
    g.start = start;
    g.end = end;
    g.locations = 2;
    g.hosts = 3;
    g.endpoints = 10;
    g.methods = {"GET", "POST", "PUT"};
    g.base_rate = 0.3;
    g.daily_amp = 0.5;
    g.weekly_amp = 0.25;
    g.error_rate_normal = 0.05;
    g.interval_seconds = kDefaultIntervalSeconds;

    auto day = [&](int d) { return start + d * kSecondsPerDay; };
    auto at = [&](int d, int h, int m = 0) {
        return day(d) + h * 3600 + m * 60;
    };
    g.anomalies = {
        {at(22, 6), at(22, 9), {"datacenter1"}, 15.0, 3.0, 0},
        {at(25, 14), at(25, 16), {"datacenter2"}, 15.0, 3.0, 0},
        {at(29, 1), at(29, 3, 30), {}, 15.0, 3.0, 0},
        {at(33, 18), at(33, 21), {"datacenter1"}, 15.0, 3.0, 0},
        {at(38, 10), at(38, 12), {"datacenter2"}, 15.0, 3.0, 0},
    };
    g.downtimes = {
        {"datacenter1", at(7, 2), at(7, 4)},
        {"datacenter2", at(14, 3), at(14, 4)},
    };

    cfg.aggregation.range_start = start;
    cfg.aggregation.range_end = end;

    cfg.features.train_start = start;
    cfg.features.train_end = test_start;
    cfg.features.test_start = test_start;
    cfg.features.test_end = end;
    cfg.features.anomaly_buffer_seconds = 0;

    cfg.detector.kind = DetectorKind::Gru;
    cfg.detector.ann.input_dim = 0;  // inferred from the data at train time
    cfg.detector.gru.input_dim = 0;
    cfg.detector.train.epochs = 30;
    cfg.detector.train.batch_size = 64;
    cfg.detector.train.learning_rate = 1e-3;
    cfg.detector.train.seed = cfg.seed;

    return cfg;
}

const std::vector<double>& sweep_thresholds() {
    static const std::vector<double> v = {0.9990, 0.9995, 0.9996, 0.9997, 0.9998};
    return v;
}

const std::vector<int>& sweep_long_windows() {
    static const std::vector<int> v = {20, 25, 30, 35, 40, 50};
    return v;
}

const std::vector<int>& sweep_short_windows() {
    static const std::vector<int> v = {1, 2, 3, 4, 5};
    return v;
}

namespace {

void ensure_out_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + cfg.out_dir +
                      "': " + ec.message());
    }
}

struct DetectRow {
    int64_t interval_start;
    double sum5xx_norm;
    double recon_error;
    double likelihood;
    bool flag;
};

std::vector<DetectRow> read_detect_rows(const std::string& path) {
    auto in = csv::open_input(path);
    std::string line;
    if (!csv::getline(in, line) ||
        line != "interval_start,sum5xx_norm,recon_error,likelihood,flag") {
        throw DataError("bad header in '" + path + "'");
    }
    std::vector<DetectRow> rows;
    size_t lineno = 1;
    while (csv::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != 5) {
            throw DataError("'" + path + "' line " + std::to_string(lineno) +
                            " has " + std::to_string(fields.size()) + " fields");
        }
        DetectRow r;
        r.interval_start = csv::parse_int(fields[0]);
        r.sum5xx_norm = csv::parse_double(fields[1]);
        r.recon_error = csv::parse_double(fields[2]);
        r.likelihood = csv::parse_double(fields[3]);
        const int64_t flag = csv::parse_int(fields[4]);
        if (flag != 0 && flag != 1) {
            throw DataError("flag must be 0 or 1 on line " +
                            std::to_string(lineno));
        }
        r.flag = flag == 1;
        rows.push_back(r);
    }
    if (rows.empty()) {
        throw DataError("'" + path + "' holds no detection rows");
    }
    return rows;
}

// Range for the dense pivot axis: explicit aggregation range, falling back to
// the generator range.
std::pair<int64_t, int64_t> frame_range(const PipelineConfig& cfg) {
    int64_t lo = cfg.aggregation.range_start;
    int64_t hi = cfg.aggregation.range_end;
    if (lo == 0 && hi == 0) {
        lo = cfg.generator.start;
        hi = cfg.generator.end;
    }
    if (hi <= lo) {
        throw ConfigError("empty aggregation range");
    }
    return {lo, hi};
}

// Shared by train and detect: 5XX/count selection, split, seasonality.
struct PreparedFeatures {
    PivotedFrame train_frame;
    PivotedFrame test_frame;
    FeatureMatrix train;  // seasonality appended, unscaled
    FeatureMatrix test;
};

PreparedFeatures prepare_features(const PipelineConfig& cfg) {
    PivotedFrame frame = PivotedFrame::read_csv_file(cfg.path(cfg.paths.pivoted));
    PivotedFrame selected = select_5xx_count(frame);
    GroundTruth truth = load_ground_truth(cfg.path(cfg.paths.anomaly_windows),
                                          cfg.path(cfg.paths.location_downtime));
    SplitSpec spec{cfg.features.train_start, cfg.features.train_end,
                   cfg.features.test_start, cfg.features.test_end,
                   cfg.features.anomaly_buffer_seconds};
    PreparedFeatures out;
    std::tie(out.train_frame, out.test_frame) =
        split(selected, spec, truth.windows);
    out.train = frame_to_matrix(out.train_frame);
    add_seasonality(out.train);
    out.test = frame_to_matrix(out.test_frame);
    add_seasonality(out.test);
    return out;
}

std::unique_ptr<nn::Autoencoder> build_detector(const PipelineConfig& cfg,
                                                int input_dim) {
    if (cfg.detector.kind == DetectorKind::Ann) {
        nn::AnnSpec spec = cfg.detector.ann;
        if (spec.input_dim == 0) spec.input_dim = input_dim;
        if (spec.input_dim != input_dim) {
            throw ConfigError("ann input_dim " + std::to_string(spec.input_dim) +
                              " does not match the data's " +
                              std::to_string(input_dim) + " features");
        }
        return std::make_unique<nn::AnnAutoencoder>(spec);
    }
    nn::GruSpec spec = cfg.detector.gru;
    if (spec.input_dim == 0) spec.input_dim = input_dim;
    if (spec.input_dim != input_dim) {
        throw ConfigError("gru input_dim " + std::to_string(spec.input_dim) +
                          " does not match the data's " +
                          std::to_string(input_dim) + " features");
    }
    return std::make_unique<nn::GruAutoencoder>(spec);
}

}  // namespace

void stage_generate(const PipelineConfig& cfg) {
    cfg.generator.validate();
    ensure_out_dir(cfg);
    GroundTruth truth = generate_to_file(cfg.generator, cfg.path(cfg.paths.records));
    write_ground_truth(truth, cfg.path(cfg.paths.anomaly_windows),
                       cfg.path(cfg.paths.location_downtime));
}

void stage_aggregate(const PipelineConfig& cfg) {
    ensure_out_dir(cfg);
    AggregateOptions options{cfg.aggregation.interval_seconds,
                             cfg.aggregation.on_malformed,
                             cfg.aggregation.malformed_threshold};
    AggregateResult result =
        aggregate_file(cfg.path(cfg.paths.records), options);
    result.table.write_csv_file(cfg.path(cfg.paths.unpivoted));
    auto [lo, hi] = frame_range(cfg);
    PivotedFrame frame =
        pivot(result.table, lo, hi, cfg.aggregation.interval_seconds);
    frame.write_csv_file(cfg.path(cfg.paths.pivoted));
    log_info() << "aggregate: " << result.table.size() << " unpivoted rows, "
               << frame.rows() << "x" << frame.cols() << " frame";
}

void stage_train(const PipelineConfig& cfg) {
    PreparedFeatures prep = prepare_features(cfg);

    MinMaxScaler scaler;
    scaler.fit(prep.train);
    scaler.save(cfg.path(cfg.paths.scaler));
    FeatureMatrix scaled = scaler.transform(prep.train);

    auto model =
        build_detector(cfg, static_cast<int>(scaled.values.cols()));
    log_info() << "training " << model->kind() << " on " << scaled.values.rows()
               << " rows x " << scaled.values.cols() << " features ("
               << model->parameter_count() << " parameters)";
    nn::TrainResult result = train(*model, scaled.values, cfg.detector.train);
    nn::write_loss_curve(result, cfg.path(cfg.paths.loss_curve));
    nn::save_model(*model, cfg.detector.train.seed, cfg.path(cfg.paths.weights));
}

void stage_detect(const PipelineConfig& cfg) {
    PreparedFeatures prep = prepare_features(cfg);
    MinMaxScaler scaler = MinMaxScaler::load(cfg.path(cfg.paths.scaler));
    nn::LoadedModel loaded = nn::load_model(cfg.path(cfg.paths.weights));
    FeatureMatrix scaled = scaler.transform(prep.test);
    if (scaled.values.cols() != loaded.model->input_dim()) {
        throw DataError("scaled test matrix has " +
                        std::to_string(scaled.values.cols()) +
                        " features, model expects " +
                        std::to_string(loaded.model->input_dim()));
    }

    Eigen::VectorXd errors =
        nn::reconstruction_errors(*loaded.model, scaled.values);

    // Plot series: min-max normalized row sums of the raw 5XX counts
    // (the seasonality features sit in the last four columns).
    Eigen::VectorXd sums =
        prep.test.values.leftCols(prep.test.values.cols() - 4).rowwise().sum();
    const double lo = sums.minCoeff();
    const double hi = sums.maxCoeff();
    Eigen::VectorXd sums_norm =
        hi > lo ? ((sums.array() - lo) / (hi - lo)).matrix().eval()
                : Eigen::VectorXd::Zero(sums.size()).eval();

    AnomalyLikelihood state(cfg.likelihood);
    auto out = csv::open_output(cfg.path(cfg.paths.detect));
    out << "interval_start,sum5xx_norm,recon_error,likelihood,flag\n";
    for (Eigen::Index i = 0; i < errors.size(); ++i) {
        LikelihoodPoint point = state.update(errors[i]);
        const bool flag = classify(point, cfg.likelihood);
        out << prep.test.axis[static_cast<size_t>(i)] << ','
            << csv::format_double(sums_norm[i]) << ','
            << csv::format_double(errors[i]) << ','
            << csv::format_double(point.likelihood) << ',' << (flag ? 1 : 0)
            << '\n';
    }
    if (!out) throw IoError("write failed for detection series");
}

ScoreReport stage_score(const PipelineConfig& cfg) {
    std::vector<DetectRow> rows = read_detect_rows(cfg.path(cfg.paths.detect));
    DetectionSeries series;
    for (const auto& r : rows) {
        series.axis.push_back(r.interval_start);
        series.flags.push_back(r.flag);
    }
    GroundTruth truth = load_ground_truth(cfg.path(cfg.paths.anomaly_windows),
                                          cfg.path(cfg.paths.location_downtime));
    std::vector<CostProfile> profiles;
    for (const auto& name : cfg.scoring.profiles) {
        profiles.push_back(profile_by_name(name));
    }
    ScoreReport report = score_report(series, truth, profiles);
    write_score_report(report, cfg.path(cfg.paths.score_json),
                       cfg.path(cfg.paths.score_csv));
    return report;
}

void stage_sweep(const PipelineConfig& cfg) {
    std::vector<DetectRow> rows = read_detect_rows(cfg.path(cfg.paths.detect));
    GroundTruth truth = load_ground_truth(cfg.path(cfg.paths.anomaly_windows),
                                          cfg.path(cfg.paths.location_downtime));

    DetectionSeries series;
    for (const auto& r : rows) series.axis.push_back(r.interval_start);
    series.flags.resize(series.axis.size());

    auto out = csv::open_output(cfg.path(cfg.paths.sweep));
    out << "threshold,long_window,short_window,windows_detected,windows_total,"
           "raw_standard,normalized_standard,raw_reward_low_fn,"
           "normalized_reward_low_fn\n";
    for (double threshold : sweep_thresholds()) {
        for (int w : sweep_long_windows()) {
            for (int ws : sweep_short_windows()) {
                LikelihoodParams params{w, ws, threshold,
                                        cfg.likelihood.sigma_floor};
                AnomalyLikelihood state(params);
                for (size_t i = 0; i < rows.size(); ++i) {
                    LikelihoodPoint point = state.update(rows[i].recon_error);
                    series.flags[i] = classify(point, params);
                }
                int detected = 0;
                int total = 0;
                for (const auto& [source, counts] :
                     per_source_counts(series, truth.windows)) {
                    detected += counts.first;
                    total += counts.second;
                }
                NabScore standard =
                    nab_score(series, truth.windows, standard_profile());
                NabScore low_fn =
                    nab_score(series, truth.windows, reward_low_fn_profile());
                out << csv::format_double(threshold) << ',' << w << ',' << ws
                    << ',' << detected << ',' << total << ','
                    << csv::format_double(standard.raw) << ','
                    << csv::format_double(standard.normalized) << ','
                    << csv::format_double(low_fn.raw) << ','
                    << csv::format_double(low_fn.normalized) << '\n';
            }
        }
    }
    if (!out) throw IoError("write failed for sweep table");
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j;
    j["format"] = "anobench-manifest";
    j["version"] = 1;
    j["config_sha256"] = manifest.config_sha256;
    j["seed"] = manifest.seed;
    j["tool_version"] = manifest.version;
    j["timings"] = json::array();
    for (const auto& t : manifest.timings) {
        j["timings"].push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    }
    j["outputs"] = json::array();
    for (const auto& o : manifest.outputs) {
        j["outputs"].push_back(
            {{"path", o.path}, {"bytes", o.bytes}, {"sha256", o.sha256}});
    }
    auto out = csv::open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

RunManifest read_manifest(const std::string& path) {
    auto in = csv::open_input(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("bad manifest '" + path + "': " + e.what());
    }
    if (j.value("format", "") != "anobench-manifest") {
        throw DataError("'" + path + "' is not a manifest");
    }
    RunManifest m;
    m.config_sha256 = j.value("config_sha256", "");
    m.seed = j.value("seed", uint64_t{0});
    m.version = j.value("tool_version", "");
    for (const auto& t : j.value("timings", json::array())) {
        m.timings.push_back(
            {t.value("stage", ""), t.value("seconds", 0.0)});
    }
    for (const auto& o : j.value("outputs", json::array())) {
        m.outputs.push_back({o.value("path", ""), o.value("bytes", uint64_t{0}),
                             o.value("sha256", "")});
    }
    return m;
}

RunManifest run_all(const PipelineConfig& cfg) {
    cfg.validate();
    cfg.generator.validate();
    ensure_out_dir(cfg);

    const std::string config_text = cfg.to_json();
    {
        auto out = csv::open_output(cfg.path(cfg.paths.config_echo));
        out << config_text << '\n';
        if (!out) throw IoError("write failed for config echo");
    }

    RunManifest manifest;
    // Location-independent hash: out_dir names where artifacts land, not
    // what they contain, so the same experiment hashes the same everywhere.
    PipelineConfig canonical = cfg;
    canonical.out_dir.clear();
    manifest.config_sha256 = sha256_hex(canonical.to_json());
    manifest.seed = cfg.seed;
    manifest.version = "anobench 0.1.0";

    auto timed = [&manifest](const char* name, auto&& fn) {
        const auto begin = std::chrono::steady_clock::now();
        fn();
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - begin;
        manifest.timings.push_back({name, elapsed.count()});
        log_info() << name << " finished in " << elapsed.count() << " s";
    };

    timed("generate", [&] { stage_generate(cfg); });
    timed("aggregate", [&] { stage_aggregate(cfg); });
    timed("train", [&] { stage_train(cfg); });
    timed("detect", [&] { stage_detect(cfg); });
    timed("score", [&] { stage_score(cfg); });
    timed("sweep", [&] { stage_sweep(cfg); });

    const std::vector<std::string> outputs = {
        cfg.paths.config_echo, cfg.paths.records,   cfg.paths.anomaly_windows,
        cfg.paths.location_downtime, cfg.paths.unpivoted, cfg.paths.pivoted,
        cfg.paths.scaler,      cfg.paths.weights,   cfg.paths.loss_curve,
        cfg.paths.detect,      cfg.paths.score_json, cfg.paths.score_csv,
        cfg.paths.sweep,
    };
    for (const auto& name : outputs) {
        const std::string full = cfg.path(name);
        OutputDigest digest;
        digest.path = name;
        digest.bytes = static_cast<uint64_t>(std::filesystem::file_size(full));
        digest.sha256 = sha256_file(full);
        manifest.outputs.push_back(std::move(digest));
    }
    write_manifest(manifest, cfg.path(cfg.paths.manifest));
    return manifest;
}

std::string score_report_json(const ScoreReport& report) {
    json j;
    j["point"] = {{"tp", report.point.tp},
                  {"tn", report.point.tn},
                  {"fp", report.point.fp},
                  {"fn", report.point.fn}};
    j["profiles"] = json::array();
    for (const auto& [profile, score] : report.profiles) {
        j["profiles"].push_back({{"name", profile.name},
                                 {"tp_weight", profile.tp_weight},
                                 {"fn_weight", profile.fn_weight},
                                 {"fp_weight", profile.fp_weight},
                                 {"tn_weight", profile.tn_weight},
                                 {"raw", score.raw},
                                 {"raw_null", score.raw_null},
                                 {"raw_perfect", score.raw_perfect},
                                 {"normalized", score.normalized}});
    }
    j["per_source"] = json::object();
    for (const auto& [source, counts] : report.per_source) {
        j["per_source"][std::to_string(source)] = {
            {"detected", counts.first}, {"total", counts.second}};
    }
    j["windows"] = json::array();
    for (const auto& w : report.windows) {
        j["windows"].push_back({{"number", w.number},
                                {"source", w.source},
                                {"detected", w.detected},
                                {"first_position", w.first_position},
                                {"first_time", w.first_time},
                                {"overlaps_downtime", w.overlaps_downtime}});
    }
    return j.dump(2);
}

void write_score_report(const ScoreReport& report, const std::string& json_path,
                        const std::string& csv_path) {
    {
        auto out = csv::open_output(json_path);
        out << score_report_json(report) << '\n';
        if (!out) throw IoError("write failed for '" + json_path + "'");
    }
    {
        int detected = 0;
        int total = 0;
        for (const auto& [source, counts] : report.per_source) {
            detected += counts.first;
            total += counts.second;
        }
        auto out = csv::open_output(csv_path);
        out << "profile,raw,normalized,tp,tn,fp,fn,windows_detected,"
               "windows_total\n";
        for (const auto& [profile, score] : report.profiles) {
            out << profile.name << ',' << csv::format_double(score.raw) << ','
                << csv::format_double(score.normalized) << ',' << report.point.tp
                << ',' << report.point.tn << ',' << report.point.fp << ','
                << report.point.fn << ',' << detected << ',' << total << '\n';
        }
        if (!out) throw IoError("write failed for '" + csv_path + "'");
    }
}

}  // namespace anobench
