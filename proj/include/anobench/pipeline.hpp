#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anobench/aggregate.hpp"
#include "anobench/features.hpp"
#include "anobench/generator.hpp"
#include "anobench/likelihood.hpp"
#include "anobench/nn/train.hpp"
#include "anobench/scoring.hpp"

namespace anobench {

enum class DetectorKind { Ann, Gru };

struct AggregationConfig {
    int64_t interval_seconds = kDefaultIntervalSeconds;
    MalformedPolicy on_malformed = MalformedPolicy::Skip;
    double malformed_threshold = 0.01;
    // Dense-axis range; 0/0 means inherit the generator range.
    int64_t range_start = 0;
    int64_t range_end = 0;
};

struct FeatureConfig {
    int64_t train_start = 0;
    int64_t train_end = 0;
    int64_t test_start = 0;
    int64_t test_end = 0;
    int64_t anomaly_buffer_seconds = 0;
};

struct DetectorConfig {
    DetectorKind kind = DetectorKind::Gru;
    nn::AnnSpec ann;  // input_dim filled from the data at train time
    nn::GruSpec gru;
    nn::TrainConfig train;
};

struct ScoringConfig {
    std::vector<std::string> profiles = {"standard", "reward_low_fn"};
};

// File names inside out_dir; override individually if needed.
struct PathsConfig {
    std::string records = "records.csv";
    std::string anomaly_windows = "anomaly_windows.csv";
    std::string location_downtime = "location_downtime.csv";
    std::string unpivoted = "unpivoted.csv";
    std::string pivoted = "pivoted.csv";
    std::string scaler = "scaler.json";
    std::string weights = "weights.bin";
    std::string loss_curve = "loss_curve.csv";
    std::string detect = "detect.csv";
    std::string score_json = "score_report.json";
    std::string score_csv = "score_report.csv";
    std::string sweep = "sweep.csv";
    std::string manifest = "manifest.json";
    std::string config_echo = "config.json";
};

struct PipelineConfig {
    uint64_t seed = 20240122;
    std::string out_dir = "out";
    GeneratorConfig generator;
    AggregationConfig aggregation;
    FeatureConfig features;
    DetectorConfig detector;
    LikelihoodParams likelihood;
    ScoringConfig scoring;
    PathsConfig paths;

    void validate() const;
    std::string path(const std::string& name) const;  // out_dir + "/" + name
    std::string to_json() const;                      // canonical effective config

    // Master-seed override: also reseeds the generator and training sections.
    void apply_seed(uint64_t new_seed);

    static PipelineConfig from_json(const std::string& text);
    static PipelineConfig from_json_file(const std::string& path);
};

// The documented desk-scale run: six winter weeks of two-datacenter traffic
// with five injected faults in the final three (test) weeks.
PipelineConfig default_desk_config();

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct OutputDigest {
    std::string path;  // relative to out_dir
    uint64_t bytes = 0;
    std::string sha256;
};

struct RunManifest {
    std::string config_sha256;
    uint64_t seed = 0;
    std::string version;
    std::vector<StageTiming> timings;
    std::vector<OutputDigest> outputs;
};

void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

void stage_generate(const PipelineConfig& cfg);
void stage_aggregate(const PipelineConfig& cfg);
void stage_train(const PipelineConfig& cfg);
void stage_detect(const PipelineConfig& cfg);
ScoreReport stage_score(const PipelineConfig& cfg);
void stage_sweep(const PipelineConfig& cfg);
RunManifest run_all(const PipelineConfig& cfg);

// The footnote grid swept by cmd_sweep.
const std::vector<double>& sweep_thresholds();     // 5 values
const std::vector<int>& sweep_long_windows();      // 6 values
const std::vector<int>& sweep_short_windows();     // 5 values

std::string score_report_json(const ScoreReport& report);
void write_score_report(const ScoreReport& report, const std::string& json_path,
                        const std::string& csv_path);

}  // namespace anobench
