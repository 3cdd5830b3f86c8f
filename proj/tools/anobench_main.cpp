// anobench: synthetic telemetry anomaly-detection benchmark pipeline.
//
// Subcommands run one stage each over a shared JSON config; run-all chains
// them and writes a manifest with content digests of every artifact.
//
// Exit codes: 0 ok, 1 unexpected, 2 config, 3 missing input, 4 bad data,
// 5 training divergence, 6 output I/O. Log verbosity via ANOBENCH_LOG
// (debug|info|warn|error|off).

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "anobench/errors.hpp"
#include "anobench/pipeline.hpp"

namespace {

anobench::PipelineConfig load_config(const std::string& config_path,
                                     std::optional<uint64_t> seed,
                                     const std::string& out_dir) {
    anobench::PipelineConfig cfg = config_path.empty()
                                       ? anobench::default_desk_config()
                                       : anobench::PipelineConfig::from_json_file(config_path);
    if (seed) cfg.apply_seed(*seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
    return cfg;
}

void print_report(const anobench::ScoreReport& report) {
    int detected = 0;
    for (const auto& w : report.windows) detected += w.detected ? 1 : 0;
    std::printf("windows detected: %d/%zu\n", detected, report.windows.size());
    for (const auto& [profile, score] : report.profiles) {
        std::printf("%-14s raw %+9.4f  normalized %8.4f\n", profile.name.c_str(),
                    score.raw, score.normalized);
    }
    const auto& p = report.point;
    std::printf("point confusion: tp=%lld tn=%lld fp=%lld fn=%lld\n",
                static_cast<long long>(p.tp), static_cast<long long>(p.tn),
                static_cast<long long>(p.fp), static_cast<long long>(p.fn));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anobench: telemetry anomaly-detection benchmark pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "anobench 0.1.0");

    std::string config_path;
    std::string out_dir;
    std::optional<uint64_t> seed;
    app.add_option("--config", config_path, "Pipeline config JSON (default: built-in desk-scale run)")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Master seed override (reseeds generator and training)");
    app.add_option("--out", out_dir, "Output directory override");

    auto* cmd_generate = app.add_subcommand("generate", "Synthesize raw records and ground-truth CSVs");
    auto* cmd_aggregate = app.add_subcommand("aggregate", "Aggregate records into unpivoted and pivoted CSVs");
    auto* cmd_train = app.add_subcommand("train", "Fit the scaler and train the detector");
    auto* cmd_detect = app.add_subcommand("detect", "Score the test range into detect.csv");
    auto* cmd_score = app.add_subcommand("score", "Evaluate detect.csv against the ground truth");
    auto* cmd_sweep = app.add_subcommand("sweep", "Score the likelihood parameter grid");
    auto* cmd_run_all = app.add_subcommand("run-all", "Run every stage and write a manifest");
    auto* cmd_config = app.add_subcommand("print-config", "Print the effective config JSON and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        anobench::PipelineConfig cfg = load_config(config_path, seed, out_dir);
        if (cmd_generate->parsed()) {
            anobench::stage_generate(cfg);
        } else if (cmd_aggregate->parsed()) {
            anobench::stage_aggregate(cfg);
        } else if (cmd_train->parsed()) {
            anobench::stage_train(cfg);
        } else if (cmd_detect->parsed()) {
            anobench::stage_detect(cfg);
        } else if (cmd_score->parsed()) {
            print_report(anobench::stage_score(cfg));
        } else if (cmd_sweep->parsed()) {
            anobench::stage_sweep(cfg);
        } else if (cmd_run_all->parsed()) {
            anobench::RunManifest manifest = anobench::run_all(cfg);
            std::printf("manifest: %s (config %s)\n", cfg.path(cfg.paths.manifest).c_str(),
                        manifest.config_sha256.substr(0, 12).c_str());
            for (const auto& t : manifest.timings)
                std::printf("  %-10s %8.2fs\n", t.stage.c_str(), t.seconds);
        } else if (cmd_config->parsed()) {
            std::printf("%s\n", cfg.to_json().c_str());
        }
    } catch (const anobench::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const anobench::MissingInputError& e) {
        std::fprintf(stderr, "missing input: %s\n", e.what());
        return 3;
    } catch (const anobench::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 4;
    } catch (const anobench::TrainingDivergence& e) {
        std::fprintf(stderr, "training diverged: %s\n", e.what());
        return 5;
    } catch (const anobench::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 6;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
