#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "anobench/nn/ann.hpp"
#include "anobench/nn/gru.hpp"
#include "anobench/nn/model.hpp"

namespace anobench::nn {

enum class OptimizerKind { Adam, SgdMomentum };

struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    uint64_t seed = 1;

    void validate() const;  // throws ConfigError
};

struct TrainResult {
    std::vector<double> loss_curve;  // mean batch MSE per epoch
};

// Mini-batch training on rows of an already scaled/imputed matrix. Epoch
// order, batch slicing and dropout are all derived from cfg.seed. Throws
// TrainingDivergence when the loss stops being finite.
TrainResult train(Autoencoder& model, const Matrix& rows, const TrainConfig& cfg);

void write_loss_curve(const TrainResult& result, const std::string& path);

// Versioned binary weights file with the spec and seed embedded.
void save_model(const Autoencoder& model, uint64_t seed, const std::string& path);

struct LoadedModel {
    std::unique_ptr<Autoencoder> model;
    uint64_t seed = 0;
};

LoadedModel load_model(const std::string& path);

}  // namespace anobench::nn
