#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace anobench::nn {

using Matrix = Eigen::MatrixXd;

// A batch of sequences, one matrix (batch x features) per timestep.
using SeqBatch = std::vector<Matrix>;

struct ParamTensor {
    std::string name;
    Matrix value;
    Matrix grad;

    ParamTensor() = default;
    ParamTensor(std::string n, int rows, int cols)
        : name(std::move(n)), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}
};

// Common surface of the ANN and GRU autoencoders. All math is double
// precision; training is single-threaded and fully deterministic given the
// seeds handed in.
class Autoencoder {
public:
    virtual ~Autoencoder() = default;

    virtual std::string kind() const = 0;
    virtual int input_dim() const = 0;
    virtual int sequence_length() const = 0;

    // Trainable tensors (the optimizer and gradient checks iterate these).
    virtual std::vector<ParamTensor*> parameters() = 0;
    std::vector<const ParamTensor*> parameters() const;

    // Every tensor that must persist, including batch-norm running statistics.
    virtual std::vector<std::pair<std::string, Matrix*>> named_state() = 0;

    virtual void init_weights(uint64_t seed) = 0;

    // Train-mode loss on a batch without touching gradients or running
    // statistics; dropout masks derive from dropout_seed, so repeated calls
    // are identical (used by finite differencing).
    virtual double loss(const SeqBatch& input, uint64_t dropout_seed) = 0;

    // Train-mode forward + backward; accumulates gradients into the tensors
    // and updates running statistics. Returns the batch MSE.
    virtual double train_batch(const SeqBatch& input, uint64_t dropout_seed) = 0;

    // Inference-mode reconstruction (dropout off, running statistics).
    virtual SeqBatch reconstruct(const SeqBatch& input) const = 0;

    virtual std::string spec_json() const = 0;

    void zero_grad();
    int64_t parameter_count() const;
};

// Mean over timesteps and features of the squared reconstruction residual,
// one value per batch row.
Eigen::VectorXd batch_errors(const SeqBatch& input, const SeqBatch& output);

// Per-row reconstruction error for a matrix of observations. Sequence models
// see the seq_len rows ending at each row (clamped at the start of the
// matrix); row-major batching keeps memory flat.
Eigen::VectorXd reconstruction_errors(const Autoencoder& model, const Matrix& rows,
                                      int batch_size = 256);

}  // namespace anobench::nn
