#pragma once

#include <cstdint>
#include <vector>

#include "anobench/nn/model.hpp"

namespace anobench::nn {

// Sequence autoencoder: stacked GRU encoder -> linear latent -> repeat
// vector -> stacked GRU decoder whose last layer has input_dim units and
// emits the reconstruction directly.
struct GruSpec {
    int input_dim = 2410;
    int encoder_layers = 7;
    int decoder_layers = 7;
    int units = 16;
    int latent = 14;
    int seq_len = 1;
    bool relu_cell = true;  // candidate activation; false selects tanh

    void validate() const;  // throws ConfigError
};

int64_t gru_param_count(const GruSpec& spec);

// One gated recurrent step:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   hc = act(x Wh + (r . h) Uh + bh)
//   h' = (1 - z) . h + z . hc
struct GruLayer {
    ParamTensor wz, uz, bz;
    ParamTensor wr, ur, br;
    ParamTensor wh, uh, bh;
    int in = 0;
    int units = 0;
    bool relu = true;

    GruLayer() = default;
    GruLayer(const std::string& prefix, int in_dim, int unit_count, bool relu_act);

    struct StepCache {
        Matrix x, h_prev, z, r, hc, ah;
    };

    // Throws Error on non-finite intermediates, naming the layer.
    Matrix step(const Matrix& x, const Matrix& h_prev, StepCache* cache) const;

    // Returns dx and accumulates dh_prev into that argument.
    Matrix step_backward(const StepCache& cache, const Matrix& dh, Matrix& dh_prev);
};

class GruAutoencoder : public Autoencoder {
public:
    explicit GruAutoencoder(GruSpec spec);

    std::string kind() const override { return "gru"; }
    int input_dim() const override { return spec_.input_dim; }
    int sequence_length() const override { return spec_.seq_len; }
    const GruSpec& spec() const { return spec_; }

    std::vector<ParamTensor*> parameters() override;
    std::vector<std::pair<std::string, Matrix*>> named_state() override;
    void init_weights(uint64_t seed) override;

    double loss(const SeqBatch& input, uint64_t dropout_seed) override;
    double train_batch(const SeqBatch& input, uint64_t dropout_seed) override;
    SeqBatch reconstruct(const SeqBatch& input) const override;

    std::string spec_json() const override;

private:
    struct ForwardCache;
    SeqBatch forward(const SeqBatch& input, ForwardCache* cache) const;
    double backward(const SeqBatch& input, const SeqBatch& output, ForwardCache& cache);

    GruSpec spec_;
    std::vector<GruLayer> encoder_;
    ParamTensor latent_w_, latent_b_;
    std::vector<GruLayer> decoder_;
};

}  // namespace anobench::nn
