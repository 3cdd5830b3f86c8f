#pragma once

#include <cstdint>
#include <vector>

#include "anobench/nn/model.hpp"

namespace anobench::nn {

// Mirrored dense autoencoder. Each encoder/decoder hidden layer is
// Dense -> LeakyReLU -> (BatchNorm) -> (Dropout); the latent and output
// layers are plain linear maps.
struct AnnSpec {
    int input_dim = 2410;
    std::vector<int> encoder_widths = {128, 64};
    int latent = 14;
    double leaky_slope = 0.01;
    bool batch_norm = true;
    double dropout = 0.2;

    void validate() const;  // throws ConfigError
};

// Trainable-parameter count from the layer shapes alone.
int64_t ann_param_count(const AnnSpec& spec);

class AnnAutoencoder : public Autoencoder {
public:
    explicit AnnAutoencoder(AnnSpec spec);

    std::string kind() const override { return "ann"; }
    int input_dim() const override { return spec_.input_dim; }
    int sequence_length() const override { return 1; }
    const AnnSpec& spec() const { return spec_; }

    std::vector<ParamTensor*> parameters() override;
    std::vector<std::pair<std::string, Matrix*>> named_state() override;
    void init_weights(uint64_t seed) override;

    double loss(const SeqBatch& input, uint64_t dropout_seed) override;
    double train_batch(const SeqBatch& input, uint64_t dropout_seed) override;
    SeqBatch reconstruct(const SeqBatch& input) const override;

    std::string spec_json() const override;

private:
    struct Dense {
        ParamTensor weight;  // in x out
        ParamTensor bias;    // 1 x out
    };
    struct BatchNorm {
        ParamTensor gamma;  // 1 x d
        ParamTensor beta;   // 1 x d
        mutable Matrix running_mean;  // updated during const training forwards
        mutable Matrix running_var;
    };
    struct LayerCache;

    // Transition i maps dims_[i] -> dims_[i+1]; hidden transitions carry the
    // activation/norm/dropout stack, the latent and output ones stay linear.
    bool is_hidden(size_t transition) const;
    size_t norm_index(size_t transition) const;

    Matrix forward(const Matrix& x, bool training, uint64_t dropout_seed,
                   bool update_running, std::vector<LayerCache>* caches) const;
    void backward(const Matrix& input, const Matrix& output,
                  const std::vector<LayerCache>& caches);

    AnnSpec spec_;
    std::vector<int> dims_;          // input, widths..., latent, widths reversed..., input
    std::vector<Dense> dense_;       // one per transition in dims_
    std::vector<BatchNorm> norms_;   // one per hidden layer (empty when disabled)
};

}  // namespace anobench::nn
