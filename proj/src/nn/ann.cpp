#include "anobench/nn/ann.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "anobench/errors.hpp"
#include "anobench/rng.hpp"

namespace anobench::nn {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;

Matrix glorot(Rng& rng, int rows, int cols) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rng.uniform(-limit, limit);
        }
    }
    return m;
}

// Inverted dropout mask: kept units scale by 1/(1-p), so inference needs no
// rescaling. The mask depends only on (seed, layer, shape).
Matrix dropout_mask(uint64_t seed, size_t layer, Eigen::Index rows,
                    Eigen::Index cols, double p) {
    Rng rng(mix64(seed, 0xd0d0ULL + layer));
    Matrix m(rows, cols);
    const double scale = 1.0 / (1.0 - p);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = rng.uniform() < p ? 0.0 : scale;
        }
    }
    return m;
}

}  // namespace

void AnnSpec::validate() const {
    if (input_dim < 1) {
        throw ConfigError("ann input_dim must be >= 1");
    }
    if (encoder_widths.empty()) {
        throw ConfigError("ann needs at least one encoder layer");
    }
    for (int w : encoder_widths) {
        if (w < 1) throw ConfigError("ann layer widths must be >= 1");
    }
    if (latent < 1) {
        throw ConfigError("ann latent must be >= 1");
    }
    if (leaky_slope < 0.0 || leaky_slope >= 1.0) {
        throw ConfigError("leaky_slope must lie in [0, 1)");
    }
    if (dropout < 0.0 || dropout >= 1.0) {
        throw ConfigError("dropout must lie in [0, 1)");
    }
}

int64_t ann_param_count(const AnnSpec& spec) {
    spec.validate();
    std::vector<int> dims;
    dims.push_back(spec.input_dim);
    for (int w : spec.encoder_widths) dims.push_back(w);
    dims.push_back(spec.latent);
    for (auto it = spec.encoder_widths.rbegin(); it != spec.encoder_widths.rend();
         ++it) {
        dims.push_back(*it);
    }
    dims.push_back(spec.input_dim);

    int64_t count = 0;
    for (size_t i = 0; i + 1 < dims.size(); ++i) {
        count += static_cast<int64_t>(dims[i]) * dims[i + 1] + dims[i + 1];
    }
    if (spec.batch_norm) {
        // gamma + beta on every hidden layer (not latent, not output)
        const size_t latent_idx = spec.encoder_widths.size();
        for (size_t i = 0; i + 1 < dims.size(); ++i) {
            if (i == latent_idx || i + 2 == dims.size()) continue;
            count += 2 * static_cast<int64_t>(dims[i + 1]);
        }
    }
    return count;
}

struct AnnAutoencoder::LayerCache {
    Matrix x;     // dense input
    Matrix a;     // pre-activation
    Matrix xhat;  // normalized activation (batch-norm layers)
    Matrix mean;  // 1 x d batch mean
    Matrix var;   // 1 x d biased batch variance
    Matrix mask;  // dropout mask (empty when inactive)
};

AnnAutoencoder::AnnAutoencoder(AnnSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    dims_.push_back(spec_.input_dim);
    for (int w : spec_.encoder_widths) dims_.push_back(w);
    dims_.push_back(spec_.latent);
    for (auto it = spec_.encoder_widths.rbegin(); it != spec_.encoder_widths.rend();
         ++it) {
        dims_.push_back(*it);
    }
    dims_.push_back(spec_.input_dim);

    for (size_t i = 0; i + 1 < dims_.size(); ++i) {
        Dense d;
        const std::string tag = "dense" + std::to_string(i);
        d.weight = ParamTensor(tag + ".weight", dims_[i], dims_[i + 1]);
        d.bias = ParamTensor(tag + ".bias", 1, dims_[i + 1]);
        dense_.push_back(std::move(d));
        if (spec_.batch_norm && is_hidden(i)) {
            BatchNorm bn;
            const std::string btag = "bn" + std::to_string(i);
            bn.gamma = ParamTensor(btag + ".gamma", 1, dims_[i + 1]);
            bn.beta = ParamTensor(btag + ".beta", 1, dims_[i + 1]);
            bn.running_mean = Matrix::Zero(1, dims_[i + 1]);
            bn.running_var = Matrix::Ones(1, dims_[i + 1]);
            norms_.push_back(std::move(bn));
        }
    }
    init_weights(0);
}

bool AnnAutoencoder::is_hidden(size_t transition) const {
    const size_t latent_idx = spec_.encoder_widths.size();
    const size_t output_idx = dims_.size() - 2;
    return transition != latent_idx && transition != output_idx;
}

size_t AnnAutoencoder::norm_index(size_t transition) const {
    size_t idx = 0;
    for (size_t i = 0; i < transition; ++i) {
        if (is_hidden(i)) ++idx;
    }
    return idx;
}

std::vector<ParamTensor*> AnnAutoencoder::parameters() {
    std::vector<ParamTensor*> out;
    for (auto& d : dense_) {
        out.push_back(&d.weight);
        out.push_back(&d.bias);
    }
    for (auto& bn : norms_) {
        out.push_back(&bn.gamma);
        out.push_back(&bn.beta);
    }
    return out;
}

std::vector<std::pair<std::string, Matrix*>> AnnAutoencoder::named_state() {
    std::vector<std::pair<std::string, Matrix*>> out;
    for (auto& d : dense_) {
        out.emplace_back(d.weight.name, &d.weight.value);
        out.emplace_back(d.bias.name, &d.bias.value);
    }
    for (size_t i = 0; i < norms_.size(); ++i) {
        auto& bn = norms_[i];
        out.emplace_back(bn.gamma.name, &bn.gamma.value);
        out.emplace_back(bn.beta.name, &bn.beta.value);
        out.emplace_back("bn_state" + std::to_string(i) + ".mean",
                         &bn.running_mean);
        out.emplace_back("bn_state" + std::to_string(i) + ".var", &bn.running_var);
    }
    return out;
}

void AnnAutoencoder::init_weights(uint64_t seed) {
    Rng rng(mix64(seed, fnv1a64("ann-init")));
    for (auto& d : dense_) {
        d.weight.value =
            glorot(rng, static_cast<int>(d.weight.value.rows()),
                   static_cast<int>(d.weight.value.cols()));
        d.bias.value.setZero();
        d.weight.grad.setZero();
        d.bias.grad.setZero();
    }
    for (auto& bn : norms_) {
        bn.gamma.value.setOnes();
        bn.beta.value.setZero();
        bn.gamma.grad.setZero();
        bn.beta.grad.setZero();
        bn.running_mean.setZero();
        bn.running_var.setOnes();
    }
}

Matrix AnnAutoencoder::forward(const Matrix& x, bool training,
                               uint64_t dropout_seed, bool update_running,
                               std::vector<LayerCache>* caches) const {
    Matrix h = x;
    const double batch = static_cast<double>(x.rows());
    for (size_t i = 0; i + 1 < dims_.size(); ++i) {
        LayerCache cache;
        cache.x = h;
        const Dense& d = dense_[i];
        Matrix a = (h * d.weight.value).rowwise() + d.bias.value.row(0);
        if (!is_hidden(i)) {
            h = std::move(a);
            if (caches) caches->push_back(std::move(cache));
            continue;
        }
        cache.a = a;
        h = a.unaryExpr([s = spec_.leaky_slope](double v) {
            return v > 0.0 ? v : s * v;
        });
        if (spec_.batch_norm) {
            const BatchNorm& bn = norms_[norm_index(i)];
            Matrix mean, var;
            if (training) {
                mean = h.colwise().mean();
                Matrix centered = h.rowwise() - mean.row(0);
                var = centered.array().square().colwise().sum().matrix() / batch;
                if (update_running) {
                    bn.running_mean =
                        (1.0 - kBnMomentum) * bn.running_mean + kBnMomentum * mean;
                    bn.running_var =
                        (1.0 - kBnMomentum) * bn.running_var + kBnMomentum * var;
                }
            } else {
                mean = bn.running_mean;
                var = bn.running_var;
            }
            Matrix denom = (var.array() + kBnEps).sqrt().matrix();
            Matrix xhat = ((h.rowwise() - mean.row(0)).array().rowwise() /
                           denom.row(0).array())
                              .matrix();
            h = (xhat.array().rowwise() * bn.gamma.value.row(0).array())
                    .matrix()
                    .rowwise() +
                bn.beta.value.row(0);
            cache.xhat = std::move(xhat);
            cache.mean = std::move(mean);
            cache.var = std::move(var);
        }
        if (training && spec_.dropout > 0.0) {
            cache.mask =
                dropout_mask(dropout_seed, i, h.rows(), h.cols(), spec_.dropout);
            h = h.cwiseProduct(cache.mask);
        }
        if (caches) caches->push_back(std::move(cache));
    }
    return h;
}

void AnnAutoencoder::backward(const Matrix& input, const Matrix& output,
                              const std::vector<LayerCache>& caches) {
    const double scale =
        2.0 / (static_cast<double>(input.rows()) * static_cast<double>(input.cols()));
    Matrix grad = scale * (output - input);
    const double batch = static_cast<double>(input.rows());

    for (size_t ri = dims_.size() - 1; ri-- > 0;) {
        const size_t i = ri;
        const LayerCache& cache = caches[i];
        Dense& d = dense_[i];
        if (is_hidden(i)) {
            if (spec_.dropout > 0.0 && cache.mask.size() > 0) {
                grad = grad.cwiseProduct(cache.mask);
            }
            if (spec_.batch_norm) {
                BatchNorm& bn = norms_[norm_index(i)];
                bn.gamma.grad +=
                    grad.cwiseProduct(cache.xhat).colwise().sum();
                bn.beta.grad += grad.colwise().sum();
                Matrix dxhat =
                    (grad.array().rowwise() * bn.gamma.value.row(0).array())
                        .matrix();
                Matrix denom = (cache.var.array() + kBnEps).sqrt().matrix();
                // Fused batch-norm input gradient:
                // dx = (dxhat - mean(dxhat) - xhat * mean(dxhat . xhat)) / denom
                Matrix mean_dxhat = dxhat.colwise().mean();
                Matrix mean_dxhat_xhat =
                    dxhat.cwiseProduct(cache.xhat).colwise().sum() / batch;
                grad = (((dxhat.rowwise() - mean_dxhat.row(0)) -
                         (cache.xhat.array().rowwise() *
                          mean_dxhat_xhat.row(0).array())
                             .matrix())
                            .array()
                            .rowwise() /
                        denom.row(0).array())
                           .matrix();
            }
            grad = grad.cwiseProduct(cache.a.unaryExpr(
                [s = spec_.leaky_slope](double v) { return v > 0.0 ? 1.0 : s; }));
        }
        d.weight.grad += cache.x.transpose() * grad;
        d.bias.grad += grad.colwise().sum();
        if (i > 0) {
            grad = grad * d.weight.value.transpose();
        }
    }
}

double AnnAutoencoder::loss(const SeqBatch& input, uint64_t dropout_seed) {
    if (input.size() != 1) {
        throw DataError("ann expects sequences of length 1");
    }
    Matrix out = forward(input[0], true, dropout_seed, false, nullptr);
    return (out - input[0]).array().square().mean();
}

double AnnAutoencoder::train_batch(const SeqBatch& input, uint64_t dropout_seed) {
    if (input.size() != 1) {
        throw DataError("ann expects sequences of length 1");
    }
    std::vector<LayerCache> caches;
    caches.reserve(dims_.size() - 1);
    Matrix out = forward(input[0], true, dropout_seed, true, &caches);
    backward(input[0], out, caches);
    return (out - input[0]).array().square().mean();
}

SeqBatch AnnAutoencoder::reconstruct(const SeqBatch& input) const {
    if (input.size() != 1) {
        throw DataError("ann expects sequences of length 1");
    }
    return {forward(input[0], false, 0, false, nullptr)};
}

std::string AnnAutoencoder::spec_json() const {
    nlohmann::json j;
    j["kind"] = "ann";
    j["input_dim"] = spec_.input_dim;
    j["encoder_widths"] = spec_.encoder_widths;
    j["latent"] = spec_.latent;
    j["leaky_slope"] = spec_.leaky_slope;
    j["batch_norm"] = spec_.batch_norm;
    j["dropout"] = spec_.dropout;
    return j.dump();
}

}  // namespace anobench::nn
