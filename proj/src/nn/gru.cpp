#include "anobench/nn/gru.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "anobench/errors.hpp"
#include "anobench/rng.hpp"

namespace anobench::nn {

namespace {

Matrix glorot(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = rng.uniform(-limit, limit);
        }
    }
    return m;
}

Matrix sigmoid(const Matrix& m) {
    return m.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

void GruSpec::validate() const {
    if (input_dim < 1) {
        throw ConfigError("gru input_dim must be >= 1");
    }
    if (encoder_layers < 1 || decoder_layers < 1) {
        throw ConfigError("gru needs at least one encoder and one decoder layer");
    }
    if (units < 1 || latent < 1) {
        throw ConfigError("gru units and latent must be >= 1");
    }
    if (seq_len < 1) {
        throw ConfigError("gru seq_len must be >= 1");
    }
}

namespace {

int64_t gru_layer_params(int in, int units) {
    return 3 * (static_cast<int64_t>(in) * units +
                static_cast<int64_t>(units) * units + units);
}

}  // namespace

int64_t gru_param_count(const GruSpec& spec) {
    spec.validate();
    int64_t count = 0;
    for (int i = 0; i < spec.encoder_layers; ++i) {
        count += gru_layer_params(i == 0 ? spec.input_dim : spec.units, spec.units);
    }
    count += static_cast<int64_t>(spec.units) * spec.latent + spec.latent;
    for (int i = 0; i < spec.decoder_layers; ++i) {
        int in = i == 0 ? spec.latent : spec.units;
        int units = i == spec.decoder_layers - 1 ? spec.input_dim : spec.units;
        count += gru_layer_params(in, units);
    }
    return count;
}

GruLayer::GruLayer(const std::string& prefix, int in_dim, int unit_count,
                   bool relu_act)
    : wz(prefix + ".wz", in_dim, unit_count),
      uz(prefix + ".uz", unit_count, unit_count),
      bz(prefix + ".bz", 1, unit_count),
      wr(prefix + ".wr", in_dim, unit_count),
      ur(prefix + ".ur", unit_count, unit_count),
      br(prefix + ".br", 1, unit_count),
      wh(prefix + ".wh", in_dim, unit_count),
      uh(prefix + ".uh", unit_count, unit_count),
      bh(prefix + ".bh", 1, unit_count),
      in(in_dim),
      units(unit_count),
      relu(relu_act) {}

Matrix GruLayer::step(const Matrix& x, const Matrix& h_prev,
                      StepCache* cache) const {
    Matrix z = sigmoid(((x * wz.value) + (h_prev * uz.value)).rowwise() +
                       bz.value.row(0));
    Matrix r = sigmoid(((x * wr.value) + (h_prev * ur.value)).rowwise() +
                       br.value.row(0));
    Matrix ah = ((x * wh.value) + (r.cwiseProduct(h_prev) * uh.value)).rowwise() +
                bh.value.row(0);
    Matrix hc = relu ? ah.cwiseMax(0.0).eval()
                     : ah.unaryExpr([](double v) { return std::tanh(v); }).eval();
    Matrix h = (Matrix::Ones(z.rows(), z.cols()) - z).cwiseProduct(h_prev) +
               z.cwiseProduct(hc);
    if (!h.allFinite()) {
        throw TrainingDivergence("non-finite hidden state in GRU layer '" +
                                 wz.name.substr(0, wz.name.rfind('.')) + "'");
    }
    if (cache) {
        cache->x = x;
        cache->h_prev = h_prev;
        cache->z = std::move(z);
        cache->r = std::move(r);
        cache->hc = std::move(hc);
        cache->ah = std::move(ah);
    }
    return h;
}

Matrix GruLayer::step_backward(const StepCache& cache, const Matrix& dh,
                               Matrix& dh_prev) {
    // h = (1 - z) . h_prev + z . hc
    Matrix dz = dh.cwiseProduct(cache.hc - cache.h_prev);
    Matrix dhc = dh.cwiseProduct(cache.z);
    dh_prev += dh.cwiseProduct(Matrix::Ones(dh.rows(), dh.cols()) - cache.z);

    Matrix dah;
    if (relu) {
        dah = dhc.cwiseProduct((cache.ah.array() > 0.0).cast<double>().matrix());
    } else {
        dah = dhc.cwiseProduct((1.0 - cache.hc.array().square()).matrix());
    }

    Matrix rh = cache.r.cwiseProduct(cache.h_prev);
    wh.grad += cache.x.transpose() * dah;
    uh.grad += rh.transpose() * dah;
    bh.grad += dah.colwise().sum();
    Matrix drh = dah * uh.value.transpose();
    Matrix dr = drh.cwiseProduct(cache.h_prev);
    dh_prev += drh.cwiseProduct(cache.r);

    Matrix dz_pre = dz.cwiseProduct(cache.z).cwiseProduct(
        Matrix::Ones(dz.rows(), dz.cols()) - cache.z);
    Matrix dr_pre = dr.cwiseProduct(cache.r).cwiseProduct(
        Matrix::Ones(dr.rows(), dr.cols()) - cache.r);

    wz.grad += cache.x.transpose() * dz_pre;
    uz.grad += cache.h_prev.transpose() * dz_pre;
    bz.grad += dz_pre.colwise().sum();
    dh_prev += dz_pre * uz.value.transpose();

    wr.grad += cache.x.transpose() * dr_pre;
    ur.grad += cache.h_prev.transpose() * dr_pre;
    br.grad += dr_pre.colwise().sum();
    dh_prev += dr_pre * ur.value.transpose();

    return dz_pre * wz.value.transpose() + dr_pre * wr.value.transpose() +
           dah * wh.value.transpose();
}

struct GruAutoencoder::ForwardCache {
    // [layer][timestep]
    std::vector<std::vector<GruLayer::StepCache>> encoder;
    std::vector<std::vector<GruLayer::StepCache>> decoder;
    Matrix encoded;  // top encoder hidden state at the last step
    Matrix latent;   // after the dense map
};

GruAutoencoder::GruAutoencoder(GruSpec spec) : spec_(spec) {
    spec_.validate();
    for (int i = 0; i < spec_.encoder_layers; ++i) {
        encoder_.emplace_back("encoder" + std::to_string(i),
                              i == 0 ? spec_.input_dim : spec_.units, spec_.units,
                              spec_.relu_cell);
    }
    latent_w_ = ParamTensor("latent.weight", spec_.units, spec_.latent);
    latent_b_ = ParamTensor("latent.bias", 1, spec_.latent);
    for (int i = 0; i < spec_.decoder_layers; ++i) {
        const int in = i == 0 ? spec_.latent : spec_.units;
        const int units =
            i == spec_.decoder_layers - 1 ? spec_.input_dim : spec_.units;
        decoder_.emplace_back("decoder" + std::to_string(i), in, units,
                              spec_.relu_cell);
    }
    init_weights(0);
}

std::vector<ParamTensor*> GruAutoencoder::parameters() {
    std::vector<ParamTensor*> out;
    auto add_layer = [&out](GruLayer& l) {
        out.push_back(&l.wz);
        out.push_back(&l.uz);
        out.push_back(&l.bz);
        out.push_back(&l.wr);
        out.push_back(&l.ur);
        out.push_back(&l.br);
        out.push_back(&l.wh);
        out.push_back(&l.uh);
        out.push_back(&l.bh);
    };
    for (auto& l : encoder_) add_layer(l);
    out.push_back(&latent_w_);
    out.push_back(&latent_b_);
    for (auto& l : decoder_) add_layer(l);
    return out;
}

std::vector<std::pair<std::string, Matrix*>> GruAutoencoder::named_state() {
    std::vector<std::pair<std::string, Matrix*>> out;
    for (ParamTensor* p : parameters()) {
        out.emplace_back(p->name, &p->value);
    }
    return out;
}

void GruAutoencoder::init_weights(uint64_t seed) {
    Rng rng(mix64(seed, fnv1a64("gru-init")));
    for (ParamTensor* p : parameters()) {
        if (p->value.rows() == 1) {
            p->value.setZero();  // biases
        } else {
            p->value = glorot(rng, p->value.rows(), p->value.cols());
        }
        p->grad.setZero();
    }
}

SeqBatch GruAutoencoder::forward(const SeqBatch& input,
                                 ForwardCache* cache) const {
    const size_t steps = input.size();
    const Eigen::Index batch = input[0].rows();

    if (cache) {
        cache->encoder.assign(encoder_.size(),
                              std::vector<GruLayer::StepCache>(steps));
        cache->decoder.assign(decoder_.size(),
                              std::vector<GruLayer::StepCache>(steps));
    }

    // Stacked encoder; each layer consumes the full sequence below it.
    SeqBatch level = input;
    Matrix top_last;
    for (size_t l = 0; l < encoder_.size(); ++l) {
        Matrix h = Matrix::Zero(batch, encoder_[l].units);
        for (size_t t = 0; t < steps; ++t) {
            h = encoder_[l].step(level[t], h,
                                 cache ? &cache->encoder[l][t] : nullptr);
            level[t] = h;
        }
        top_last = h;
    }

    Matrix latent = (top_last * latent_w_.value).rowwise() + latent_b_.value.row(0);
    if (cache) {
        cache->encoded = top_last;
        cache->latent = latent;
    }

    // Repeat vector: every decoder step sees the latent code.
    SeqBatch out(steps);
    std::vector<Matrix> hidden(decoder_.size());
    for (size_t l = 0; l < decoder_.size(); ++l) {
        hidden[l] = Matrix::Zero(batch, decoder_[l].units);
    }
    for (size_t t = 0; t < steps; ++t) {
        Matrix x = latent;
        for (size_t l = 0; l < decoder_.size(); ++l) {
            hidden[l] = decoder_[l].step(x, hidden[l],
                                         cache ? &cache->decoder[l][t] : nullptr);
            x = hidden[l];
        }
        out[t] = x;
    }
    return out;
}

double GruAutoencoder::backward(const SeqBatch& input, const SeqBatch& output,
                                ForwardCache& cache) {
    const size_t steps = input.size();
    const Eigen::Index batch = input[0].rows();
    const double denom = static_cast<double>(batch) * static_cast<double>(steps) *
                         static_cast<double>(spec_.input_dim);

    double sq_sum = 0.0;
    SeqBatch grad(steps);
    for (size_t t = 0; t < steps; ++t) {
        Matrix diff = output[t] - input[t];
        sq_sum += diff.array().square().sum();
        grad[t] = (2.0 / denom) * diff;
    }

    // Decoder BPTT, top layer first; grad[t] holds the incoming gradient on
    // each layer's hidden output at step t.
    for (size_t l = decoder_.size(); l-- > 0;) {
        Matrix carry = Matrix::Zero(batch, decoder_[l].units);
        SeqBatch below(steps);
        for (size_t t = steps; t-- > 0;) {
            Matrix dh = grad[t] + carry;
            carry = Matrix::Zero(batch, decoder_[l].units);
            below[t] = decoder_[l].step_backward(cache.decoder[l][t], dh, carry);
        }
        grad = std::move(below);
    }

    // All decoder steps consumed the same latent vector.
    Matrix dlatent = Matrix::Zero(batch, spec_.latent);
    for (size_t t = 0; t < steps; ++t) dlatent += grad[t];

    latent_w_.grad += cache.encoded.transpose() * dlatent;
    latent_b_.grad += dlatent.colwise().sum();
    Matrix dtop = dlatent * latent_w_.value.transpose();

    // Encoder BPTT; only the last step of the top layer feeds the latent.
    for (size_t l = encoder_.size(); l-- > 0;) {
        Matrix carry = Matrix::Zero(batch, encoder_[l].units);
        SeqBatch below(steps);
        for (size_t t = steps; t-- > 0;) {
            Matrix dh = carry;
            if (l == encoder_.size() - 1) {
                if (t == steps - 1) dh += dtop;
            } else {
                dh += grad[t];
            }
            carry = Matrix::Zero(batch, encoder_[l].units);
            below[t] = encoder_[l].step_backward(cache.encoder[l][t], dh, carry);
        }
        grad = std::move(below);
    }

    return sq_sum / denom;
}

double GruAutoencoder::loss(const SeqBatch& input, uint64_t) {
    SeqBatch out = forward(input, nullptr);
    double sq_sum = 0.0;
    for (size_t t = 0; t < input.size(); ++t) {
        sq_sum += (out[t] - input[t]).array().square().sum();
    }
    return sq_sum / (static_cast<double>(input[0].rows()) *
                     static_cast<double>(input.size()) *
                     static_cast<double>(spec_.input_dim));
}

double GruAutoencoder::train_batch(const SeqBatch& input, uint64_t) {
    ForwardCache cache;
    SeqBatch out = forward(input, &cache);
    return backward(input, out, cache);
}

SeqBatch GruAutoencoder::reconstruct(const SeqBatch& input) const {
    return forward(input, nullptr);
}

std::string GruAutoencoder::spec_json() const {
    nlohmann::json j;
    j["kind"] = "gru";
    j["input_dim"] = spec_.input_dim;
    j["encoder_layers"] = spec_.encoder_layers;
    j["decoder_layers"] = spec_.decoder_layers;
    j["units"] = spec_.units;
    j["latent"] = spec_.latent;
    j["seq_len"] = spec_.seq_len;
    j["relu_cell"] = spec_.relu_cell;
    return j.dump();
}

}  // namespace anobench::nn
