#include "anobench/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <nlohmann/json.hpp>

#include "anobench/csv.hpp"
#include "anobench/errors.hpp"
#include "anobench/logging.hpp"
#include "anobench/rng.hpp"

namespace anobench::nn {

void TrainConfig::validate() const {
    if (epochs < 1) {
        throw ConfigError("epochs must be >= 1");
    }
    if (batch_size < 1) {
        throw ConfigError("batch_size must be >= 1");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning_rate must be positive");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
        throw ConfigError("momentum must lie in [0, 1)");
    }
    if (beta1 <= 0.0 || beta1 >= 1.0 || beta2 <= 0.0 || beta2 >= 1.0) {
        throw ConfigError("adam betas must lie in (0, 1)");
    }
    if (!(adam_eps > 0.0)) {
        throw ConfigError("adam_eps must be positive");
    }
}

namespace {

struct Optimizer {
    const TrainConfig& cfg;
    std::vector<Matrix> m1;  // momentum / first moment
    std::vector<Matrix> m2;  // second moment (adam only)
    int64_t step_count = 0;

    explicit Optimizer(const TrainConfig& c, const std::vector<ParamTensor*>& params)
        : cfg(c) {
        for (const ParamTensor* p : params) {
            m1.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
            if (cfg.optimizer == OptimizerKind::Adam) {
                m2.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
            }
        }
    }

    void step(const std::vector<ParamTensor*>& params) {
        ++step_count;
        if (cfg.optimizer == OptimizerKind::Adam) {
            const double c1 =
                1.0 - std::pow(cfg.beta1, static_cast<double>(step_count));
            const double c2 =
                1.0 - std::pow(cfg.beta2, static_cast<double>(step_count));
            for (size_t i = 0; i < params.size(); ++i) {
                ParamTensor& p = *params[i];
                m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * p.grad;
                m2[i] = (cfg.beta2 * m2[i]).array() +
                        (1.0 - cfg.beta2) * p.grad.array().square();
                p.value.array() -=
                    cfg.learning_rate * (m1[i].array() / c1) /
                    ((m2[i].array() / c2).sqrt() + cfg.adam_eps);
            }
        } else {
            for (size_t i = 0; i < params.size(); ++i) {
                ParamTensor& p = *params[i];
                m1[i] = cfg.momentum * m1[i] - cfg.learning_rate * p.grad;
                p.value += m1[i];
            }
        }
    }
};

SeqBatch make_batch(const Matrix& rows, const std::vector<Eigen::Index>& order,
                    size_t first, size_t count, int seq_len) {
    SeqBatch batch(static_cast<size_t>(seq_len),
                   Matrix(static_cast<Eigen::Index>(count), rows.cols()));
    for (size_t i = 0; i < count; ++i) {
        const Eigen::Index end = order[first + i];
        for (int s = 0; s < seq_len; ++s) {
            Eigen::Index src = end - (seq_len - 1 - s);
            if (src < 0) src = 0;
            batch[static_cast<size_t>(s)].row(static_cast<Eigen::Index>(i)) =
                rows.row(src);
        }
    }
    return batch;
}

}  // namespace

TrainResult train(Autoencoder& model, const Matrix& rows, const TrainConfig& cfg) {
    cfg.validate();
    if (rows.rows() == 0) {
        throw DataError("cannot train on zero rows");
    }
    if (rows.cols() != model.input_dim()) {
        throw DataError("training matrix has " + std::to_string(rows.cols()) +
                        " features, model expects " +
                        std::to_string(model.input_dim()));
    }
    model.init_weights(cfg.seed);
    auto params = model.parameters();
    Optimizer opt(cfg, params);

    const Eigen::Index n = rows.rows();
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    uint64_t batch_counter = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle(mix64(cfg.seed, 0xe90c5ULL + static_cast<uint64_t>(epoch)));
        for (size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[shuffle.uniform_int(i)]);
        }
        double epoch_sq = 0.0;
        for (size_t first = 0; first < order.size();
             first += static_cast<size_t>(cfg.batch_size)) {
            const size_t count = std::min(static_cast<size_t>(cfg.batch_size),
                                          order.size() - first);
            SeqBatch batch =
                make_batch(rows, order, first, count, model.sequence_length());
            model.zero_grad();
            const uint64_t dropout_seed = mix64(cfg.seed, 0xd709ULL + batch_counter);
            ++batch_counter;
            const double mse = model.train_batch(batch, dropout_seed);
            if (!std::isfinite(mse)) {
                throw TrainingDivergence("batch loss became non-finite at epoch " +
                                         std::to_string(epoch + 1));
            }
            opt.step(params);
            epoch_sq += mse * static_cast<double>(count);
        }
        const double epoch_mse = epoch_sq / static_cast<double>(n);
        result.loss_curve.push_back(epoch_mse);
        if ((epoch + 1) % 10 == 0 || epoch == 0 || epoch + 1 == cfg.epochs) {
            log_info() << model.kind() << " epoch " << (epoch + 1) << "/"
                       << cfg.epochs << " mse " << epoch_mse;
        }
    }
    return result;
}

void write_loss_curve(const TrainResult& result, const std::string& path) {
    auto out = csv::open_output(path);
    out << "epoch,mse\n";
    for (size_t i = 0; i < result.loss_curve.size(); ++i) {
        out << (i + 1) << ',' << csv::format_double(result.loss_curve[i]) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

constexpr char kMagic[8] = {'A', 'N', 'O', 'W', 'T', 'S', '0', '1'};

void write_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

std::string read_string(std::istream& in) {
    uint32_t len = read_u32(in);
    if (len > (1u << 20)) {
        throw DataError("weights file string field is implausibly long");
    }
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    return s;
}

}  // namespace

void save_model(const Autoencoder& model, uint64_t seed, const std::string& path) {
    auto out = csv::open_output(path);
    out.write(kMagic, sizeof(kMagic));
    write_string(out, model.kind());
    write_string(out, model.spec_json());
    write_u64(out, seed);
    auto state = const_cast<Autoencoder&>(model).named_state();
    write_u32(out, static_cast<uint32_t>(state.size()));
    for (const auto& [name, tensor] : state) {
        write_string(out, name);
        write_u32(out, static_cast<uint32_t>(tensor->rows()));
        write_u32(out, static_cast<uint32_t>(tensor->cols()));
        // Eigen matrices are column-major; serialize as stored.
        out.write(reinterpret_cast<const char*>(tensor->data()),
                  static_cast<std::streamsize>(sizeof(double) * tensor->size()));
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

LoadedModel load_model(const std::string& path) {
    auto in = csv::open_input(path);
    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw DataError("'" + path + "' is not a weights file");
    }
    const std::string kind = read_string(in);
    const std::string spec_text = read_string(in);
    nlohmann::json spec;
    try {
        spec = nlohmann::json::parse(spec_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad embedded spec in '" + path + "': " + e.what());
    }

    LoadedModel loaded;
    loaded.seed = read_u64(in);
    if (kind == "ann") {
        AnnSpec s;
        s.input_dim = spec.at("input_dim").get<int>();
        s.encoder_widths = spec.at("encoder_widths").get<std::vector<int>>();
        s.latent = spec.at("latent").get<int>();
        s.leaky_slope = spec.at("leaky_slope").get<double>();
        s.batch_norm = spec.at("batch_norm").get<bool>();
        s.dropout = spec.at("dropout").get<double>();
        loaded.model = std::make_unique<AnnAutoencoder>(s);
    } else if (kind == "gru") {
        GruSpec s;
        s.input_dim = spec.at("input_dim").get<int>();
        s.encoder_layers = spec.at("encoder_layers").get<int>();
        s.decoder_layers = spec.at("decoder_layers").get<int>();
        s.units = spec.at("units").get<int>();
        s.latent = spec.at("latent").get<int>();
        s.seq_len = spec.at("seq_len").get<int>();
        s.relu_cell = spec.at("relu_cell").get<bool>();
        loaded.model = std::make_unique<GruAutoencoder>(s);
    } else {
        throw DataError("unknown model kind '" + kind + "' in '" + path + "'");
    }

    auto state = loaded.model->named_state();
    const uint32_t count = read_u32(in);
    if (count != state.size()) {
        throw DataError("'" + path + "' holds " + std::to_string(count) +
                        " tensors, model needs " + std::to_string(state.size()));
    }
    for (uint32_t i = 0; i < count; ++i) {
        const std::string name = read_string(in);
        if (name != state[i].first) {
            throw DataError("tensor order mismatch in '" + path + "': got '" +
                            name + "', expected '" + state[i].first + "'");
        }
        const auto rows = static_cast<Eigen::Index>(read_u32(in));
        const auto cols = static_cast<Eigen::Index>(read_u32(in));
        Matrix* m = state[i].second;
        if (rows != m->rows() || cols != m->cols()) {
            throw DataError("tensor '" + name + "' in '" + path +
                            "' has shape " + std::to_string(rows) + "x" +
                            std::to_string(cols));
        }
        in.read(reinterpret_cast<char*>(m->data()),
                static_cast<std::streamsize>(sizeof(double) * m->size()));
    }
    if (!in) {
        throw DataError("'" + path + "' is truncated");
    }
    return loaded;
}

}  // namespace anobench::nn
