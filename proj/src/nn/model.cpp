#include "anobench/nn/model.hpp"

#include <algorithm>

#include "anobench/errors.hpp"

namespace anobench::nn {

std::vector<const ParamTensor*> Autoencoder::parameters() const {
    auto mutable_params = const_cast<Autoencoder*>(this)->parameters();
    return {mutable_params.begin(), mutable_params.end()};
}

void Autoencoder::zero_grad() {
    for (ParamTensor* p : parameters()) p->grad.setZero();
}

int64_t Autoencoder::parameter_count() const {
    int64_t n = 0;
    for (const ParamTensor* p : parameters()) n += p->value.size();
    return n;
}

Eigen::VectorXd batch_errors(const SeqBatch& input, const SeqBatch& output) {
    if (input.size() != output.size() || input.empty()) {
        throw DataError("reconstruction has a different sequence length");
    }
    const Eigen::Index batch = input[0].rows();
    Eigen::VectorXd errors = Eigen::VectorXd::Zero(batch);
    for (size_t t = 0; t < input.size(); ++t) {
        if (input[t].rows() != batch || output[t].rows() != batch ||
            input[t].cols() != output[t].cols()) {
            throw DataError("reconstruction shape mismatch at step " +
                            std::to_string(t));
        }
        errors += (output[t] - input[t]).array().square().matrix().rowwise().sum();
    }
    const double denom =
        static_cast<double>(input.size()) * static_cast<double>(input[0].cols());
    return errors / denom;
}

Eigen::VectorXd reconstruction_errors(const Autoencoder& model, const Matrix& rows,
                                      int batch_size) {
    if (rows.cols() != model.input_dim()) {
        throw DataError("matrix has " + std::to_string(rows.cols()) +
                        " features, model expects " +
                        std::to_string(model.input_dim()));
    }
    if (batch_size < 1) {
        throw ConfigError("batch_size must be >= 1");
    }
    const Eigen::Index n = rows.rows();
    const int seq_len = model.sequence_length();
    Eigen::VectorXd errors(n);
    for (Eigen::Index first = 0; first < n; first += batch_size) {
        const Eigen::Index count = std::min<Eigen::Index>(batch_size, n - first);
        SeqBatch input(static_cast<size_t>(seq_len),
                       Matrix(count, rows.cols()));
        for (Eigen::Index i = 0; i < count; ++i) {
            const Eigen::Index end = first + i;  // sequence ends at this row
            for (int s = 0; s < seq_len; ++s) {
                Eigen::Index src = end - (seq_len - 1 - s);
                if (src < 0) src = 0;  // clamp before the first row
                input[static_cast<size_t>(s)].row(i) = rows.row(src);
            }
        }
        SeqBatch output = model.reconstruct(input);
        errors.segment(first, count) = batch_errors(input, output);
    }
    return errors;
}

}  // namespace anobench::nn
