#include "anobench/features.hpp"

#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "anobench/csv.hpp"
#include "anobench/errors.hpp"
#include "anobench/logging.hpp"

namespace anobench {

PivotedFrame select_5xx_count(const PivotedFrame& frame) {
    PivotedFrame out = frame.select_columns([](const ColumnName& col) {
        return col.key.is_5xx() && col.stat == StatName::Count;
    });
    if (out.cols() == 0) {
        throw ConfigError("no 5XX count columns in the frame");
    }
    return out;
}

FeatureMatrix frame_to_matrix(const PivotedFrame& frame) {
    FeatureMatrix m;
    m.axis = frame.axis();
    m.names.reserve(frame.cols());
    for (const auto& col : frame.columns()) m.names.push_back(col.rendered);
    m.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(frame.rows()),
                                     static_cast<Eigen::Index>(frame.cols()));
    for (uint32_t c = 0; c < frame.cols(); ++c) {
        for (const auto& [row, value] : frame.column_cells(c)) {
            m.values(row, c) = value;
        }
    }
    return m;
}

void add_seasonality(FeatureMatrix& matrix) {
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    const Eigen::Index rows = matrix.values.rows();
    const Eigen::Index base = matrix.values.cols();
    matrix.values.conservativeResize(rows, base + 4);
    for (Eigen::Index r = 0; r < rows; ++r) {
        int64_t t = matrix.axis[static_cast<size_t>(r)];
        double day = kTwoPi * static_cast<double>(seconds_into_day(t)) /
                     static_cast<double>(kSecondsPerDay);
        double week = kTwoPi * static_cast<double>(seconds_into_week(t)) /
                      static_cast<double>(kSecondsPerWeek);
        matrix.values(r, base + 0) = std::sin(day);
        matrix.values(r, base + 1) = std::cos(day);
        matrix.values(r, base + 2) = std::sin(week);
        matrix.values(r, base + 3) = std::cos(week);
    }
    for (const char* name : kSeasonalNames) matrix.names.emplace_back(name);
}

void SplitSpec::validate() const {
    if (train_end <= train_start) {
        throw ConfigError("training range is empty");
    }
    if (test_end <= test_start) {
        throw ConfigError("test range is empty");
    }
    if (train_start < test_end && test_start < train_end) {
        throw ConfigError("training and test ranges overlap");
    }
    if (anomaly_buffer_seconds < 0) {
        throw ConfigError("anomaly_buffer_seconds must be >= 0");
    }
}

std::pair<PivotedFrame, PivotedFrame> split(
    const PivotedFrame& frame, const SplitSpec& spec,
    const std::vector<AnomalyWindow>& windows) {
    spec.validate();
    PivotedFrame train = frame.slice_rows(spec.train_start, spec.train_end);
    PivotedFrame test = frame.slice_rows(spec.test_start, spec.test_end);

    if (spec.anomaly_buffer_seconds > 0 && !windows.empty()) {
        auto contaminated = [&](int64_t t) {
            for (const auto& w : windows) {
                if (t >= w.start.epoch_seconds - spec.anomaly_buffer_seconds &&
                    t < w.end.epoch_seconds + spec.anomaly_buffer_seconds) {
                    return true;
                }
            }
            return false;
        };
        std::vector<bool> keep(train.rows(), true);
        size_t dropped = 0;
        for (uint32_t r = 0; r < train.rows(); ++r) {
            if (contaminated(train.axis()[r])) {
                keep[r] = false;
                ++dropped;
            }
        }
        if (dropped == train.rows()) {
            throw ConfigError("anomaly buffer removed every training row");
        }
        if (dropped > 0) {
            log_info() << "anomaly buffer dropped " << dropped << " training rows";
            train = train.filter_rows(keep);
        }
    }
    if (train.rows() == 0) {
        throw ConfigError("training range contains no frame rows");
    }
    return {std::move(train), std::move(test)};
}

void MinMaxScaler::fit(const FeatureMatrix& train) {
    if (train.values.rows() == 0) {
        throw DataError("cannot fit a scaler on zero rows");
    }
    names_ = train.names;
    mins_.assign(names_.size(), 0.0);
    maxs_.assign(names_.size(), 0.0);
    for (Eigen::Index c = 0; c < train.values.cols(); ++c) {
        mins_[static_cast<size_t>(c)] = train.values.col(c).minCoeff();
        maxs_[static_cast<size_t>(c)] = train.values.col(c).maxCoeff();
    }
}

FeatureMatrix MinMaxScaler::transform(const FeatureMatrix& matrix) const {
    if (names_.empty()) {
        throw DataError("scaler used before fit");
    }
    std::unordered_map<std::string, Eigen::Index> incoming;
    for (size_t i = 0; i < matrix.names.size(); ++i) {
        incoming.emplace(matrix.names[i], static_cast<Eigen::Index>(i));
    }

    FeatureMatrix out;
    out.axis = matrix.axis;
    out.names = names_;
    out.values = Eigen::MatrixXd::Zero(matrix.values.rows(),
                                       static_cast<Eigen::Index>(names_.size()));
    size_t missing = 0;
    for (size_t c = 0; c < names_.size(); ++c) {
        auto it = incoming.find(names_[c]);
        if (it == incoming.end()) {
            ++missing;  // stays zero-filled
            continue;
        }
        double lo = mins_[c];
        double range = maxs_[c] - lo;
        auto col = out.values.col(static_cast<Eigen::Index>(c));
        if (range <= 0.0) {
            col.setZero();
        } else {
            col = (matrix.values.col(it->second).array() - lo) / range;
        }
    }
    size_t dropped = matrix.names.size() - (names_.size() - missing);
    if (missing > 0 || dropped > 0) {
        log_info() << "scaler alignment: " << missing << " features zero-filled, "
                   << dropped << " unseen features dropped";
    }
    return out;
}

void MinMaxScaler::save(const std::string& path) const {
    nlohmann::json j;
    j["format"] = "anobench-scaler";
    j["version"] = 1;
    j["features"] = nlohmann::json::array();
    for (size_t i = 0; i < names_.size(); ++i) {
        j["features"].push_back(
            {{"name", names_[i]}, {"min", mins_[i]}, {"max", maxs_[i]}});
    }
    auto out = csv::open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

MinMaxScaler MinMaxScaler::load(const std::string& path) {
    auto in = csv::open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad scaler file '" + path + "': " + e.what());
    }
    if (j.value("format", "") != "anobench-scaler" || j.value("version", 0) != 1) {
        throw DataError("'" + path + "' is not a version-1 scaler file");
    }
    MinMaxScaler s;
    for (const auto& f : j.at("features")) {
        s.names_.push_back(f.at("name").get<std::string>());
        s.mins_.push_back(f.at("min").get<double>());
        s.maxs_.push_back(f.at("max").get<double>());
    }
    return s;
}

}  // namespace anobench
