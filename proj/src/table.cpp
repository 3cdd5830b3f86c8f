#include "anobench/table.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "anobench/csv.hpp"
#include "anobench/errors.hpp"
#include "anobench/logging.hpp"

namespace anobench {

namespace {

// Series identity without the trailing stat segment; used for interning and
// for ordering keys the same way their rendered column names order.
std::string render_series_prefix(const SeriesKey& key) {
    std::string out;
    out += key.location;
    out += '_';
    out += kind_token(key.kind);
    out += '_';
    out += key.host;
    out += '_';
    out += key.method;
    out += '_';
    out += std::to_string(key.status_code);
    out += '_';
    out += key.endpoint;
    return out;
}

}  // namespace

uint32_t UnpivotedTable::intern_key(const SeriesKey& key) {
    std::string prefix = render_series_prefix(key);
    auto it = index_.find(prefix);
    if (it != index_.end()) return it->second;
    key.validate();
    uint32_t idx = static_cast<uint32_t>(keys_.size());
    keys_.push_back(key);
    rendered_.push_back(prefix);
    index_.emplace(std::move(prefix), idx);
    return idx;
}

void UnpivotedTable::add_row(int64_t interval_start, uint32_t key_index,
                             StatName stat, double value) {
    if (key_index >= keys_.size()) {
        throw DataError("key index " + std::to_string(key_index) +
                        " out of range");
    }
    rows_.push_back(Row{interval_start, key_index, stat, value});
}

void UnpivotedTable::sort_and_check() {
    auto order = [this](const Row& a, const Row& b) {
        if (a.interval_start != b.interval_start)
            return a.interval_start < b.interval_start;
        if (a.key_index != b.key_index)
            return rendered_[a.key_index] < rendered_[b.key_index];
        return static_cast<uint8_t>(a.stat) < static_cast<uint8_t>(b.stat);
    };
    std::stable_sort(rows_.begin(), rows_.end(), order);
    for (size_t i = 1; i < rows_.size(); ++i) {
        const Row& p = rows_[i - 1];
        const Row& r = rows_[i];
        if (p.interval_start == r.interval_start && p.key_index == r.key_index &&
            p.stat == r.stat) {
            throw DataError("duplicate cell for interval " +
                            std::to_string(r.interval_start) + ", series " +
                            rendered_[r.key_index] + ", stat " +
                            std::string(stat_token(r.stat)));
        }
    }
}

const std::vector<std::string>& UnpivotedTable::csv_header() {
    static const std::vector<std::string> header = {
        "interval_start", "location", "kind",     "host", "method",
        "status_code",    "endpoint", "statistic", "value"};
    return header;
}

void UnpivotedTable::write_csv(std::ostream& out) const {
    const auto& header = csv_header();
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    std::string line;
    for (const Row& r : rows_) {
        const SeriesKey& k = keys_[r.key_index];
        line.clear();
        line += std::to_string(r.interval_start);
        line += ',';
        line += k.location;
        line += ',';
        line += kind_token(k.kind);
        line += ',';
        line += k.host;
        line += ',';
        line += k.method;
        line += ',';
        line += std::to_string(k.status_code);
        line += ',';
        line += k.endpoint;
        line += ',';
        line += stat_token(r.stat);
        line += ',';
        line += csv::format_double(r.value);
        line += '\n';
        out << line;
    }
    if (!out) {
        throw IoError("write failed while serializing unpivoted table");
    }
}

void UnpivotedTable::write_csv_file(const std::string& path) const {
    auto out = csv::open_output(path);
    write_csv(out);
}

UnpivotedTable UnpivotedTable::read_csv(std::istream& in) {
    UnpivotedTable table;
    std::string line;
    if (!csv::getline(in, line)) {
        throw DataError("unpivoted CSV is empty");
    }
    {
        auto fields = csv::split(line);
        const auto& header = csv_header();
        if (fields.size() != header.size()) {
            throw DataError("unpivoted CSV header has " +
                            std::to_string(fields.size()) + " columns, expected " +
                            std::to_string(header.size()));
        }
        for (size_t i = 0; i < header.size(); ++i) {
            if (fields[i] != header[i]) {
                throw DataError("unpivoted CSV header mismatch at column " +
                                std::to_string(i) + ": '" +
                                std::string(fields[i]) + "'");
            }
        }
    }
    size_t lineno = 1;
    while (csv::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != 9) {
            throw DataError("unpivoted CSV line " + std::to_string(lineno) +
                            " has " + std::to_string(fields.size()) + " fields");
        }
        auto kind = kind_from_token(fields[2]);
        if (!kind) {
            throw DataError("unknown kind on line " + std::to_string(lineno));
        }
        auto stat = stat_from_token(fields[7]);
        if (!stat) {
            throw DataError("unknown statistic on line " + std::to_string(lineno));
        }
        SeriesKey key{std::string(fields[1]),
                      *kind,
                      std::string(fields[3]),
                      std::string(fields[4]),
                      static_cast<int>(csv::parse_int(fields[5])),
                      std::string(fields[6])};
        uint32_t idx = table.intern_key(key);
        table.add_row(csv::parse_int(fields[0]), idx, *stat,
                      csv::parse_double(fields[8]));
    }
    return table;
}

UnpivotedTable UnpivotedTable::read_csv_file(const std::string& path) {
    auto in = csv::open_input(path);
    return read_csv(in);
}

PivotedFrame::PivotedFrame(int64_t range_start, int64_t range_end,
                           int64_t interval_seconds)
    : interval_seconds_(interval_seconds) {
    if (interval_seconds <= 0) {
        throw ConfigError("interval_seconds must be positive");
    }
    if (range_end < range_start) {
        throw ConfigError("frame range end before start");
    }
    if ((range_end - range_start) % interval_seconds != 0 ||
        range_start % interval_seconds != 0) {
        throw ConfigError("frame range not aligned to the interval length");
    }
    axis_.reserve(static_cast<size_t>((range_end - range_start) / interval_seconds));
    for (int64_t t = range_start; t < range_end; t += interval_seconds) {
        axis_.push_back(t);
    }
}

uint32_t PivotedFrame::add_column(ColumnName column) {
    if (!columns_.empty() && !(columns_.back().rendered < column.rendered)) {
        throw DataError("columns must be added in increasing name order: '" +
                        column.rendered + "' after '" + columns_.back().rendered +
                        "'");
    }
    columns_.push_back(std::move(column));
    cells_.emplace_back();
    return static_cast<uint32_t>(columns_.size() - 1);
}

void PivotedFrame::set_cell(uint32_t col, uint32_t row, double value) {
    if (col >= columns_.size()) {
        throw DataError("column index out of range");
    }
    if (row >= axis_.size()) {
        throw DataError("row index out of range");
    }
    auto& cells = cells_[col];
    if (!cells.empty() && cells.back().first >= row) {
        // Out-of-order writes are rare (CSV ingest is ordered); fall back to
        // an insertion that keeps the column sorted and rejects duplicates.
        auto it = std::lower_bound(
            cells.begin(), cells.end(), row,
            [](const auto& cell, uint32_t r) { return cell.first < r; });
        if (it != cells.end() && it->first == row) {
            throw DataError("duplicate cell at row " + std::to_string(row) +
                            ", column '" + columns_[col].rendered + "'");
        }
        cells.insert(it, {row, value});
        return;
    }
    cells.push_back({row, value});
}

std::optional<double> PivotedFrame::cell(uint32_t row, uint32_t col) const {
    if (col >= columns_.size() || row >= axis_.size()) {
        throw DataError("cell index out of range");
    }
    const auto& cells = cells_[col];
    auto it = std::lower_bound(
        cells.begin(), cells.end(), row,
        [](const auto& c, uint32_t r) { return c.first < r; });
    if (it == cells.end() || it->first != row) return std::nullopt;
    return it->second;
}

size_t PivotedFrame::non_null_count() const {
    size_t n = 0;
    for (const auto& col : cells_) n += col.size();
    return n;
}

std::optional<uint32_t> PivotedFrame::row_of(int64_t interval_start) const {
    auto it = std::lower_bound(axis_.begin(), axis_.end(), interval_start);
    if (it == axis_.end() || *it != interval_start) return std::nullopt;
    return static_cast<uint32_t>(it - axis_.begin());
}

PivotedFrame PivotedFrame::select_columns(
    const std::function<bool(const ColumnName&)>& keep) const {
    PivotedFrame out;
    out.interval_seconds_ = interval_seconds_;
    out.axis_ = axis_;
    for (size_t c = 0; c < columns_.size(); ++c) {
        if (!keep(columns_[c])) continue;
        out.columns_.push_back(columns_[c]);
        out.cells_.push_back(cells_[c]);
    }
    return out;
}

PivotedFrame PivotedFrame::filter_rows(const std::vector<bool>& keep) const {
    if (keep.size() != axis_.size()) {
        throw DataError("row filter length does not match the axis");
    }
    PivotedFrame out;
    out.interval_seconds_ = interval_seconds_;
    out.columns_ = columns_;
    std::vector<uint32_t> new_row(axis_.size(), 0);
    for (uint32_t r = 0; r < axis_.size(); ++r) {
        if (keep[r]) {
            new_row[r] = static_cast<uint32_t>(out.axis_.size());
            out.axis_.push_back(axis_[r]);
        }
    }
    out.cells_.resize(columns_.size());
    for (size_t c = 0; c < columns_.size(); ++c) {
        for (const auto& [row, value] : cells_[c]) {
            if (keep[row]) out.cells_[c].push_back({new_row[row], value});
        }
    }
    return out;
}

PivotedFrame PivotedFrame::slice_rows(int64_t start, int64_t end) const {
    if (end < start) {
        throw ConfigError("slice end before start");
    }
    PivotedFrame out;
    out.interval_seconds_ = interval_seconds_;
    out.columns_ = columns_;
    uint32_t first_row = 0;
    while (first_row < axis_.size() && axis_[first_row] < start) ++first_row;
    uint32_t last_row = first_row;
    while (last_row < axis_.size() && axis_[last_row] < end) ++last_row;
    out.axis_.assign(axis_.begin() + first_row, axis_.begin() + last_row);
    out.cells_.resize(columns_.size());
    for (size_t c = 0; c < columns_.size(); ++c) {
        for (const auto& [row, value] : cells_[c]) {
            if (row >= first_row && row < last_row) {
                out.cells_[c].push_back({row - first_row, value});
            }
        }
    }
    return out;
}

void PivotedFrame::write_csv(std::ostream& out) const {
    out << "interval_start";
    for (const auto& col : columns_) out << ',' << col.rendered;
    out << '\n';
    // Walk every column's sparse cells in lockstep with the row axis.
    std::vector<size_t> cursor(columns_.size(), 0);
    std::string line;
    for (uint32_t row = 0; row < axis_.size(); ++row) {
        line.clear();
        line += std::to_string(axis_[row]);
        for (size_t c = 0; c < columns_.size(); ++c) {
            line += ',';
            size_t& cur = cursor[c];
            const auto& cells = cells_[c];
            if (cur < cells.size() && cells[cur].first == row) {
                line += csv::format_double(cells[cur].second);
                ++cur;
            }
        }
        line += '\n';
        out << line;
    }
    if (!out) {
        throw IoError("write failed while serializing pivoted frame");
    }
}

void PivotedFrame::write_csv_file(const std::string& path) const {
    auto out = csv::open_output(path);
    write_csv(out);
}

PivotedFrame PivotedFrame::read_csv(std::istream& in) {
    std::string line;
    if (!csv::getline(in, line)) {
        throw DataError("pivoted CSV is empty");
    }
    auto header = csv::split(line);
    if (header.empty() || header[0] != "interval_start") {
        throw DataError("pivoted CSV must start with an interval_start column");
    }

    PivotedFrame frame;
    frame.columns_.reserve(header.size() - 1);
    for (size_t i = 1; i < header.size(); ++i) {
        auto [key, stat] = parse_column_name(header[i]);
        ColumnName col = render_column_name(key, stat);
        if (col.rendered != header[i]) {
            throw DataError("non-canonical column name '" + std::string(header[i]) +
                            "'");
        }
        if (!frame.columns_.empty() &&
            !(frame.columns_.back().rendered < col.rendered)) {
            throw DataError("pivoted CSV columns out of order at '" +
                            col.rendered + "'");
        }
        frame.columns_.push_back(std::move(col));
    }
    frame.cells_.resize(frame.columns_.size());

    size_t lineno = 1;
    while (csv::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = csv::split(line);
        if (fields.size() != header.size()) {
            throw DataError("pivoted CSV line " + std::to_string(lineno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        }
        int64_t t = csv::parse_int(fields[0]);
        if (!frame.axis_.empty() && t <= frame.axis_.back()) {
            throw DataError("pivoted CSV intervals out of order at line " +
                            std::to_string(lineno));
        }
        frame.axis_.push_back(t);
        uint32_t row = static_cast<uint32_t>(frame.axis_.size() - 1);
        for (size_t c = 0; c + 1 < fields.size(); ++c) {
            if (fields[c + 1].empty()) continue;
            frame.cells_[c].push_back({row, csv::parse_double(fields[c + 1])});
        }
    }

    if (frame.axis_.size() >= 2) {
        // Gaps are legal (filtered frames round-trip); use the smallest gap
        // as the interval length.
        int64_t step = frame.axis_[1] - frame.axis_[0];
        for (size_t i = 2; i < frame.axis_.size(); ++i) {
            step = std::min(step, frame.axis_[i] - frame.axis_[i - 1]);
        }
        frame.interval_seconds_ = step;
    }
    return frame;
}

PivotedFrame PivotedFrame::read_csv_file(const std::string& path) {
    auto in = csv::open_input(path);
    return PivotedFrame::read_csv(in);
}

PivotedFrame pivot(const UnpivotedTable& table, int64_t range_start,
                   int64_t range_end, int64_t interval_seconds) {
    PivotedFrame frame(range_start, range_end, interval_seconds);

    // Column set = observed series x all eight statistics, sorted by the full
    // rendered name (stat tokens are not in lexicographic order, so sorting
    // series prefixes alone would not do).
    const auto stat_count = static_cast<uint32_t>(kAllStats.size());
    std::vector<ColumnName> cols;
    cols.reserve(table.keys().size() * stat_count);
    for (const SeriesKey& key : table.keys()) {
        for (StatName stat : kAllStats) cols.push_back(render_column_name(key, stat));
    }
    std::vector<uint32_t> col_order(cols.size());
    for (uint32_t i = 0; i < col_order.size(); ++i) col_order[i] = i;
    std::sort(col_order.begin(), col_order.end(), [&](uint32_t a, uint32_t b) {
        return cols[a].rendered < cols[b].rendered;
    });

    std::vector<uint32_t> slot(cols.size(), 0);  // (key * 8 + stat) -> frame column
    for (uint32_t pos = 0; pos < col_order.size(); ++pos) {
        slot[col_order[pos]] = pos;
        frame.add_column(std::move(cols[col_order[pos]]));
    }
    auto column_of = [&](uint32_t key_index, StatName stat) {
        return slot[key_index * stat_count + static_cast<uint32_t>(stat)];
    };

    // Rows must land sorted per column; sort row references by (column,
    // interval) instead of copying the table.
    std::vector<uint32_t> order(table.rows().size());
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto& rows = table.rows();
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        uint32_t ca = column_of(rows[a].key_index, rows[a].stat);
        uint32_t cb = column_of(rows[b].key_index, rows[b].stat);
        if (ca != cb) return ca < cb;
        return rows[a].interval_start < rows[b].interval_start;
    });

    for (uint32_t i : order) {
        const auto& r = rows[i];
        auto row = frame.row_of(r.interval_start);
        if (!row) {
            throw DataError("interval " + std::to_string(r.interval_start) +
                            " outside the frame range [" +
                            std::to_string(range_start) + ", " +
                            std::to_string(range_end) + ")");
        }
        frame.set_cell(column_of(r.key_index, r.stat), *row, r.value);
    }
    return frame;
}

PivotedFrame pivot(const UnpivotedTable& table) {
    if (table.rows().empty()) {
        throw DataError("cannot infer a frame range from an empty table");
    }
    int64_t lo = table.rows().front().interval_start;
    int64_t hi = lo;
    for (const auto& r : table.rows()) {
        lo = std::min(lo, r.interval_start);
        hi = std::max(hi, r.interval_start);
    }
    return pivot(table, lo, hi + kDefaultIntervalSeconds, kDefaultIntervalSeconds);
}

UnpivotedTable unpivot(const PivotedFrame& frame) {
    UnpivotedTable table;
    // Column-major walk, then a sort into canonical row order.
    std::vector<uint32_t> interned(frame.cols(), 0);
    for (uint32_t c = 0; c < frame.cols(); ++c) {
        interned[c] = table.intern_key(frame.columns()[c].key);
    }
    for (uint32_t c = 0; c < frame.cols(); ++c) {
        for (const auto& [row, value] : frame.column_cells(c)) {
            table.add_row(frame.axis()[row], interned[c], frame.columns()[c].stat,
                          value);
        }
    }
    table.sort_and_check();
    return table;
}

namespace {

const std::string& masked_id(std::unordered_map<std::string, std::string>& map,
                             const std::string& raw, const char* prefix,
                             bool fail_on_unmapped) {
    auto it = map.find(raw);
    if (it != map.end()) return it->second;
    if (fail_on_unmapped) {
        throw DataError(std::string("no mask mapping for ") + prefix + " '" + raw +
                        "'");
    }
    std::string fresh = std::string(prefix) + std::to_string(map.size() + 1);
    return map.emplace(raw, std::move(fresh)).first->second;
}

}  // namespace

UnpivotedTable mask(const UnpivotedTable& table, MaskMapping& mapping) {
    UnpivotedTable out;
    std::vector<uint32_t> remapped(table.keys().size());
    for (uint32_t i = 0; i < table.keys().size(); ++i) {
        SeriesKey key = table.keys()[i];
        key.location = masked_id(mapping.location, key.location, "datacenter",
                                 mapping.fail_on_unmapped);
        key.host =
            masked_id(mapping.host, key.host, "component", mapping.fail_on_unmapped);
        key.endpoint = masked_id(mapping.endpoint, key.endpoint, "endpoint",
                                 mapping.fail_on_unmapped);
        remapped[i] = out.intern_key(key);
    }
    for (const auto& r : table.rows()) {
        out.add_row(r.interval_start, remapped[r.key_index], r.stat, r.value);
    }
    out.sort_and_check();
    return out;
}

}  // namespace anobench
