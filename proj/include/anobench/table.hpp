#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "anobench/series.hpp"
#include "anobench/timeutil.hpp"

namespace anobench {

// Long-format aggregate table: one row per non-null (interval, series, stat)
// cell. Series keys are interned once; rows reference them by index.
class UnpivotedTable {
public:
    struct Row {
        int64_t interval_start;
        uint32_t key_index;
        StatName stat;
        double value;
    };

    uint32_t intern_key(const SeriesKey& key);
    void add_row(int64_t interval_start, uint32_t key_index, StatName stat, double value);

    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<SeriesKey>& keys() const { return keys_; }
    const SeriesKey& key_of(const Row& r) const { return keys_[r.key_index]; }
    size_t size() const { return rows_.size(); }

    // Sorts rows by (interval_start, rendered key, canonical stat order) and
    // verifies (interval, key, stat) uniqueness. Throws DataError on duplicates.
    void sort_and_check();

    // CSV with the nine canonical columns; interval_start in epoch seconds.
    static const std::vector<std::string>& csv_header();
    void write_csv(std::ostream& out) const;
    void write_csv_file(const std::string& path) const;
    static UnpivotedTable read_csv(std::istream& in);
    static UnpivotedTable read_csv_file(const std::string& path);

private:
    std::vector<SeriesKey> keys_;
    std::vector<std::string> rendered_;  // rendered series prefix per key, for ordering
    std::unordered_map<std::string, uint32_t> index_;
    std::vector<Row> rows_;
};

// Wide interval x column matrix with explicit nulls, stored column-sparse.
// pivot() builds a dense row axis (every interval in [range_start, range_end)
// appears even if all its cells are null); row filtering can leave gaps, so
// the axis is only guaranteed strictly increasing.
class PivotedFrame {
public:
    PivotedFrame() = default;
    PivotedFrame(int64_t range_start, int64_t range_end, int64_t interval_seconds);

    int64_t interval_seconds() const { return interval_seconds_; }
    const std::vector<int64_t>& axis() const { return axis_; }
    const std::vector<ColumnName>& columns() const { return columns_; }
    size_t rows() const { return axis_.size(); }
    size_t cols() const { return columns_.size(); }

    // Column must be appended in strictly increasing rendered-name order.
    uint32_t add_column(ColumnName column);
    void set_cell(uint32_t col, uint32_t row, double value);

    std::optional<double> cell(uint32_t row, uint32_t col) const;
    const std::vector<std::pair<uint32_t, double>>& column_cells(uint32_t col) const {
        return cells_[col];
    }
    size_t non_null_count() const;

    std::optional<uint32_t> row_of(int64_t interval_start) const;

    // Keeps the columns selected by the predicate (axis unchanged).
    PivotedFrame select_columns(const std::function<bool(const ColumnName&)>& keep) const;
    // Restricts the axis to [start, end); cells outside are dropped.
    PivotedFrame slice_rows(int64_t start, int64_t end) const;
    // Keeps rows where keep[row] is true (size must match the axis).
    PivotedFrame filter_rows(const std::vector<bool>& keep) const;

    void write_csv(std::ostream& out) const;
    void write_csv_file(const std::string& path) const;
    static PivotedFrame read_csv(std::istream& in);
    static PivotedFrame read_csv_file(const std::string& path);

private:
    int64_t interval_seconds_ = kDefaultIntervalSeconds;
    std::vector<int64_t> axis_;
    std::vector<ColumnName> columns_;
    // per column: (row index, value), sorted by row index
    std::vector<std::vector<std::pair<uint32_t, double>>> cells_;
};

// Spreads each (interval, series) aggregate over one column per statistic.
// Intervals with no data inside the range appear as all-null rows.
// Throws DataError on duplicate (interval, key, stat) rows or when a cell
// falls outside [range_start, range_end).
PivotedFrame pivot(const UnpivotedTable& table, int64_t range_start, int64_t range_end,
                   int64_t interval_seconds = kDefaultIntervalSeconds);

// Convenience overload: range inferred from the table's own interval span.
PivotedFrame pivot(const UnpivotedTable& table);

// One row per non-null cell; inverse of pivot up to row order.
UnpivotedTable unpivot(const PivotedFrame& frame);

// Consistent replacement of location/host/endpoint IDs. Unmapped values are
// auto-assigned ("datacenterN", "componentN", "endpointN") unless
// fail_on_unmapped is set, in which case they raise DataError.
struct MaskMapping {
    std::unordered_map<std::string, std::string> location;
    std::unordered_map<std::string, std::string> host;
    std::unordered_map<std::string, std::string> endpoint;
    bool fail_on_unmapped = false;
};

UnpivotedTable mask(const UnpivotedTable& table, MaskMapping& mapping);

}  // namespace anobench
