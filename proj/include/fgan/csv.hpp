#ifndef FGAN_CSV_HPP
#define FGAN_CSV_HPP

#include <optional>
#include <string>
#include <vector>

#include "fgan/metrics.hpp"

namespace fgan {

/// %.17g rendering: enough digits to round-trip any double exactly.
std::string format_double(double v);

/// Fixed metrics schema: step, gen_loss, one column per head loss, d_dep,
/// frechet_part_1..K, ratio_mae, wall_time. Missing values are empty cells.
std::vector<std::string> metrics_columns(const std::vector<std::string>& head_names,
                                         int part_count);
std::string csv_header_line(const std::vector<std::string>& columns);
std::string metrics_row_line(const MetricsRecord& rec, std::size_t head_count, int part_count);

/// Strict reader for the CSVs this project writes: no quoting, first line is
/// the header. Cells are kept as raw strings so exact-match comparisons and
/// re-aggregation stay byte-faithful.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;  // -1 when absent
    const std::string& cell(std::size_t row, const std::string& name) const;
};

CsvTable read_csv_file(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& source_name);

/// Empty-cell-aware numeric view of a cell.
std::optional<double> parse_cell(const std::string& cell);

}  // namespace fgan

#endif
