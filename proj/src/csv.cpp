#include "fgan/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fgan {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> metrics_columns(const std::vector<std::string>& head_names,
                                         int part_count) {
    std::vector<std::string> cols{"step", "gen_loss"};
    cols.insert(cols.end(), head_names.begin(), head_names.end());
    cols.push_back("d_dep");
    for (int i = 0; i < part_count; ++i)
        cols.push_back("frechet_part_" + std::to_string(i + 1));
    cols.push_back("ratio_mae");
    cols.push_back("wall_time");
    return cols;
}

std::string csv_header_line(const std::vector<std::string>& columns) {
    std::string line;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) line += ',';
        line += columns[i];
    }
    line += '\n';
    return line;
}

namespace {

void append_cell(std::string& line, const std::optional<double>& v) {
    line += ',';
    if (v) line += format_double(*v);
}

}  // namespace

std::string metrics_row_line(const MetricsRecord& rec, std::size_t head_count, int part_count) {
    if (rec.head_losses.size() != head_count)
        throw std::invalid_argument("metrics_row_line: head loss count mismatch");
    if (rec.frechet_per_part.size() != static_cast<std::size_t>(part_count))
        throw std::invalid_argument("metrics_row_line: frechet part count mismatch");
    std::string line = std::to_string(rec.step);
    append_cell(line, rec.gen_loss);
    for (const auto& l : rec.head_losses) append_cell(line, l);
    append_cell(line, rec.d_dep);
    for (const auto& f : rec.frechet_per_part) append_cell(line, f);
    append_cell(line, rec.ratio_mae);
    append_cell(line, rec.wall_time);
    line += '\n';
    return line;
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

const std::string& CsvTable::cell(std::size_t row, const std::string& name) const {
    int idx = column_index(name);
    if (idx < 0) throw std::out_of_range("no such column: " + name);
    return rows.at(row).at(static_cast<std::size_t>(idx));
}

CsvTable parse_csv(const std::string& text, const std::string& source_name) {
    CsvTable table;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::string cell;
        for (char ch : line) {
            if (ch == ',') {
                cells.push_back(std::move(cell));
                cell.clear();
            } else {
                cell += ch;
            }
        }
        cells.push_back(std::move(cell));
        if (header) {
            table.columns = std::move(cells);
            header = false;
            continue;
        }
        if (cells.size() != table.columns.size())
            throw std::runtime_error(source_name + ": line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(table.columns.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
    }
    if (table.columns.empty())
        throw std::runtime_error(source_name + ": missing CSV header");
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open CSV file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_csv(ss.str(), path);
}

std::optional<double> parse_cell(const std::string& cell) {
    if (cell.empty()) return std::nullopt;
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::runtime_error("malformed numeric cell: " + cell);
    return v;
}

}  // namespace fgan
