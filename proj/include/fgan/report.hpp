#ifndef FGAN_REPORT_HPP
#define FGAN_REPORT_HPP

#include <string>
#include <vector>

#include "fgan/csv.hpp"

namespace fgan {

/// One sweep cell: the runs sharing (n_paired, model_kind) across seeds.
struct AggregateCell {
    int n_paired = 0;
    std::string model_kind;
    std::vector<std::string> metrics_csv_paths;  // one per completed seed
};

/// Builds the aggregate table from per-run metrics files: one row per cell,
/// and per metric the mean and standard error (sample std / sqrt(n)) of the
/// runs' final eval rows. Cells with no value stay empty; stderr needs at
/// least two values. Re-running this on the same files reproduces the stored
/// aggregate byte-for-byte.
CsvTable compute_aggregate(const std::vector<AggregateCell>& cells);

std::string csv_to_text(const CsvTable& table);

struct PlotPoint {
    std::string x_text;    // exact source-CSV cell feeding the x value
    std::string y_text;    // exact source-CSV cell feeding the y value
    std::string err_text;  // stderr cell; empty = no error bar
};
struct PlotSeries {
    std::string label;
    std::vector<PlotPoint> points;
};
struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    bool log_x = false;
};

/// Self-contained SVG line plot. Every marker carries data-x / data-y
/// attributes holding the exact source-CSV strings, so a report can be
/// cross-checked against its tables without reparsing floats.
std::string render_svg_plot(const PlotSpec& spec);

/// Writes report.md plus one SVG per available metric into <run_dir>/report,
/// reading <run_dir>/metrics.csv. A run with no eval rows yields a report
/// noting that. Throws std::runtime_error when metrics.csv is missing or
/// malformed.
void generate_run_report(const std::string& run_dir);

/// Writes report.md plus per-metric SVGs into <sweep_dir>/report, reading
/// <sweep_dir>/aggregate.csv. Throws std::runtime_error when it is missing.
void generate_sweep_report(const std::string& sweep_dir);

}  // namespace fgan

#endif
