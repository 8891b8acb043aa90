#include "fgan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fgan/ioutil.hpp"

namespace fgan {

namespace {

std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

struct MetricSummary {
    std::vector<double> values;  // one per run that produced the metric

    void add(std::optional<double> v) {
        if (v) values.push_back(*v);
    }
    std::string mean_text() const {
        if (values.empty()) return "";
        double sum = 0.0;
        for (double v : values) sum += v;
        return format_double(sum / static_cast<double>(values.size()));
    }
    std::string stderr_text() const {
        if (values.size() < 2) return "";
        double n = static_cast<double>(values.size());
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= n;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        return format_double(std::sqrt(ss / (n - 1.0)) / std::sqrt(n));
    }
};

std::vector<std::string> frechet_columns(const CsvTable& table) {
    std::vector<std::string> out;
    for (const std::string& c : table.columns)
        if (c.rfind("frechet_part_", 0) == 0) out.push_back(c);
    return out;
}

}  // namespace

CsvTable compute_aggregate(const std::vector<AggregateCell>& cells) {
    // The metric layout comes from the first readable run; every run of a
    // sweep shares a task, so headers agree up to head naming (which the
    // aggregate does not use).
    std::vector<std::string> frechet_cols = [&] {
        for (const AggregateCell& cell : cells)
            for (const std::string& path : cell.metrics_csv_paths)
                return frechet_columns(read_csv_file(path));
        return std::vector<std::string>{};
    }();
    std::vector<std::string> metrics = {"gen_loss", "d_dep"};
    for (const std::string& c : frechet_cols) metrics.push_back(c);
    metrics.push_back("frechet_mean");
    metrics.push_back("ratio_mae");

    CsvTable out;
    out.columns = {"n_paired", "model_kind", "repeats"};
    for (const std::string& m : metrics) {
        out.columns.push_back(m + "_mean");
        out.columns.push_back(m + "_stderr");
    }

    for (const AggregateCell& cell : cells) {
        std::vector<MetricSummary> summaries(metrics.size());
        int repeats = 0;
        for (const std::string& path : cell.metrics_csv_paths) {
            CsvTable t = read_csv_file(path);
            if (t.rows.empty()) continue;
            ++repeats;
            std::size_t last = t.rows.size() - 1;
            for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
                const std::string& m = metrics[mi];
                if (m == "frechet_mean") {
                    double sum = 0.0;
                    int n = 0;
                    bool complete = !frechet_cols.empty();
                    for (const std::string& fc : frechet_cols) {
                        int col = t.column_index(fc);
                        std::optional<double> v =
                            col < 0 ? std::nullopt : parse_cell(t.rows[last][col]);
                        if (!v) {
                            complete = false;
                            break;
                        }
                        sum += *v;
                        ++n;
                    }
                    if (complete && n > 0) summaries[mi].add(sum / n);
                    continue;
                }
                int col = t.column_index(m);
                if (col >= 0) summaries[mi].add(parse_cell(t.rows[last][col]));
            }
        }
        std::vector<std::string> row = {std::to_string(cell.n_paired), cell.model_kind,
                                        std::to_string(repeats)};
        for (const MetricSummary& s : summaries) {
            row.push_back(s.mean_text());
            row.push_back(s.stderr_text());
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string csv_to_text(const CsvTable& table) {
    std::ostringstream os;
    os << csv_header_line(table.columns);
    for (const std::vector<std::string>& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << row[i];
        }
        os << '\n';
    }
    return os.str();
}

std::string render_svg_plot(const PlotSpec& spec) {
    constexpr double kW = 640, kH = 420;
    constexpr double kL = 72, kR = 620, kT = 46, kB = 368;

    struct Pt {
        double x, y, err;
        bool has_err;
        const PlotPoint* src;
    };
    std::vector<std::vector<Pt>> series_pts(spec.series.size());
    std::vector<double> xs;
    double ymin = 0, ymax = 0;
    bool any = false;
    bool log_ok = spec.log_x;
    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        for (const PlotPoint& p : spec.series[s].points) {
            std::optional<double> x = parse_cell(p.x_text);
            std::optional<double> y = parse_cell(p.y_text);
            if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) continue;
            std::optional<double> e = parse_cell(p.err_text);
            Pt pt{*x, *y, e.value_or(0.0), e.has_value(), &p};
            if (pt.x <= 0.0) log_ok = false;
            double lo = pt.y - (pt.has_err ? pt.err : 0.0);
            double hi = pt.y + (pt.has_err ? pt.err : 0.0);
            if (!any) {
                ymin = lo;
                ymax = hi;
                any = true;
            } else {
                ymin = std::min(ymin, lo);
                ymax = std::max(ymax, hi);
            }
            xs.push_back(pt.x);
            series_pts[s].push_back(pt);
        }
    }

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    os << "  <rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    os << "  <text x=\"" << (kW / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
          "font-family=\"sans-serif\">"
       << xml_escape(spec.title) << "</text>\n";

    if (!any) {
        os << "  <text x=\"" << (kW / 2) << "\" y=\"" << (kH / 2)
           << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">no "
              "data</text>\n</svg>\n";
        return os.str();
    }

    double xmin = *std::min_element(xs.begin(), xs.end());
    double xmax = *std::max_element(xs.begin(), xs.end());
    auto fx = [&](double v) { return log_ok ? std::log10(v) : v; };
    double fxmin = fx(xmin), fxmax = fx(xmax);
    if (fxmax <= fxmin) fxmax = fxmin + 1.0;
    double ypad = (ymax - ymin) > 0 ? 0.05 * (ymax - ymin) : std::max(1e-12, std::abs(ymax)) * 0.1;
    double plo = ymin - ypad, phi = ymax + ypad;

    auto px = [&](double v) { return kL + (fx(v) - fxmin) / (fxmax - fxmin) * (kR - kL); };
    auto py = [&](double v) { return kB - (v - plo) / (phi - plo) * (kB - kT); };

    char buf[256];

    // axes
    std::snprintf(buf, sizeof buf,
                  "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  kL, kB, kR, kB);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  kL, kT, kL, kB);
    os << buf;

    // x ticks: the distinct data values when few, else evenly spaced
    std::set<double> distinct(xs.begin(), xs.end());
    std::vector<double> xticks;
    if (distinct.size() <= 8) {
        xticks.assign(distinct.begin(), distinct.end());
    } else {
        for (int i = 0; i <= 5; ++i) {
            double t = fxmin + (fxmax - fxmin) * i / 5.0;
            xticks.push_back(log_ok ? std::pow(10.0, t) : t);
        }
    }
    for (double v : xticks) {
        double x = px(v);
        std::snprintf(buf, sizeof buf,
                      "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                      x, kB, x, kB + 5);
        os << buf;
        std::snprintf(buf, sizeof buf,
                      "  <text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"11\" "
                      "font-family=\"sans-serif\">%s</text>\n",
                      x, kB + 18, tick_label(v).c_str());
        os << buf;
    }
    for (int i = 0; i <= 5; ++i) {
        double v = plo + (phi - plo) * i / 5.0;
        double y = py(v);
        std::snprintf(buf, sizeof buf,
                      "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                      kL - 5, y, kL, y);
        os << buf;
        std::snprintf(buf, sizeof buf,
                      "  <text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-size=\"11\" "
                      "font-family=\"sans-serif\">%s</text>\n",
                      kL - 8, y + 4, tick_label(v).c_str());
        os << buf;
    }

    // axis labels
    std::snprintf(buf, sizeof buf,
                  "  <text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"13\" "
                  "font-family=\"sans-serif\">%s</text>\n",
                  (kL + kR) / 2, kH - 12, xml_escape(spec.x_label).c_str());
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "  <text x=\"16\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"13\" "
                  "font-family=\"sans-serif\" transform=\"rotate(-90 16 %.1f)\">%s</text>\n",
                  (kT + kB) / 2, (kT + kB) / 2, xml_escape(spec.y_label).c_str());
    os << buf;

    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        const std::vector<Pt>& pts = series_pts[s];
        if (pts.size() > 1) {
            os << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (const Pt& p : pts) {
                std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(p.x), py(p.y));
                os << buf;
            }
            os << "\"/>\n";
        }
        for (const Pt& p : pts) {
            if (p.has_err && p.err > 0.0) {
                double x = px(p.x), y0 = py(p.y - p.err), y1 = py(p.y + p.err);
                std::snprintf(buf, sizeof buf,
                              "  <line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\"/>\n",
                              x, y0, x, y1, color);
                os << buf;
                std::snprintf(buf, sizeof buf,
                              "  <line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\"/>\n",
                              x - 4, y0, x + 4, y0, color);
                os << buf;
                std::snprintf(buf, sizeof buf,
                              "  <line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\"/>\n",
                              x - 4, y1, x + 4, y1, color);
                os << buf;
            }
            std::snprintf(buf, sizeof buf, "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"3.5\" fill=\"%s\"",
                          px(p.x), py(p.y), color);
            os << buf << " data-x=\"" << xml_escape(p.src->x_text) << "\" data-y=\""
               << xml_escape(p.src->y_text) << "\"";
            if (!p.src->err_text.empty())
                os << " data-err=\"" << xml_escape(p.src->err_text) << "\"";
            os << "/>\n";
        }
    }

    // legend
    double ly = kT + 6;
    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        std::snprintf(buf, sizeof buf,
                      "  <rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" fill=\"%s\"/>\n",
                      kR - 150.0, ly, color);
        os << buf;
        std::snprintf(buf, sizeof buf,
                      "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" font-family=\"sans-serif\">%s</text>\n",
                      kR - 136.0, ly + 9, xml_escape(spec.series[s].label).c_str());
        os << buf;
        ly += 16;
    }

    os << "</svg>\n";
    return os.str();
}

namespace {

std::string markdown_table(const CsvTable& table) {
    std::ostringstream os;
    os << '|';
    for (const std::string& c : table.columns) os << ' ' << c << " |";
    os << "\n|";
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << " --- |";
    os << '\n';
    for (const std::vector<std::string>& row : table.rows) {
        os << '|';
        for (const std::string& cell : row) os << ' ' << (cell.empty() ? " " : cell) << " |";
        os << '\n';
    }
    return os.str();
}

bool column_has_values(const CsvTable& t, int col) {
    if (col < 0) return false;
    for (const std::vector<std::string>& row : t.rows)
        if (!row[col].empty()) return true;
    return false;
}

PlotSeries column_series(const CsvTable& t, const std::string& x_col, const std::string& y_col) {
    PlotSeries s;
    s.label = y_col;
    int xi = t.column_index(x_col);
    int yi = t.column_index(y_col);
    for (const std::vector<std::string>& row : t.rows)
        s.points.push_back({row[xi], row[yi], ""});
    return s;
}

}  // namespace

void generate_run_report(const std::string& run_dir) {
    std::string metrics_path = run_dir + "/metrics.csv";
    if (!path_exists(metrics_path))
        throw std::runtime_error("no metrics.csv in " + run_dir);
    CsvTable t = read_csv_file(metrics_path);
    std::string report_dir = run_dir + "/report";
    ensure_dir(report_dir);

    std::string name = std::filesystem::path(run_dir).filename().string();
    std::ostringstream md;
    md << "# Run report: " << name << "\n\n";

    if (t.rows.empty()) {
        md << "no eval rows\n";
        write_text_file(report_dir + "/report.md", md.str());
        return;
    }

    // plots: one per metric family, all against the step column
    struct Plot {
        std::string file, title;
        PlotSpec spec;
    };
    std::vector<Plot> plots;

    auto add_single = [&](const std::string& col, const std::string& file) {
        if (!column_has_values(t, t.column_index(col))) return;
        Plot p;
        p.file = file;
        p.spec.title = col + " vs step";
        p.spec.x_label = "step";
        p.spec.y_label = col;
        p.spec.series.push_back(column_series(t, "step", col));
        plots.push_back(std::move(p));
    };
    add_single("gen_loss", "gen_loss.svg");

    PlotSpec heads;
    heads.title = "discriminator losses vs step";
    heads.x_label = "step";
    heads.y_label = "loss";
    for (const std::string& c : t.columns)
        if (c.rfind("d_", 0) == 0 && c != "d_dep" && column_has_values(t, t.column_index(c)))
            heads.series.push_back(column_series(t, "step", c));
    if (!heads.series.empty()) plots.push_back({"head_losses.svg", heads.title, heads});

    add_single("d_dep", "d_dep.svg");
    PlotSpec fre;
    fre.title = "frechet distance vs step";
    fre.x_label = "step";
    fre.y_label = "frechet";
    for (const std::string& c : t.columns)
        if (c.rfind("frechet_part_", 0) == 0 && column_has_values(t, t.column_index(c)))
            fre.series.push_back(column_series(t, "step", c));
    if (!fre.series.empty()) plots.push_back({"frechet.svg", fre.title, fre});
    add_single("ratio_mae", "ratio_mae.svg");

    for (Plot& p : plots) {
        if (p.spec.title.empty()) p.spec.title = p.title;
        write_text_file(report_dir + "/" + p.file, render_svg_plot(p.spec));
    }

    md << "Eval rows: " << t.rows.size() << "\n\n## Final row\n\n";
    CsvTable final_only;
    final_only.columns = t.columns;
    final_only.rows.push_back(t.rows.back());
    md << markdown_table(final_only) << "\n";
    if (path_exists(run_dir + "/summary.txt"))
        md << "## Summary\n\n```\n" << read_text_file(run_dir + "/summary.txt") << "```\n\n";
    md << "## Plots\n\n";
    for (const Plot& p : plots) md << "![" << p.file << "](" << p.file << ")\n\n";
    write_text_file(report_dir + "/report.md", md.str());
}

void generate_sweep_report(const std::string& sweep_dir) {
    std::string agg_path = sweep_dir + "/aggregate.csv";
    if (!path_exists(agg_path))
        throw std::runtime_error("no aggregate.csv in " + sweep_dir);
    CsvTable t = read_csv_file(agg_path);
    std::string report_dir = sweep_dir + "/report";
    ensure_dir(report_dir);

    std::string name = std::filesystem::path(sweep_dir).filename().string();
    std::ostringstream md;
    md << "# Sweep report: " << name << "\n\n";
    if (t.rows.empty()) {
        md << "no aggregate rows\n";
        write_text_file(report_dir + "/report.md", md.str());
        return;
    }
    md << "## Aggregate\n\n" << markdown_table(t) << "\n## Plots\n\n";

    // one series per model kind
    std::vector<std::string> kinds;
    int kind_col = t.column_index("model_kind");
    int np_col = t.column_index("n_paired");
    for (const std::vector<std::string>& row : t.rows)
        if (std::find(kinds.begin(), kinds.end(), row[kind_col]) == kinds.end())
            kinds.push_back(row[kind_col]);

    // log x when n_paired spans an order of magnitude or more
    bool log_x = true;
    double np_min = 0, np_max = 0;
    bool first = true;
    for (const std::vector<std::string>& row : t.rows) {
        std::optional<double> v = parse_cell(row[np_col]);
        if (!v || *v <= 0) {
            log_x = false;
            break;
        }
        np_min = first ? *v : std::min(np_min, *v);
        np_max = first ? *v : std::max(np_max, *v);
        first = false;
    }
    if (log_x && (first || np_max < 10 * np_min)) log_x = false;

    for (const std::string& col : t.columns) {
        if (col.size() < 6 || col.substr(col.size() - 5) != "_mean") continue;
        std::string metric = col.substr(0, col.size() - 5);
        if (!column_has_values(t, t.column_index(col))) continue;
        PlotSpec spec;
        spec.title = metric + " vs n_paired";
        spec.x_label = "n_paired";
        spec.y_label = metric;
        spec.log_x = log_x;
        int mean_col = t.column_index(col);
        int err_col = t.column_index(metric + "_stderr");
        for (const std::string& kind : kinds) {
            PlotSeries s;
            s.label = kind;
            for (const std::vector<std::string>& row : t.rows) {
                if (row[kind_col] != kind) continue;
                s.points.push_back(
                    {row[np_col], row[mean_col], err_col >= 0 ? row[err_col] : ""});
            }
            spec.series.push_back(std::move(s));
        }
        std::string file = metric + ".svg";
        write_text_file(report_dir + "/" + file, render_svg_plot(spec));
        md << "![" << file << "](" << file << ")\n\n";
    }
    write_text_file(report_dir + "/report.md", md.str());
}

}  // namespace fgan
