#include "fgan/runner.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "fgan/csv.hpp"
#include "fgan/ioutil.hpp"
#include "fgan/oracle_checks.hpp"
#include "fgan/report.hpp"

namespace fgan {

namespace {

std::string config_stem(const std::string& config_path) {
    std::string stem = std::filesystem::path(config_path).stem().string();
    return stem.empty() ? "run" : stem;
}

std::string write_status(const std::string& run_dir, const std::string& status) {
    try {
        write_text_file(run_dir + "/status.txt", status + "\n");
        return "";
    } catch (const std::exception& e) {
        return e.what();
    }
}

/// key=value rendering of the final metrics row, reusing the CSV cells so the
/// summary matches metrics.csv byte-for-byte.
std::string summary_line(const std::vector<std::string>& columns, const MetricsRecord& rec,
                         std::size_t head_count, int part_count) {
    std::string row = metrics_row_line(rec, head_count, part_count);
    if (!row.empty() && row.back() == '\n') row.pop_back();
    std::vector<std::string> cells;
    std::string cur;
    for (char c : row) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    std::ostringstream os;
    os << "status=complete";
    for (std::size_t i = 0; i < cells.size() && i < columns.size(); ++i)
        if (!cells[i].empty()) os << ' ' << columns[i] << '=' << cells[i];
    return os.str();
}

}  // namespace

std::string resolve_out_dir(const std::string& cli_out, const std::string& cfg_out,
                            const std::string& config_path, std::optional<std::uint64_t> seed) {
    if (!cli_out.empty()) return cli_out;
    if (!cfg_out.empty()) return cfg_out;
    const char* env = std::getenv("FGAN_OUT");
    std::string root = env && *env ? env : "runs";
    std::string dir = root + "/" + config_stem(config_path);
    if (seed) dir += "_seed" + std::to_string(*seed);
    return dir;
}

std::string execute_run(const ExperimentConfig& cfg, const std::string& run_dir) {
    try {
        ensure_dir(run_dir);
        ensure_dir(run_dir + "/checkpoints");
        write_text_file(run_dir + "/status.txt", "running\n");

        ExperimentConfig archived = cfg;
        archived.out_dir.clear();  // the archive must not steer reruns' output
        write_text_file(run_dir + "/config.json",
                        experiment_config_to_json(archived).dump(2) + "\n");

        TrainingRunArgs args = to_run_args(cfg);
        args.opts.checkpoint_dir = run_dir + "/checkpoints";
        TrainSession session(std::move(args));

        const std::vector<std::string> head_names = session.discriminators().head_names();
        const int part_count = task_partition(session.task()).part_count();
        const std::vector<std::string> columns = metrics_columns(head_names, part_count);

        std::ofstream metrics(run_dir + "/metrics.csv", std::ios::binary | std::ios::trunc);
        if (!metrics) throw std::runtime_error("cannot open metrics.csv for writing");
        metrics << csv_header_line(columns);
        if (!metrics) throw std::runtime_error("metrics.csv header write failed");

        std::optional<MetricsRecord> final_rec;
        session.run([&](const MetricsRecord& rec) {
            metrics << metrics_row_line(rec, head_names.size(), part_count);
            metrics.flush();
            if (!metrics) throw std::runtime_error("metrics.csv row write failed");
            final_rec = rec;
        });
        metrics.close();
        if (!metrics) throw std::runtime_error("metrics.csv close failed");

        std::string summary =
            final_rec ? summary_line(columns, *final_rec, head_names.size(), part_count)
                      : std::string("status=complete (no eval rows)");
        write_text_file(run_dir + "/summary.txt", summary + "\n");
        write_text_file(run_dir + "/status.txt", "complete\n");
        return "";
    } catch (const std::exception& e) {
        write_status(run_dir, std::string("incomplete: ") + e.what());
        return e.what();
    }
}

int cmd_train(const TrainCommand& cmd) {
    ExperimentConfig cfg;
    try {
        cfg = load_experiment_config(cmd.config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    }
    if (cmd.seed_override) cfg.train.seed = *cmd.seed_override;
    std::string run_dir =
        resolve_out_dir(cmd.out_override, cfg.out_dir, cmd.config_path, cfg.train.seed);

    std::string err = execute_run(cfg, run_dir);
    if (!err.empty()) {
        std::fprintf(stderr, "run failed: %s\n", err.c_str());
        return kExitRuntime;
    }
    std::string summary = read_text_file(run_dir + "/summary.txt");
    std::fprintf(stdout, "run dir: %s\n%s", run_dir.c_str(), summary.c_str());
    return kExitOk;
}

int cmd_sweep(const SweepCommand& cmd) {
    SweepSpec spec;
    try {
        spec = load_sweep_spec(cmd.config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    }
    if (cmd.parallel < 1) {
        std::fprintf(stderr, "config error: --parallel must be >= 1\n");
        return kExitUsage;
    }
    std::string sweep_dir =
        resolve_out_dir(cmd.out_override, spec.base.out_dir, cmd.config_path, std::nullopt);

    struct Job {
        int n_paired;
        ModelKind kind;
        std::uint64_t seed;
        std::string dir;
        std::string error;
    };
    std::vector<Job> jobs;
    for (int np : spec.n_paired_values)
        for (ModelKind kind : spec.model_kinds)
            for (std::uint64_t seed : spec.seeds) {
                std::string dir = sweep_dir + "/runs/np" + std::to_string(np) + "_" +
                                  to_string(kind) + "_seed" + std::to_string(seed);
                jobs.push_back({np, kind, seed, dir, ""});
            }

    try {
        ensure_dir(sweep_dir);
        write_text_file(sweep_dir + "/status.txt", "running\n");
        SweepSpec archived = spec;
        archived.base.out_dir.clear();
        write_text_file(sweep_dir + "/config.json", sweep_spec_to_json(archived).dump(2) + "\n");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sweep setup failed: %s\n", e.what());
        return kExitRuntime;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            Job& job = jobs[i];
            ExperimentConfig cfg = spec.base;
            cfg.data.n_paired = job.n_paired;
            cfg.train.model_kind = job.kind;
            cfg.train.seed = job.seed;
            cfg.out_dir.clear();
            job.error = execute_run(cfg, job.dir);
        }
    };
    int threads = std::min<int>(cmd.parallel, static_cast<int>(jobs.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    int failed = 0;
    try {
        CsvTable runs;
        runs.columns = {"n_paired", "model_kind", "seed", "dir", "status"};
        for (const Job& job : jobs) {
            if (!job.error.empty()) ++failed;
            runs.rows.push_back({std::to_string(job.n_paired), to_string(job.kind),
                                 std::to_string(job.seed),
                                 std::filesystem::relative(job.dir, sweep_dir).string(),
                                 job.error.empty() ? "complete" : "failed"});
        }
        write_text_file(sweep_dir + "/runs.csv", csv_to_text(runs));

        std::vector<AggregateCell> cells;
        for (int np : spec.n_paired_values)
            for (ModelKind kind : spec.model_kinds) {
                AggregateCell cell;
                cell.n_paired = np;
                cell.model_kind = to_string(kind);
                for (const Job& job : jobs)
                    if (job.n_paired == np && job.kind == kind && job.error.empty())
                        cell.metrics_csv_paths.push_back(job.dir + "/metrics.csv");
                cells.push_back(std::move(cell));
            }
        write_text_file(sweep_dir + "/aggregate.csv", csv_to_text(compute_aggregate(cells)));

        write_text_file(sweep_dir + "/status.txt",
                        failed == 0 ? "complete\n"
                                    : "incomplete: " + std::to_string(failed) + " runs failed\n");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sweep aggregation failed: %s\n", e.what());
        write_status(sweep_dir, std::string("incomplete: ") + e.what());
        return kExitRuntime;
    }

    std::fprintf(stdout, "sweep dir: %s\nruns: %zu (%d failed)\n", sweep_dir.c_str(), jobs.size(),
                 failed);
    if (failed != 0) {
        for (const Job& job : jobs)
            if (!job.error.empty())
                std::fprintf(stderr, "failed: %s: %s\n", job.dir.c_str(), job.error.c_str());
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_report(const ReportCommand& cmd) {
    try {
        if (path_exists(cmd.dir + "/metrics.csv")) {
            generate_run_report(cmd.dir);
        } else if (path_exists(cmd.dir + "/aggregate.csv")) {
            generate_sweep_report(cmd.dir);
        } else {
            std::fprintf(stderr, "nothing to report in %s (no metrics.csv or aggregate.csv)\n",
                         cmd.dir.c_str());
            return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "report failed: %s\n", e.what());
        return kExitUsage;
    }
    std::fprintf(stdout, "report written to %s/report\n", cmd.dir.c_str());
    return kExitOk;
}

int cmd_oracle_check(const OracleCheckCommand& cmd) {
    OracleCheckOptions opts;
    opts.flip_q_sign = cmd.flip_q_sign;
    opts.seed = cmd.seed;
    std::vector<CheckResult> results;
    try {
        results = run_oracle_checks(opts);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "oracle checks crashed: %s\n", e.what());
        return kExitRuntime;
    }
    std::fputs(format_check_report(results).c_str(), stdout);
    return all_passed(results) ? kExitOk : kExitCheck;
}

}  // namespace fgan
