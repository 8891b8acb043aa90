#include <CLI11.hpp>
#include <cstdint>
#include <string>

#include "fgan/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Factorized adversarial training experiments"};
    app.require_subcommand(1);

    fgan::TrainCommand train_cmd;
    std::uint64_t seed_value = 0;
    CLI::App* train = app.add_subcommand("train", "Execute one configured training run");
    train->add_option("--config", train_cmd.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    train->add_option("--out", train_cmd.out_override, "run output directory");
    train->add_option("--seed", seed_value, "seed override");

    fgan::SweepCommand sweep_cmd;
    CLI::App* sweep = app.add_subcommand("sweep", "Run a paired-sample-count sweep");
    sweep->add_option("--config", sweep_cmd.config_path, "sweep spec (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("--out", sweep_cmd.out_override, "sweep output directory");
    sweep->add_option("--parallel", sweep_cmd.parallel, "worker threads (cells share nothing)")
        ->check(CLI::PositiveNumber);

    fgan::OracleCheckCommand check_cmd;
    CLI::App* check = app.add_subcommand("oracle-check", "Verify the analytic-oracle identities");
    check->add_option("--seed", check_cmd.seed, "seed for the randomized checks");
    // Mutation seam for exercising the failure path end to end; not part of
    // the public interface.
    check->add_flag("--inject-q-sign-flip", check_cmd.flip_q_sign)->group("");

    fgan::ReportCommand report_cmd;
    CLI::App* report = app.add_subcommand("report", "Render plots + summary for a run or sweep");
    report->add_option("dir", report_cmd.dir, "run or sweep directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage error.
        return rc == 0 ? fgan::kExitOk : fgan::kExitUsage;
    }

    if (train->parsed()) {
        if (train->count("--seed")) train_cmd.seed_override = seed_value;
        return fgan::cmd_train(train_cmd);
    }
    if (sweep->parsed()) return fgan::cmd_sweep(sweep_cmd);
    if (check->parsed()) return fgan::cmd_oracle_check(check_cmd);
    if (report->parsed()) return fgan::cmd_report(report_cmd);
    return fgan::kExitUsage;
}
