#ifndef FGAN_RUNNER_HPP
#define FGAN_RUNNER_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "fgan/config.hpp"

namespace fgan {

/// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;    // bad arguments or configuration
inline constexpr int kExitCheck = 2;    // an oracle check failed
inline constexpr int kExitRuntime = 3;  // a run failed mid-flight

struct TrainCommand {
    std::string config_path;
    std::string out_override;  // --out
    std::optional<std::uint64_t> seed_override;
};

struct SweepCommand {
    std::string config_path;
    std::string out_override;
    int parallel = 1;
};

struct ReportCommand {
    std::string dir;  // a run dir (metrics.csv) or sweep dir (aggregate.csv)
};

struct OracleCheckCommand {
    bool flip_q_sign = false;  // test seam: forces the identity check to fail
    std::uint64_t seed = 20240817;
};

int cmd_train(const TrainCommand& cmd);
int cmd_sweep(const SweepCommand& cmd);
int cmd_report(const ReportCommand& cmd);
int cmd_oracle_check(const OracleCheckCommand& cmd);

/// Output-directory precedence: --out, then the config's out_dir, then
/// $FGAN_OUT (default "runs") joined with the config stem and, for single
/// runs, a seed suffix.
std::string resolve_out_dir(const std::string& cli_out, const std::string& cfg_out,
                            const std::string& config_path, std::optional<std::uint64_t> seed);

/// Executes one configured run into run_dir: archived config.json (out_dir
/// stripped), streamed metrics.csv, checkpoints/, summary.txt and a
/// status.txt that reads "complete" or "incomplete: <reason>". Returns the
/// failure reason, empty on success.
std::string execute_run(const ExperimentConfig& cfg, const std::string& run_dir);

}  // namespace fgan

#endif
