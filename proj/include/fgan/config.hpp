#ifndef FGAN_CONFIG_HPP
#define FGAN_CONFIG_HPP

#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fgan/train.hpp"

namespace fgan {

/// Configuration problem with the offending source location (file, line for
/// syntax errors, field path for semantic errors) in the message.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int schema_version = 1;
    TaskVariant task;  // defaults to PairedCategoricalTask
    TrainConfig train;
    DatasetSplitSpec data;
    LoopOptions eval;
    std::optional<HierarchySpec> hierarchy;
    std::optional<AutoregressiveSpec> autoregressive;
    std::optional<GeneratorOutput> generator_output;
    std::string out_dir;  // empty: resolved by the CLI
};

struct SweepSpec {
    int schema_version = 1;
    ExperimentConfig base;
    std::vector<int> n_paired_values;
    std::vector<ModelKind> model_kinds;
    std::vector<std::uint64_t> seeds;
};

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& source_name);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

SweepSpec parse_sweep_spec(const std::string& json_text, const std::string& source_name);
SweepSpec load_sweep_spec(const std::string& path);
nlohmann::json sweep_spec_to_json(const SweepSpec& spec);

TrainingRunArgs to_run_args(const ExperimentConfig& cfg);

}  // namespace fgan

#endif
