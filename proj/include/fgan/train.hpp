#ifndef FGAN_TRAIN_HPP
#define FGAN_TRAIN_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fgan/checkpoint.hpp"
#include "fgan/factorization.hpp"
#include "fgan/losses.hpp"
#include "fgan/metrics.hpp"
#include "fgan/net.hpp"
#include "fgan/samplers.hpp"
#include "fgan/tasks.hpp"

namespace fgan {

enum class ModelKind { gan_baseline, factorgan };
std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct TrainConfig {
    double lr = 1e-4;
    int batch_size = 25;
    int disc_updates_per_gen_update = 2;
    int total_gen_steps = 0;
    std::uint64_t seed = 0;
    int noise_dim = 50;
    ModelKind model_kind = ModelKind::factorgan;
    CombinationMode combination_mode = CombinationMode::joint;
    std::vector<int> gen_hidden = {128, 128};
    std::vector<int> disc_hidden = {128, 128};
    int spectral_power_iterations = 1;
};

/// How the generator's raw network output becomes a joint-shaped sample.
///   sigmoid / identity: the network output IS the sample (all parts, or the
///     generated parts in conditional mode).
///   mixture_mask: the network, conditioned on a mixture m, emits a mask
///     b in (0,1); the sample is (a, v) with a + v == m bitwise.
enum class GeneratorOutput { sigmoid, identity, mixture_mask };
std::string to_string(GeneratorOutput output);
GeneratorOutput generator_output_from_string(const std::string& s);

struct GeneratorSpec {
    int noise_dim = 50;
    int conditioning_dim = 0;  // appended to the noise as network input
    int raw_output_dim = 0;    // network output width (mask width in mask mode)
    std::vector<int> hidden = {128, 128};
    GeneratorOutput output = GeneratorOutput::sigmoid;
    /// Global columns the raw output fills (identity/sigmoid modes): all dims
    /// normally, the non-conditioning dims in conditional mode.
    std::vector<int> output_dims;
    /// Global columns of the conditioning values inside the assembled sample
    /// (conditional mode). Empty in mask mode: the mixture m is input-only.
    std::vector<int> conditioning_sample_dims;
    /// Mask mode only: columns of the two sources inside the sample.
    std::vector<int> mask_a_dims, mask_v_dims;
    int sample_dim = 0;  // assembled joint sample width
};

struct GeneratorModel {
    GeneratorSpec spec;
    DenseNet net;
    AdamState adam;
};

GeneratorModel make_generator(const GeneratorSpec& spec, double lr, std::uint64_t seed);

/// One forward pass worth of generator state, kept for the backward pass.
struct GenForward {
    Eigen::MatrixXd net_input;     // n x (noise_dim + conditioning_dim)
    Eigen::MatrixXd conditioning;  // n x conditioning_dim (0 cols when none)
    ForwardCache cache;
    Eigen::MatrixXd raw;      // activated network output
    Eigen::MatrixXd samples;  // n x sample_dim assembled joint-shaped batch
};

/// Draws noise, concatenates conditioning rows when the spec requires them,
/// and assembles joint-shaped samples. `conditioning` must have n rows when
/// conditioning_dim > 0 and is ignored otherwise.
GenForward generator_forward(const GeneratorModel& gen, int n, Rng& rng,
                             const Eigen::MatrixXd* conditioning = nullptr);

/// dL/d(raw network output) from dL/d(assembled samples), inverting the
/// sample assembly of generator_forward.
Eigen::MatrixXd generator_sample_grad_to_raw(const GeneratorSpec& spec, const GenForward& fwd,
                                             const Eigen::MatrixXd& sample_grad);

/// A trainable scalar-logit head over a fixed subset of the joint columns.
struct LogitHead {
    std::string name;             // metrics column: d_marg_1.., d_p, d_q, d_joint
    std::vector<int> input_dims;  // global columns this head consumes
    DenseNet net;
    AdamState adam;
    SpectralNormState sn;
};

LogitHead make_logit_head(std::string name, std::vector<int> input_dims,
                          const std::vector<int>& hidden, double lr, std::uint64_t seed);

/// Spectrally normalized copy of a head network plus the per-layer
/// normalization records needed for weight gradients. Advances the
/// power-iteration state only when advance is true (training-path forwards).
struct SnView {
    DenseNet net;  // weights replaced by W / sigma
    std::vector<NormalizedWeight> norms;
};
SnView sn_view(const DenseNet& net, SpectralNormState& sn, bool advance);

/// Normalized copy without touching the persistent power-iteration state
/// (evaluation-path forwards).
DenseNet frozen_norm_net(const LogitHead& head);
/// Frozen-spectral-norm logit of a single head at a point (columns already
/// projected to the head's input).
double head_logit(const LogitHead& head, const Eigen::VectorXd& input);

/// One discriminator-loss Adam step on a head: real rows vs fake rows, both
/// already projected to the head's input columns. Returns the loss.
double update_head(LogitHead& head, const Eigen::MatrixXd& real_rows,
                   const Eigen::MatrixXd& fake_rows);

/// All sub-discriminators of a model. For factorgan the heads follow the
/// layout: marginal heads in order, then per dependency pair a p head (when
/// the pair has one) and a q head. For gan_baseline there is exactly one
/// joint head. Checkpoint network order: generator, then heads in this order.
struct DiscriminatorSet {
    ModelKind kind = ModelKind::factorgan;
    HeadLayout layout;
    std::vector<LogitHead> marginal_heads;
    std::vector<LogitHead> p_heads;      // pairs with has_p, in pair order
    std::vector<LogitHead> q_heads;      // one per pair
    std::vector<LogitHead> joint_heads;  // gan_baseline: exactly one

    std::vector<const LogitHead*> ordered_heads() const;
    std::vector<LogitHead*> ordered_heads();
    std::vector<std::string> head_names() const;
};

DiscriminatorSet make_discriminators(ModelKind kind, const HeadLayout& layout,
                                     const std::vector<int>& hidden, double lr,
                                     std::uint64_t seed);

/// Evaluation-side view: per-head logit closures over frozen spectrally
/// normalized copies of the current weights (factorgan only).
LogitHeadSet model_head_set(const DiscriminatorSet& discs);
/// Combined logit for either kind (joint head logit for gan_baseline).
double model_combined_logit(const DiscriminatorSet& discs, const Eigen::VectorXd& x);

/// Per-head training batch builders, exposed so tests can assert the
/// data-routing rules directly:
///   marginal head:    real = stacked (paired projections + unpaired pool),
///                     fake = generated rows projected to the head's dims;
///   p head (pair):    real = paired scope projections,
///                     fake = paired rows decoupled across the pair's parts;
///   q head (pair):    real = generated scope projections,
///                     fake = the same generated rows part-shuffled;
///   joint head:       real = paired rows, fake = generated rows.
Eigen::MatrixXd stacked_marginal_pool(const DatasetSplit& data, const Partition& partition,
                                      const std::vector<int>& dims);
Eigen::MatrixXd build_p_fake_batch(const Eigen::MatrixXd& paired_pool,
                                   const DependencyPairSpec& pair, int n, Rng& rng);
Eigen::MatrixXd build_q_fake_batch(const Eigen::MatrixXd& generated,
                                   const DependencyPairSpec& pair, Rng& rng);

/// Conditioning-value source for generator forwards: rows of real part-0
/// values (conditional mode) or fresh mixtures (mask mode).
class ConditioningSource {
public:
    ConditioningSource() = default;
    /// Conditional mode: draws rows from the stacked part-0 marginal pool.
    static ConditioningSource from_pool(Eigen::MatrixXd pool);
    /// Mask mode: sums fresh source draws from the task into mixtures.
    static ConditioningSource from_mixture_task(AdditiveMixtureTask task);

    bool active() const { return active_; }
    Eigen::MatrixXd draw(int n, Rng& rng) const;

private:
    bool active_ = false;
    bool use_mixture_ = false;
    Eigen::MatrixXd pool_;
    AdditiveMixtureTask mixture_task_;
};

/// Anything the generator update can differentiate through: two-call
/// protocol, combined_logits first, then input_grad with dL/dlogit rows.
class GenCritic {
public:
    virtual ~GenCritic() = default;
    virtual Eigen::VectorXd combined_logits(const Eigen::MatrixXd& samples) = 0;
    virtual Eigen::MatrixXd input_grad(const Eigen::VectorXd& upstream) = 0;
};

/// GenCritic over a DiscriminatorSet with frozen spectral norms.
class DiscSetCritic : public GenCritic {
public:
    explicit DiscSetCritic(const DiscriminatorSet& discs);
    Eigen::VectorXd combined_logits(const Eigen::MatrixXd& samples) override;
    Eigen::MatrixXd input_grad(const Eigen::VectorXd& upstream) override;

private:
    struct HeadPass {
        const LogitHead* head;
        double sign;
        DenseNet normalized;
        ForwardCache cache;
    };
    std::vector<HeadPass> passes_;
    Eigen::Index sample_dim_ = 0;
    Eigen::Index batch_ = 0;
};

/// One non-saturating-loss Adam step on the generator against an arbitrary
/// critic. Returns the generator loss.
double generator_update_with(GeneratorModel& gen, GenCritic& critic, int batch_size, Rng& rng,
                             const ConditioningSource& conditioning);

using TaskVariant = std::variant<PairedCategoricalTask, GaussianTask, AdditiveMixtureTask>;

Partition task_partition(const TaskVariant& task);
Eigen::MatrixXd task_sample_joint(const TaskVariant& task, int n, Rng& rng);
Eigen::MatrixXd task_sample_marginal(const TaskVariant& task, int part, int n, Rng& rng);

struct DiscStepRecord {
    int gen_step = 0;                 // 1-based generator step this precedes
    std::vector<double> head_losses;  // ordered as DiscriminatorSet::head_names
};
struct GenStepRecord {
    int gen_step = 0;
    double loss = 0.0;
};

struct LoopOptions {
    int eval_interval = 100;  // metrics every k generator steps and at the end; 0 = end only
    int eval_sample_count = 2000;
    int checkpoint_interval = 0;  // 0: final checkpoint only (when dir set)
    std::string checkpoint_dir;   // empty: no checkpoints written
    bool record_wall_time = false;
};

struct TrainingRunArgs {
    TaskVariant task;
    TrainConfig cfg;
    DatasetSplitSpec split;
    LoopOptions opts;
    std::optional<HierarchySpec> hierarchy;
    std::optional<AutoregressiveSpec> autoregressive;
    std::optional<GeneratorOutput> generator_output;
};

struct TrainResult {
    GeneratorModel generator;
    DiscriminatorSet discriminators;
    std::vector<MetricsRecord> metrics;
    std::vector<DiscStepRecord> disc_steps;
    std::vector<GenStepRecord> gen_steps;
    std::vector<std::string> head_names;
    int frechet_part_count = 0;
};

HeadLayout layout_for(const TaskVariant& task, CombinationMode mode,
                      const std::optional<HierarchySpec>& hierarchy,
                      const std::optional<AutoregressiveSpec>& autoregressive);

/// Generator spec implied by task + mode. Gaussian-emission tasks default to
/// identity output, the additive-mixture task to the mask construction.
GeneratorSpec generator_spec_for(const TaskVariant& task, const TrainConfig& cfg,
                                 std::optional<GeneratorOutput> output_override = std::nullopt);

/// A full training run: builds the dataset split, networks, and update
/// schedule (disc_updates_per_gen_update discriminator steps before every
/// generator step), evaluating every eval_interval generator steps.
/// Deterministic: fixed args give bit-identical results.
class TrainSession {
public:
    explicit TrainSession(TrainingRunArgs args);

    /// One update of every active head; returns losses in head_names order.
    std::vector<double> disc_step();
    /// One generator update; returns the generator loss.
    double gen_step();
    /// Metrics snapshot at a given generator-step index.
    MetricsRecord evaluate(int step);

    using MetricsSink = std::function<void(const MetricsRecord&)>;
    TrainResult run(const MetricsSink& on_metrics = {});

    const DatasetSplit& data() const { return data_; }
    const DiscriminatorSet& discriminators() const { return discs_; }
    DiscriminatorSet& discriminators() { return discs_; }
    const GeneratorModel& generator() const { return gen_; }
    GeneratorModel& generator() { return gen_; }
    const HeadLayout& layout() const { return discs_.layout; }
    const TaskVariant& task() const { return task_; }
    const std::vector<Eigen::MatrixXd>& marginal_pools() const { return marginal_pools_; }
    std::vector<NetworkSnapshot> snapshot() const;
    /// Joint-shaped generator samples (used by evaluation and tests).
    Eigen::MatrixXd generate_samples(int n, Rng& rng);

    TrainSession(const TrainSession&) = delete;
    TrainSession& operator=(const TrainSession&) = delete;

private:
    TaskVariant task_;
    TrainConfig cfg_;
    DatasetSplitSpec split_spec_;
    LoopOptions opts_;
    Partition partition_;
    DatasetSplit data_;
    std::vector<Eigen::MatrixXd> marginal_pools_;  // stacked, per marginal head
    DiscriminatorSet discs_;
    GeneratorModel gen_;
    ConditioningSource conditioning_;
    Rng train_rng_;
    double last_gen_loss_ = 0.0;
    std::vector<double> last_disc_losses_;
    bool any_gen_step_ = false;
    std::chrono::steady_clock::time_point start_time_;
};

TrainResult training_loop(const TrainingRunArgs& args);

/// Trains a single spectrally normalized logit head to separate multivariate
/// normal positives from negatives, fresh batches every step. The optimum of
/// the discriminator loss is the log density ratio log(real/fake).
LogitHead train_ratio_estimator(const Eigen::VectorXd& real_mean, const Eigen::MatrixXd& real_cov,
                                const Eigen::VectorXd& fake_mean, const Eigen::MatrixXd& fake_cov,
                                int steps, int batch_size, double lr,
                                const std::vector<int>& hidden, std::uint64_t seed);

/// Sub-stream ids for Rng::derive_seed: one independent stream per concern.
inline constexpr std::uint64_t kStreamTrain = 0;
inline constexpr std::uint64_t kStreamData = 1;
inline constexpr std::uint64_t kStreamInit = 2;
inline constexpr std::uint64_t kStreamEval = 3;

}  // namespace fgan

#endif
