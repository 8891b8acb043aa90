#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "fgan/train.hpp"
#include "oracles.hpp"

using namespace fgan;
namespace fs = std::filesystem;

namespace {

GaussianTask gaussian2() {
    Partition p2 = Partition::make({{0}, {1}}, 2);
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.6, 0.6, 1.0;
    return GaussianTask(Eigen::VectorXd::Zero(2), cov, p2);
}

TrainingRunArgs small_args(int gen_steps, std::uint64_t seed = 11) {
    TrainingRunArgs args;
    args.task = gaussian2();
    args.cfg.lr = 1e-3;
    args.cfg.total_gen_steps = gen_steps;
    args.cfg.seed = seed;
    args.cfg.gen_hidden = {8};
    args.cfg.disc_hidden = {8};
    args.split = {40, 20};
    args.opts.eval_interval = 0;
    args.opts.eval_sample_count = 50;
    return args;
}

bool nets_equal(const DenseNet& a, const DenseNet& b) {
    if (a.weights.size() != b.weights.size()) return false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        if (a.weights[l] != b.weights[l] || a.biases[l] != b.biases[l]) return false;
    }
    return true;
}

bool row_in(const Eigen::MatrixXd& pool, const Eigen::RowVectorXd& row) {
    for (Eigen::Index r = 0; r < pool.rows(); ++r) {
        if (pool.row(r) == row) return true;
    }
    return false;
}

/// Combined logit w.x presented as one monolithic head.
class CollapsedLinearCritic : public GenCritic {
public:
    explicit CollapsedLinearCritic(Eigen::VectorXd w) : w_(std::move(w)) {}
    Eigen::VectorXd combined_logits(const Eigen::MatrixXd& s) override { return s * w_; }
    Eigen::MatrixXd input_grad(const Eigen::VectorXd& up) override {
        return up * w_.transpose();
    }

private:
    Eigen::VectorXd w_;
};

/// The same function split into marginal heads m_i.x_i, a p head p.x and a
/// q head q.x, combined as p - q + sum(m_i) with per-head input gradients.
class FactoredLinearCritic : public GenCritic {
public:
    FactoredLinearCritic(Eigen::VectorXd m, Eigen::VectorXd p, Eigen::VectorXd q)
        : m_(std::move(m)), p_(std::move(p)), q_(std::move(q)) {}
    Eigen::VectorXd combined_logits(const Eigen::MatrixXd& s) override {
        Eigen::VectorXd logits = s * p_;
        logits -= s * q_;
        for (Eigen::Index i = 0; i < m_.size(); ++i) logits += m_(i) * s.col(i);
        return logits;
    }
    Eigen::MatrixXd input_grad(const Eigen::VectorXd& up) override {
        Eigen::MatrixXd g = up * p_.transpose();
        g -= up * q_.transpose();
        for (Eigen::Index i = 0; i < m_.size(); ++i) g.col(i) += m_(i) * up;
        return g;
    }

private:
    Eigen::VectorXd m_, p_, q_;
};

}  // namespace

TEST_CASE("run schedule: two discriminator records per generator record") {
    TrainSession session(small_args(10));
    CHECK(session.discriminators().head_names() ==
          std::vector<std::string>{"d_marg_1", "d_marg_2", "d_p", "d_q"});
    TrainResult res = session.run();
    CHECK(res.disc_steps.size() == 20);
    CHECK(res.gen_steps.size() == 10);
    for (std::size_t i = 0; i < res.disc_steps.size(); ++i) {
        CHECK(res.disc_steps[i].gen_step == static_cast<int>(i / 2) + 1);
        CHECK(res.disc_steps[i].head_losses.size() == 4);
    }
    for (const LogitHead* head : res.discriminators.ordered_heads())
        CHECK(head->adam.step_count == 20);
    CHECK(res.generator.adam.step_count == 10);
    CHECK(res.frechet_part_count == 2);
}

TEST_CASE("zero generator steps: initialized model, no records, no metrics") {
    TrainSession session(small_args(0));
    TrainResult res = session.run();
    CHECK(res.disc_steps.empty());
    CHECK(res.gen_steps.empty());
    CHECK(res.metrics.empty());
    CHECK(res.generator.adam.step_count == 0);
    CHECK(res.head_names.size() == 4);
}

TEST_CASE("fixed seed: two runs are bit-identical") {
    TrainingRunArgs args = small_args(100, 29);
    args.opts.eval_interval = 50;
    TrainSession a(args);
    TrainSession b(args);
    TrainResult ra = a.run();
    TrainResult rb = b.run();

    REQUIRE(ra.gen_steps.size() == rb.gen_steps.size());
    for (std::size_t i = 0; i < ra.gen_steps.size(); ++i)
        CHECK(ra.gen_steps[i].loss == rb.gen_steps[i].loss);
    REQUIRE(ra.disc_steps.size() == rb.disc_steps.size());
    for (std::size_t i = 0; i < ra.disc_steps.size(); ++i)
        CHECK(ra.disc_steps[i].head_losses == rb.disc_steps[i].head_losses);

    CHECK(nets_equal(ra.generator.net, rb.generator.net));
    auto heads_a = ra.discriminators.ordered_heads();
    auto heads_b = rb.discriminators.ordered_heads();
    REQUIRE(heads_a.size() == heads_b.size());
    for (std::size_t i = 0; i < heads_a.size(); ++i)
        CHECK(nets_equal(heads_a[i]->net, heads_b[i]->net));

    REQUIRE(ra.metrics.size() == rb.metrics.size());
    for (std::size_t i = 0; i < ra.metrics.size(); ++i) {
        CHECK(ra.metrics[i].gen_loss == rb.metrics[i].gen_loss);
        CHECK(ra.metrics[i].frechet_per_part == rb.metrics[i].frechet_per_part);
    }
}

TEST_CASE("zeroed final discriminator layers pass no gradient to the generator") {
    TrainSession session(small_args(1));
    for (LogitHead* head : session.discriminators().ordered_heads()) {
        head->net.weights.back().setZero();
        head->net.biases.back().setZero();
    }
    DenseNet before = session.generator().net;
    double loss = session.gen_step();
    CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(nets_equal(session.generator().net, before));
    CHECK(session.generator().adam.step_count == 1);
}

TEST_CASE("factored critic and its collapsed form produce the same generator update") {
    Eigen::VectorXd m(2), p(2), q(2);
    m << 0.4, -0.3;
    p << 0.7, 0.2;
    q << 0.1, -0.5;
    FactoredLinearCritic factored(m, p, q);
    CollapsedLinearCritic collapsed(p - q + m);

    Eigen::MatrixXd probe(3, 2);
    probe << 1.0, -2.0, 0.5, 0.25, -1.5, 3.0;
    Eigen::VectorXd lf = factored.combined_logits(probe);
    Eigen::VectorXd lc = collapsed.combined_logits(probe);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(lf(i) - lc(i)) <= 1e-12);
        // Both forms also agree with the ratio-product form of the logit sum.
        double ratio = testoracle::h_of_sigmoid(probe.row(i).dot(p)) /
                       testoracle::h_of_sigmoid(probe.row(i).dot(q)) *
                       testoracle::h_of_sigmoid(m(0) * probe(i, 0)) *
                       testoracle::h_of_sigmoid(m(1) * probe(i, 1));
        CHECK(std::abs(sigmoid(lf(i)) - ratio / (1.0 + ratio)) <= 1e-12);
    }

    GeneratorSpec spec;
    spec.noise_dim = 4;
    spec.raw_output_dim = 2;
    spec.hidden = {8};
    spec.output = GeneratorOutput::identity;
    spec.output_dims = {0, 1};
    spec.sample_dim = 2;
    GeneratorModel gen_a = make_generator(spec, 1e-3, 33);
    GeneratorModel gen_b = make_generator(spec, 1e-3, 33);
    REQUIRE(nets_equal(gen_a.net, gen_b.net));

    Rng rng_a(91), rng_b(91);
    ConditioningSource none;
    double loss_a = generator_update_with(gen_a, factored, 25, rng_a, none);
    double loss_b = generator_update_with(gen_b, collapsed, 25, rng_b, none);
    CHECK(std::abs(loss_a - loss_b) <= 1e-12);
    for (std::size_t l = 0; l < gen_a.net.weights.size(); ++l) {
        CHECK((gen_a.net.weights[l] - gen_b.net.weights[l]).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((gen_a.net.biases[l] - gen_b.net.biases[l]).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("dependency metric improves over the untrained model on the uncoupled task") {
    PairedCategoricalTask task;
    task.coupling = 0.1;  // 1/C: parts are exactly independent
    TrainingRunArgs args;
    args.task = task;
    args.cfg.lr = 1e-3;
    args.cfg.total_gen_steps = 2000;
    args.cfg.seed = 1;
    args.cfg.gen_hidden = {32, 32};
    args.cfg.disc_hidden = {32, 32};
    args.split = {2000, 2000};
    args.opts.eval_interval = 0;
    args.opts.eval_sample_count = 4000;

    TrainSession session(args);
    MetricsRecord untrained = session.evaluate(0);
    CHECK_FALSE(untrained.gen_loss.has_value());
    REQUIRE(untrained.d_dep.has_value());
    CHECK_FALSE(untrained.d_dep_degenerate);

    TrainResult res = session.run();
    REQUIRE(res.metrics.size() == 1);
    const MetricsRecord& final_row = res.metrics.back();
    REQUIRE(final_row.d_dep.has_value());
    CHECK(*final_row.d_dep < *untrained.d_dep);
    CHECK(final_row.gen_loss.has_value());
    CHECK_FALSE(final_row.ratio_mae.has_value());
    CHECK_FALSE(final_row.wall_time.has_value());
}

TEST_CASE("stacked_marginal_pool: paired projections stacked above the unpaired pool") {
    DatasetSplit data;
    data.paired_pool.resize(2, 4);
    data.paired_pool << 1, 2, 3, 4, 5, 6, 7, 8;
    data.unpaired_pools.resize(2);
    data.unpaired_pools[0].resize(1, 2);
    data.unpaired_pools[0] << 9, 10;
    data.unpaired_pools[1].resize(2, 2);
    data.unpaired_pools[1] << 11, 12, 13, 14;
    Partition partition = Partition::make({{0, 1}, {2, 3}}, 4);

    Eigen::MatrixXd part0 = stacked_marginal_pool(data, partition, {0, 1});
    Eigen::MatrixXd expected0(3, 2);
    expected0 << 1, 2, 5, 6, 9, 10;
    CHECK(part0 == expected0);

    Eigen::MatrixXd part1 = stacked_marginal_pool(data, partition, {2, 3});
    Eigen::MatrixXd expected1(4, 2);
    expected1 << 3, 4, 7, 8, 11, 12, 13, 14;
    CHECK(part1 == expected1);

    // A sub-part addresses the matching columns of the unpaired pool.
    Eigen::MatrixXd sub = stacked_marginal_pool(data, partition, {1});
    Eigen::MatrixXd expected_sub(3, 1);
    expected_sub << 2, 6, 10;
    CHECK(sub == expected_sub);

    CHECK_THROWS_AS(stacked_marginal_pool(data, partition, {}), std::invalid_argument);
    CHECK_THROWS_AS(stacked_marginal_pool(data, partition, {4}), std::invalid_argument);
    CHECK_THROWS_AS(stacked_marginal_pool(data, partition, {1, 2}), std::invalid_argument);
}

TEST_CASE("build_p_fake_batch recombines only paired rows") {
    Rng rng(35);
    Eigen::MatrixXd pool(4, 4);
    pool << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16;
    DependencyPairSpec pair{{0, 1, 2, 3}, {{0, 1}, {2, 3}}, true};
    Eigen::MatrixXd fake = build_p_fake_batch(pool, pair, 50, rng);
    REQUIRE(fake.cols() == 4);
    bool saw_recombination = false;
    for (int r = 0; r < 50; ++r) {
        CHECK(row_in(pool.leftCols(2), fake.row(r).head(2)));
        CHECK(row_in(pool.rightCols(2), fake.row(r).tail(2)));
        if (!row_in(pool, fake.row(r))) saw_recombination = true;
    }
    CHECK(saw_recombination);
    CHECK_THROWS_AS(build_p_fake_batch(pool.topRows(1), pair, 5, rng), std::invalid_argument);
}

TEST_CASE("build_q_fake_batch keeps part 0 and preserves part multisets") {
    Rng rng(36);
    Eigen::MatrixXd generated(30, 4);
    for (int r = 0; r < 30; ++r)
        for (int c = 0; c < 4; ++c) generated(r, c) = rng.normal();
    DependencyPairSpec pair{{0, 1, 2, 3}, {{0, 1}, {2, 3}}, true};
    Eigen::MatrixXd fake = build_q_fake_batch(generated, pair, rng);
    CHECK(fake.col(0) == generated.col(0));
    CHECK(fake.col(1) == generated.col(1));
    std::vector<std::pair<double, double>> before, after;
    for (int r = 0; r < 30; ++r) {
        before.emplace_back(generated(r, 2), generated(r, 3));
        after.emplace_back(fake(r, 2), fake(r, 3));
    }
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    CHECK(before == after);
}

TEST_CASE("dependency heads refuse to train without enough paired data") {
    TrainingRunArgs args = small_args(1);
    args.split = {40, 0};
    TrainSession no_paired(args);
    CHECK_THROWS_AS(no_paired.disc_step(), std::runtime_error);

    args.split = {40, 1};
    TrainSession one_paired(args);
    CHECK_THROWS_AS(one_paired.disc_step(), std::runtime_error);

    args.split = {40, 0};
    args.cfg.model_kind = ModelKind::gan_baseline;
    TrainSession baseline(args);
    CHECK_THROWS_AS(baseline.disc_step(), std::runtime_error);
}

TEST_CASE("gan_baseline trains exactly one joint head") {
    TrainingRunArgs args = small_args(2);
    args.cfg.model_kind = ModelKind::gan_baseline;
    TrainSession session(args);
    CHECK(session.discriminators().head_names() == std::vector<std::string>{"d_joint"});
    CHECK(session.discriminators().joint_heads.size() == 1);
    CHECK(session.discriminators().marginal_heads.empty());
    CHECK(session.discriminators().p_heads.empty());
    CHECK(session.discriminators().q_heads.empty());
    CHECK(session.discriminators().joint_heads[0].input_dims == std::vector<int>{0, 1});

    std::vector<double> losses = session.disc_step();
    CHECK(losses.size() == 1);
    CHECK(std::isfinite(losses[0]));
    CHECK(std::isfinite(model_combined_logit(session.discriminators(),
                                             Eigen::Vector2d(0.3, -0.2))));
    CHECK_THROWS_AS(model_head_set(session.discriminators()), std::logic_error);
}

TEST_CASE("independent-marginals mode constructs no p head and needs no paired data") {
    TrainingRunArgs args = small_args(2);
    args.cfg.combination_mode = CombinationMode::independent_marginals;
    args.split = {40, 0};
    TrainSession session(args);
    CHECK(session.discriminators().head_names() ==
          std::vector<std::string>{"d_marg_1", "d_marg_2", "d_q"});
    CHECK(session.discriminators().p_heads.empty());
    std::vector<double> losses;
    CHECK_NOTHROW(losses = session.disc_step());
    CHECK(losses.size() == 3);
}

TEST_CASE("zeroed heads sit exactly at the untrained loss") {
    TrainSession session(small_args(1));
    for (LogitHead* head : session.discriminators().ordered_heads()) {
        for (auto& w : head->net.weights) w.setZero();
        for (auto& b : head->net.biases) b.setZero();
    }
    const double untrained = 2.0 * std::log(2.0);
    std::vector<double> first = session.disc_step();
    for (double loss : first) CHECK(loss == doctest::Approx(untrained).epsilon(1e-12));
    std::vector<double> second = session.disc_step();
    for (double loss : second) CHECK(loss <= untrained + 1e-6);
}

TEST_CASE("evaluation and checkpoint schedules") {
    fs::path dir = fs::temp_directory_path() / "fgan_test_train_ckpt";
    fs::remove_all(dir);

    TrainingRunArgs args = small_args(250, 17);
    args.opts.eval_interval = 100;
    args.opts.checkpoint_interval = 100;
    args.opts.checkpoint_dir = (dir / "a").string();
    TrainSession session(args);
    TrainResult res = session.run();

    REQUIRE(res.metrics.size() == 3);
    CHECK(res.metrics[0].step == 100);
    CHECK(res.metrics[1].step == 200);
    CHECK(res.metrics[2].step == 250);
    for (const MetricsRecord& row : res.metrics) {
        CHECK(row.gen_loss.has_value());
        CHECK(row.head_losses.size() == 4);
        REQUIRE(row.frechet_per_part.size() == 2);
        CHECK(row.frechet_per_part[0].has_value());
        CHECK_FALSE(row.d_dep.has_value());  // not a paired-categorical task
        CHECK_FALSE(row.d_dep_degenerate);
        CHECK_FALSE(row.ratio_mae.has_value());
        CHECK_FALSE(row.wall_time.has_value());
    }
    CHECK(fs::exists(dir / "a" / "step_000100.fgan"));
    CHECK(fs::exists(dir / "a" / "step_000200.fgan"));
    CHECK_FALSE(fs::exists(dir / "a" / "step_000250.fgan"));  // final step is final.fgan
    CHECK(fs::exists(dir / "a" / "final.fgan"));

    TrainingRunArgs end_only = small_args(250, 17);
    end_only.opts.eval_interval = 0;
    TrainResult res2 = TrainSession(end_only).run();
    REQUIRE(res2.metrics.size() == 1);
    CHECK(res2.metrics[0].step == 250);

    TrainingRunArgs timed = small_args(2, 17);
    timed.opts.record_wall_time = true;
    TrainResult res3 = TrainSession(timed).run();
    REQUIRE(res3.metrics.size() == 1);
    CHECK(res3.metrics[0].wall_time.has_value());

    fs::remove_all(dir);
}

TEST_CASE("conditional mode conditions the generator on real part-0 values") {
    TrainingRunArgs args = small_args(2, 19);
    args.cfg.combination_mode = CombinationMode::conditional;
    TrainSession session(args);
    CHECK(session.discriminators().head_names() ==
          std::vector<std::string>{"d_marg_1", "d_p", "d_q"});
    CHECK(session.generator().spec.conditioning_dim == 1);
    CHECK(session.generator().spec.output_dims == std::vector<int>{1});
    CHECK(session.generator().spec.conditioning_sample_dims == std::vector<int>{0});

    // Every generated part-0 value must be a real part-0 observation.
    Eigen::MatrixXd pool = stacked_marginal_pool(
        session.data(), task_partition(session.task()), {0});
    Rng rng(77);
    Eigen::MatrixXd samples = session.generate_samples(40, rng);
    for (int r = 0; r < 40; ++r) CHECK(row_in(pool, samples.row(r).head(1)));
}

TEST_CASE("mask generator reconstructs the mixture bitwise") {
    AdditiveMixtureTask task;
    GaussianMixture1 src_a, src_v;
    Eigen::VectorXd m1(1), m2(1), m0(1);
    m1 << -2.0;
    m2 << 2.0;
    m0 << 0.0;
    src_a.components = {{0.5, m1, 0.5}, {0.5, m2, 0.5}};
    src_v.components = {{1.0, m0, 1.0}};
    task.source_a = src_a;
    task.source_v = src_v;

    TrainingRunArgs args;
    args.task = task;
    args.cfg.lr = 1e-3;
    args.cfg.total_gen_steps = 1;
    args.cfg.seed = 23;
    args.cfg.gen_hidden = {8};
    args.cfg.disc_hidden = {8};
    args.split = {40, 20};
    args.opts.eval_sample_count = 50;

    TrainSession session(args);
    CHECK(session.generator().spec.output == GeneratorOutput::mixture_mask);

    Rng rng(61);
    Eigen::MatrixXd mixtures = AdditiveMixtureTask::mixture_of(task.sample_joint(200, rng));
    GenForward fwd = generator_forward(session.generator(), 200, rng, &mixtures);
    for (int r = 0; r < 200; ++r) {
        double a = fwd.samples(r, 0);
        double v = fwd.samples(r, 1);
        CHECK(a + v == mixtures(r, 0));
    }

    args.cfg.combination_mode = CombinationMode::conditional;
    CHECK_THROWS_AS(TrainSession{args}, std::invalid_argument);
}

TEST_CASE("invalid configurations are rejected at construction") {
    TrainingRunArgs args = small_args(1);
    args.cfg.batch_size = 0;
    CHECK_THROWS_AS(TrainSession{args}, std::invalid_argument);

    args = small_args(1);
    args.cfg.lr = 0.0;
    CHECK_THROWS_AS(TrainSession{args}, std::invalid_argument);

    args = small_args(1);
    args.cfg.total_gen_steps = -1;
    CHECK_THROWS_AS(TrainSession{args}, std::invalid_argument);

    args = small_args(1);
    args.opts.eval_sample_count = 1;
    CHECK_THROWS_AS(TrainSession{args}, std::invalid_argument);

    // Without explicit structure, hierarchical falls back to one sub-part per
    // part and autoregressive to the partition order; both match the joint
    // layout's head set for a two-part task.
    args = small_args(1);
    args.cfg.combination_mode = CombinationMode::hierarchical;
    CHECK(TrainSession{args}.discriminators().head_names() ==
          std::vector<std::string>{"d_marg_1", "d_marg_2", "d_p", "d_q"});

    args = small_args(1);
    args.cfg.combination_mode = CombinationMode::autoregressive;
    CHECK(TrainSession{args}.discriminators().head_names() ==
          std::vector<std::string>{"d_marg_1", "d_marg_2", "d_p", "d_q"});

    args = small_args(1);
    args.generator_output = GeneratorOutput::mixture_mask;  // not an additive-mixture task
    CHECK_THROWS_AS(TrainSession{args}, std::invalid_argument);
}

TEST_CASE("train_ratio_estimator produces a separating scalar head") {
    Eigen::VectorXd real_mean(1), fake_mean(1);
    real_mean << 1.0;
    fake_mean << 0.0;
    Eigen::MatrixXd unit = Eigen::MatrixXd::Identity(1, 1);
    LogitHead head = train_ratio_estimator(real_mean, unit, fake_mean, unit,
                                           /*steps=*/300, /*batch_size=*/25, /*lr=*/1e-3,
                                           {16}, /*seed=*/5);
    CHECK(head.name == "d_ratio");
    CHECK(head.input_dims == std::vector<int>{0});
    CHECK(head.adam.step_count == 300);
    Eigen::VectorXd hi(1), lo(1);
    hi << 2.0;
    lo << -1.0;
    CHECK(std::isfinite(head_logit(head, hi)));
    CHECK(head_logit(head, hi) > head_logit(head, lo));

    CHECK_THROWS_AS(train_ratio_estimator(real_mean, unit, Eigen::VectorXd::Zero(2),
                                          Eigen::MatrixXd::Identity(2, 2), 1, 4, 1e-3, {4}, 1),
                    std::invalid_argument);
    Eigen::MatrixXd bad = -unit;
    CHECK_THROWS_AS(train_ratio_estimator(real_mean, bad, fake_mean, unit, 1, 4, 1e-3, {4}, 1),
                    std::invalid_argument);
}
