#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fgan/factorization.hpp"
#include "fgan/rng.hpp"
#include "fgan/tasks.hpp"
#include "oracles.hpp"

using namespace fgan;

namespace {

Eigen::VectorXd uniform_point(int dim, Rng& rng, double radius = 2.5) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x(i) = rng.uniform(-radius, radius);
    return x;
}

/// Probability-space form of the combined discriminator: pushes every head
/// logit through sigmoid, maps to density ratios with h, multiplies, and maps
/// back. Used as the independent counterpart of combine_logits.
double product_form(const HeadLayout& layout, const HeadValues& values) {
    double ratio = 1.0;
    std::size_t pi = 0;
    for (std::size_t j = 0; j < layout.pairs.size(); ++j) {
        if (layout.pairs[j].has_p) ratio *= testoracle::h_of_sigmoid(values.p[pi++]);
        ratio /= testoracle::h_of_sigmoid(values.q[j]);
    }
    for (double d : values.marginals) ratio *= testoracle::h_of_sigmoid(d);
    return ratio / (1.0 + ratio);
}

GaussianTask correlated3(const Partition& partition) {
    Eigen::VectorXd mean(3);
    mean << 0.2, -0.1, 0.3;
    Eigen::MatrixXd cov(3, 3);
    cov << 1.0, 0.3, 0.1, 0.3, 1.2, -0.2, 0.1, -0.2, 0.8;
    return GaussianTask(mean, cov, partition);
}

GaussianTask diagonal3(const Partition& partition, double m0 = 0.0, double v0 = 1.1) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    mean(0) = m0;
    Eigen::VectorXd var(3);
    var << v0, 0.9, 1.3;
    return GaussianTask(mean, var.asDiagonal(), partition);
}

}  // namespace

TEST_CASE("split and join are inverse column gathers") {
    Partition contiguous = Partition::make({{0, 1}, {2, 3}}, 4);
    Eigen::VectorXd x(4);
    x << 1, 2, 3, 4;
    auto parts = split(x, contiguous);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0](0) == 1);
    CHECK(parts[0](1) == 2);
    CHECK(parts[1](0) == 3);
    CHECK(parts[1](1) == 4);

    Partition interleaved = Partition::make({{0, 2}, {1, 3}}, 4);
    auto inter = split(x, interleaved);
    CHECK(inter[0](0) == 1);
    CHECK(inter[0](1) == 3);
    CHECK(inter[1](0) == 2);
    CHECK(inter[1](1) == 4);

    CHECK(join(split(x, interleaved), interleaved) == x);
    CHECK(join(split(x, contiguous), contiguous) == x);

    Eigen::VectorXd wrong(3);
    wrong.setZero();
    CHECK_THROWS_AS(split(wrong, contiguous), std::invalid_argument);
    CHECK_THROWS_AS(join({x.head(2), x.head(1)}, contiguous), std::invalid_argument);
}

TEST_CASE("Partition::make validates the cover") {
    CHECK_THROWS_AS(Partition::make({{0, 1, 2}}, 3), std::invalid_argument);      // K < 2
    CHECK_THROWS_AS(Partition::make({{0, 1}, {1, 2}}, 3), std::invalid_argument); // overlap
    CHECK_THROWS_AS(Partition::make({{0}, {2}}, 3), std::invalid_argument);       // gap
    CHECK_THROWS_AS(Partition::make({{0, 1}, {}}, 2), std::invalid_argument);     // empty part
    CHECK_THROWS_AS(Partition::make({{0, 1}, {2, 3}}, 5), std::invalid_argument); // short cover
    CHECK_THROWS_AS(Partition::make({{0, 1}, {2, 4}}, 4), std::invalid_argument); // out of range
    Partition ok = Partition::make({{0, 2}, {1}}, 3);
    CHECK(ok.part_count() == 2);
    CHECK(ok.part_dim(0) == 2);
    CHECK(ok.part_dim(1) == 1);
}

TEST_CASE("validate_cover flags overlaps and incomplete covers") {
    CHECK_NOTHROW(validate_cover({{0}, {1}}, {0, 1}, "t"));
    CHECK_THROWS_AS(validate_cover({{0}, {0}}, {0, 1}, "t"), std::invalid_argument);
    CHECK_THROWS_AS(validate_cover({{0}}, {0, 1}, "t"), std::invalid_argument);
    CHECK_THROWS_AS(validate_cover({{0}, {}}, {0}, "t"), std::invalid_argument);
}

TEST_CASE("project_columns and scatter_add_columns address listed columns in order") {
    Eigen::MatrixXd batch(2, 4);
    batch << 1, 2, 3, 4, 5, 6, 7, 8;
    Eigen::MatrixXd proj = project_columns(batch, {2, 0});
    CHECK(proj(0, 0) == 3);
    CHECK(proj(0, 1) == 1);
    CHECK(proj(1, 0) == 7);
    CHECK(proj(1, 1) == 5);

    Eigen::MatrixXd into = Eigen::MatrixXd::Zero(2, 4);
    scatter_add_columns(into, proj, {2, 0});
    CHECK(into(0, 2) == 3);
    CHECK(into(0, 0) == 1);
    CHECK(into(0, 1) == 0);
    Eigen::MatrixXd bad(2, 3);
    bad.setZero();
    CHECK_THROWS_AS(scatter_add_columns(into, bad, {2, 0}), std::invalid_argument);
}

TEST_CASE("h_map and h_inv: examples, domains, and bijection") {
    CHECK(h_map(0.5) == 1.0);
    CHECK(h_map(2.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(h_map(0.0) == 0.0);
    CHECK(h_inv(0.0) == 0.0);
    CHECK(h_inv(1.0) == 0.5);
    CHECK_THROWS_AS(h_map(1.0), std::domain_error);
    CHECK_THROWS_AS(h_map(-0.1), std::domain_error);
    CHECK_THROWS_AS(h_inv(-0.5), std::domain_error);
    for (int i = 0; i <= 500; ++i) {
        double a = (1.0 - 1e-9) * static_cast<double>(i) / 500.0;
        CHECK(std::abs(h_inv(h_map(a)) - a) <= 1e-12);
    }
}

TEST_CASE("combine_logits: examples and value-count validation") {
    Partition partition = Partition::make({{0}, {1}}, 2);
    HeadLayout layout = make_joint_layout(partition);

    HeadValues zeros{{0.0, 0.0}, {0.0}, {0.0}};
    CHECK(combine_logits(layout, zeros) == 0.0);
    CHECK(sigmoid(0.0) == 0.5);

    HeadValues mixed{{0.5, -0.5}, {2.0}, {1.0}};
    double logit = combine_logits(layout, mixed);
    CHECK(logit == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sigmoid(logit) == doctest::Approx(0.7310585786300049).epsilon(1e-12));

    CHECK_THROWS_AS(combine_logits(layout, HeadValues{{0.0}, {0.0}, {0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(combine_logits(layout, HeadValues{{0.0, 0.0}, {}, {0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(combine_logits(layout, HeadValues{{0.0, 0.0}, {0.0}, {0.0, 0.0}}),
                    std::invalid_argument);

    HeadLayout indep = make_independent_layout(partition);
    CHECK_NOTHROW(combine_logits(indep, HeadValues{{0.1, 0.2}, {}, {0.3}}));
    CHECK_THROWS_AS(combine_logits(indep, HeadValues{{0.1, 0.2}, {0.0}, {0.3}}),
                    std::invalid_argument);
}

TEST_CASE("logit-sum and probability-product forms agree for arbitrary head values") {
    Rng rng(7);
    Partition p3 = Partition::make({{0}, {1}, {2}}, 3);
    HeadLayout joint = make_joint_layout(p3);
    Partition p4 = Partition::make({{0, 1}, {2, 3}}, 4);
    HierarchySpec hier{{{{0}, {1}}, {{2}, {3}}}};
    HeadLayout hierarchical = make_hierarchical_layout(p4, hier);

    for (const HeadLayout& layout : {joint, hierarchical}) {
        for (int rep = 0; rep < 100; ++rep) {
            HeadValues v;
            for (std::size_t i = 0; i < layout.marginals.size(); ++i)
                v.marginals.push_back(rng.uniform(-6.0, 6.0));
            for (int i = 0; i < layout.p_head_count(); ++i) v.p.push_back(rng.uniform(-6.0, 6.0));
            for (std::size_t i = 0; i < layout.pairs.size(); ++i)
                v.q.push_back(rng.uniform(-6.0, 6.0));
            double lhs = sigmoid(combine_logits(layout, v));
            double rhs = product_form(layout, v);
            CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
    }
}

TEST_CASE("joint layout: one marginal per part plus a full dependency pair") {
    Partition partition = Partition::make({{0, 1}, {2}, {3, 4}}, 5);
    HeadLayout layout = make_joint_layout(partition);
    REQUIRE(layout.marginals.size() == 3);
    CHECK(layout.marginals[0].dims == std::vector<int>{0, 1});
    CHECK(layout.marginals[1].dims == std::vector<int>{2});
    CHECK(layout.marginals[2].dims == std::vector<int>{3, 4});
    REQUIRE(layout.pairs.size() == 1);
    CHECK(layout.pairs[0].scope == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(layout.pairs[0].decouple_parts == partition.parts);
    CHECK(layout.pairs[0].has_p);
    CHECK(layout.p_head_count() == 1);
}

TEST_CASE("conditional layout: no marginal head for the conditioning part") {
    Partition partition = Partition::make({{0, 1}, {2}, {3, 4}}, 5);
    HeadLayout layout = make_conditional_layout(partition);
    REQUIRE(layout.marginals.size() == 2);
    CHECK(layout.marginals[0].dims == std::vector<int>{2});
    CHECK(layout.marginals[1].dims == std::vector<int>{3, 4});
    REQUIRE(layout.pairs.size() == 1);
    CHECK(layout.pairs[0].has_p);
}

TEST_CASE("independent-marginals layout: dependency pair has no p head") {
    Partition partition = Partition::make({{0}, {1}}, 2);
    HeadLayout layout = make_independent_layout(partition);
    CHECK(layout.marginals.size() == 2);
    REQUIRE(layout.pairs.size() == 1);
    CHECK_FALSE(layout.pairs[0].has_p);
    CHECK(layout.p_head_count() == 0);
}

TEST_CASE("hierarchical layout: group pairs only for parts with several sub-parts") {
    Partition partition = Partition::make({{0, 1}, {2}, {3, 4}}, 5);
    HierarchySpec hier{{{{0}, {1}}, {{2}}, {{3, 4}}}};
    HeadLayout layout = make_hierarchical_layout(partition, hier);
    REQUIRE(layout.pairs.size() == 2);
    CHECK(layout.pairs[0].scope == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(layout.pairs[0].decouple_parts == partition.parts);
    CHECK(layout.pairs[1].scope == std::vector<int>{0, 1});
    CHECK(layout.pairs[1].decouple_parts == std::vector<std::vector<int>>{{0}, {1}});
    REQUIRE(layout.marginals.size() == 4);
    CHECK(layout.marginals[0].dims == std::vector<int>{0});
    CHECK(layout.marginals[1].dims == std::vector<int>{1});
    CHECK(layout.marginals[2].dims == std::vector<int>{2});
    CHECK(layout.marginals[3].dims == std::vector<int>{3, 4});

    CHECK_THROWS_AS(make_hierarchical_layout(partition, HierarchySpec{{{{0}, {1}}, {{2}}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        make_hierarchical_layout(partition, HierarchySpec{{{}, {{2}}, {{3, 4}}}}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        make_hierarchical_layout(partition, HierarchySpec{{{{0}}, {{2}}, {{3, 4}}}}),
        std::invalid_argument);
}

TEST_CASE("autoregressive layout: dependency scope grows with the prefix") {
    AutoregressiveSpec spec{{{0, 1}, {2}, {3}}, 4};
    HeadLayout layout = make_autoregressive_layout(spec);
    REQUIRE(layout.marginals.size() == 3);
    CHECK(layout.marginals[0].dims == std::vector<int>{0, 1});
    CHECK(layout.marginals[1].dims == std::vector<int>{2});
    CHECK(layout.marginals[2].dims == std::vector<int>{3});
    REQUIRE(layout.pairs.size() == 2);
    CHECK(layout.pairs[0].scope == std::vector<int>{0, 1, 2});
    CHECK(layout.pairs[0].decouple_parts == std::vector<std::vector<int>>{{0, 1}, {2}});
    CHECK(layout.pairs[1].scope == std::vector<int>{0, 1, 2, 3});
    CHECK(layout.pairs[1].decouple_parts == std::vector<std::vector<int>>{{0, 1, 2}, {3}});

    CHECK_THROWS_AS(make_autoregressive_layout(AutoregressiveSpec{{{0, 1}}, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_autoregressive_layout(AutoregressiveSpec{{{0}, {1}}, 3}),
                    std::invalid_argument);
}

TEST_CASE("every mode's oracle head set reproduces the same joint log ratio") {
    Rng rng(31);
    Partition p3 = Partition::make({{0}, {1}, {2}}, 3);

    SUBCASE("independent-marginals mode equals joint mode when p factorizes") {
        Eigen::VectorXd mean(3);
        mean << 0.2, -0.1, 0.3;
        Eigen::VectorXd var(3);
        var << 1.0, 1.2, 0.8;
        GaussianTask p_task(mean, var.asDiagonal(), p3);
        GaussianTask q_task = diagonal3(p3);
        LogitHeadSet joint = make_oracle_heads(p_task, q_task, make_joint_layout(p3));
        LogitHeadSet indep = make_oracle_heads(p_task, q_task, make_independent_layout(p3));
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::VectorXd x = uniform_point(3, rng);
            CHECK(std::abs(joint.combined_logit(x) - indep.combined_logit(x)) <= 1e-12);
        }
    }

    SUBCASE("conditional mode equals joint mode when part 0 marginals coincide") {
        GaussianTask p_task = correlated3(p3);
        GaussianTask q_task = diagonal3(p3, /*m0=*/0.2, /*v0=*/1.0);  // shares part-0 marginal
        LogitHeadSet joint = make_oracle_heads(p_task, q_task, make_joint_layout(p3));
        LogitHeadSet cond = make_oracle_heads(p_task, q_task, make_conditional_layout(p3));
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::VectorXd x = uniform_point(3, rng);
            CHECK(std::abs(joint.combined_logit(x) - cond.combined_logit(x)) <= 1e-12);
        }
    }

    SUBCASE("hierarchical mode with trivial sub-partitions equals joint mode") {
        GaussianTask p_task = correlated3(p3);
        GaussianTask q_task = diagonal3(p3);
        HierarchySpec trivial{{{{0}}, {{1}}, {{2}}}};
        LogitHeadSet joint = make_oracle_heads(p_task, q_task, make_joint_layout(p3));
        LogitHeadSet hier =
            make_oracle_heads(p_task, q_task, make_hierarchical_layout(p3, trivial));
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::VectorXd x = uniform_point(3, rng);
            CHECK(std::abs(joint.combined_logit(x) - hier.combined_logit(x)) <= 1e-12);
        }
    }

    SUBCASE("autoregressive mode with two steps equals joint mode with K=2") {
        Partition p2 = Partition::make({{0}, {1}}, 2);
        Eigen::VectorXd mean(2);
        mean << 0.1, -0.2;
        Eigen::MatrixXd cov(2, 2);
        cov << 1.0, 0.5, 0.5, 1.0;
        GaussianTask p_task(mean, cov, p2);
        Eigen::VectorXd qvar(2);
        qvar << 1.2, 0.9;
        GaussianTask q_task(Eigen::VectorXd::Zero(2), qvar.asDiagonal(), p2);
        LogitHeadSet joint = make_oracle_heads(p_task, q_task, make_joint_layout(p2));
        LogitHeadSet ar = make_oracle_heads(
            p_task, q_task, make_autoregressive_layout(AutoregressiveSpec{{{0}, {1}}, 2}));
        for (int rep = 0; rep < 100; ++rep) {
            Eigen::VectorXd x = uniform_point(2, rng);
            CHECK(std::abs(joint.combined_logit(x) - ar.combined_logit(x)) <= 1e-12);
        }
    }
}

TEST_CASE("combined oracle discriminator recovers p/(p+q) for correlated vs independent") {
    Partition p2 = Partition::make({{0}, {1}}, 2);
    Eigen::MatrixXd p_cov(2, 2);
    p_cov << 1.0, 0.8, 0.8, 1.0;
    GaussianTask p_task(Eigen::VectorXd::Zero(2), p_cov, p2);
    GaussianTask q_task(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), p2);
    LogitHeadSet heads = make_oracle_heads(p_task, q_task, make_joint_layout(p2));

    Rng rng(67);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd x = uniform_point(2, rng);
        double lp = testoracle::gaussian_log_density(p_task.mean(), p_task.cov(), x);
        double lq = testoracle::gaussian_log_density(q_task.mean(), q_task.cov(), x);
        double expected = std::exp(lp) / (std::exp(lp) + std::exp(lq));
        CHECK(std::abs(sigmoid(heads.combined_logit(x)) - expected) <= 1e-9);
    }
}

TEST_CASE("hierarchical 4-D oracle equals a flat four-way joint oracle") {
    Eigen::VectorXd mean(4);
    mean << 0.1, -0.2, 0.3, 0.0;
    Eigen::MatrixXd cov = 0.6 * Eigen::MatrixXd::Identity(4, 4) +
                          0.4 * Eigen::MatrixXd::Ones(4, 4);
    Eigen::VectorXd qvar(4);
    qvar << 1.1, 0.9, 1.2, 1.0;

    Partition grouped = Partition::make({{0, 1}, {2, 3}}, 4);
    Partition flat = Partition::make({{0}, {1}, {2}, {3}}, 4);
    GaussianTask p_grouped(mean, cov, grouped);
    GaussianTask q_grouped(Eigen::VectorXd::Zero(4), qvar.asDiagonal(), grouped);
    GaussianTask p_flat(mean, cov, flat);
    GaussianTask q_flat(Eigen::VectorXd::Zero(4), qvar.asDiagonal(), flat);

    HierarchySpec hier{{{{0}, {1}}, {{2}, {3}}}};
    LogitHeadSet h_heads =
        make_oracle_heads(p_grouped, q_grouped, make_hierarchical_layout(grouped, hier));
    LogitHeadSet flat_heads = make_oracle_heads(p_flat, q_flat, make_joint_layout(flat));

    Rng rng(90);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd x = uniform_point(4, rng);
        CHECK(std::abs(h_heads.combined_logit(x) - flat_heads.combined_logit(x)) <= 1e-9);
    }
}

TEST_CASE("three-step autoregressive oracle matches the analytic density ratio") {
    Partition p3 = Partition::make({{0}, {1}, {2}}, 3);
    Eigen::MatrixXd cov(3, 3);
    const double rho = 0.6;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) cov(i, j) = std::pow(rho, std::abs(i - j));
    GaussianTask p_task(Eigen::VectorXd::Zero(3), cov, p3);
    GaussianTask q_task(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3), p3);
    LogitHeadSet heads = make_oracle_heads(
        p_task, q_task, make_autoregressive_layout(AutoregressiveSpec{{{0}, {1}, {2}}, 3}));

    Rng rng(123);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd x = uniform_point(3, rng);
        double lp = testoracle::gaussian_log_density(p_task.mean(), p_task.cov(), x);
        double lq = testoracle::gaussian_log_density(q_task.mean(), q_task.cov(), x);
        CHECK(std::abs(heads.combined_logit(x) - (lp - lq)) <= 1e-9);
    }
}
