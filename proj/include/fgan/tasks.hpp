#ifndef FGAN_TASKS_HPP
#define FGAN_TASKS_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fgan/factorization.hpp"
#include "fgan/rng.hpp"

namespace fgan {

/// Multivariate normal with exact sampling and closed-form log densities.
/// Carrier for every analytic-oracle fixture.
class GaussianTask {
public:
    GaussianTask(Eigen::VectorXd mean, Eigen::MatrixXd cov, Partition partition);

    int dim() const { return static_cast<int>(mean_.size()); }
    const Partition& partition() const { return partition_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

    Eigen::MatrixXd sample_joint(int n, Rng& rng) const;
    Eigen::MatrixXd sample_marginal(int part_index, int n, Rng& rng) const;

    double log_density(const Eigen::VectorXd& x) const;
    /// Log density of the marginal over an arbitrary dimension subset.
    double marginal_log_density(const std::vector<int>& dims, const Eigen::VectorXd& x_sub) const;
    double marginal_log_density(int part_index, const Eigen::VectorXd& x_part) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    Eigen::MatrixXd chol_;  // lower factor of cov
    double log_norm_const_;
    Partition partition_;
};

/// Two 2-D emissions whose classes share a coupling: the bottom class equals
/// the top class with probability lambda, otherwise uniform over the rest.
/// Class means sit on a circle; lambda = 1/C gives exact independence.
struct PairedCategoricalTask {
    int class_count = 10;
    double coupling = 0.9;  // lambda
    double emission_radius = 3.0;
    double emission_std = 0.25;

    static constexpr int kPartDim = 2;

    Partition partition() const;                 // {0,1} | {2,3}
    int dim() const { return 2 * kPartDim; }
    Eigen::Vector2d class_mean(int cls) const;

    Eigen::MatrixXd sample_joint(int n, Rng& rng) const;
    Eigen::MatrixXd sample_marginal(int part_index, int n, Rng& rng) const;

    /// Exact joint class probabilities: lambda/C on the diagonal,
    /// (1-lambda)/(C(C-1)) off it.
    Eigen::MatrixXd analytic_class_table() const;
};

/// A small Gaussian mixture over R^dim, used as source models for the
/// additive-mixture task.
struct GaussianMixture1 {
    struct Component {
        double weight;
        Eigen::VectorXd mean;
        double std_dev;  // isotropic
    };
    std::vector<Component> components;

    int dim() const { return components.empty() ? 0 : static_cast<int>(components[0].mean.size()); }
    Eigen::VectorXd sample(Rng& rng) const;
};

/// Sources a and v drawn independently; the mixture is m = a + v. The
/// discriminated joint variable is (a, v) with K = 2.
struct AdditiveMixtureTask {
    GaussianMixture1 source_a;
    GaussianMixture1 source_v;

    int source_dim() const { return source_a.dim(); }
    int dim() const { return 2 * source_dim(); }
    Partition partition() const;

    Eigen::MatrixXd sample_joint(int n, Rng& rng) const;      // rows = (a, v)
    Eigen::MatrixXd sample_marginal(int part_index, int n, Rng& rng) const;
    static Eigen::MatrixXd mixture_of(const Eigen::MatrixXd& joint_av);
};

/// How many joint observations stay paired; the remainder is drawn as fresh
/// per-part marginal samples, split evenly across parts.
struct DatasetSplitSpec {
    int n_total = 0;
    int n_paired = 0;
};

struct DatasetSplit {
    Eigen::MatrixXd paired_pool;                 // n_paired x d
    std::vector<Eigen::MatrixXd> unpaired_pools;  // per part, n_i x |D_i|
};

template <typename Task>
DatasetSplit make_dataset_split(const Task& task, const DatasetSplitSpec& spec, Rng& rng) {
    if (spec.n_paired < 0 || spec.n_total < spec.n_paired)
        throw std::invalid_argument("make_dataset_split: need 0 <= n_paired <= n_total");
    DatasetSplit split;
    split.paired_pool = task.sample_joint(spec.n_paired, rng);
    const Partition part = task.partition();
    int remainder = spec.n_total - spec.n_paired;
    int k = part.part_count();
    for (int i = 0; i < k; ++i) {
        int n_i = remainder / k + (i < remainder % k ? 1 : 0);
        split.unpaired_pools.push_back(task.sample_marginal(i, n_i, rng));
    }
    return split;
}

/// Exact logit heads for a pair of Gaussian tasks over the same dims:
/// marginal head i is log p_i - log q_i, a dependency p head over scope S
/// with decouple parts S_1..S_m is log p_S - sum_j log p_{S_j} (q analogous).
/// Plugging these into combine_logits reproduces log(p(x)/q(x)).
LogitHeadSet make_oracle_heads(const GaussianTask& p_task, const GaussianTask& q_task,
                               const HeadLayout& layout);

}  // namespace fgan

#endif
