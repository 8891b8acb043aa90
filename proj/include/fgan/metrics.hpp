#ifndef FGAN_METRICS_HPP
#define FGAN_METRICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "fgan/tasks.hpp"

namespace fgan {

/// One evaluation row of a training run. Absent values stay unset and are
/// written as empty CSV cells (never zeros — zero is a meaningful value).
struct MetricsRecord {
    int step = 0;
    std::optional<double> gen_loss;
    std::vector<std::optional<double>> head_losses;  // order fixed by the model's head names
    std::optional<double> d_dep;
    bool d_dep_degenerate = false;  // a class table had a zero marginal cell
    std::vector<std::optional<double>> frechet_per_part;
    std::optional<double> ratio_mae;
    std::optional<double> wall_time;
};

/// Joint class frequencies plus the two marginal frequency vectors.
struct ClassTable {
    Eigen::MatrixXd joint;       // C x C, sums to 1
    Eigen::VectorXd top_marginal;
    Eigen::VectorXd bottom_marginal;

    static ClassTable from_joint(Eigen::MatrixXd joint);
    static ClassTable from_labels(const std::vector<int>& top, const std::vector<int>& bottom,
                                  int class_count);
};

/// Nearest-class-mean labels for each part of each sample; ties break to the
/// lowest class index.
struct PartLabels {
    std::vector<int> top;
    std::vector<int> bottom;
};
PartLabels classify_parts(const Eigen::MatrixXd& samples, const PairedCategoricalTask& task);

/// Mean absolute difference of joint-to-product-of-marginals ratios over all
/// C^2 cells. nullopt when any marginal cell is zero (metric undefined).
std::optional<double> dependency_metric(const ClassTable& real_table,
                                        const ClassTable& gen_table);

struct GaussianFit {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;  // unbiased (n-1) normalization
};
GaussianFit fit_gaussian(const Eigen::MatrixXd& samples);

/// ||mu1 - mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)) between Gaussian fits of
/// the two sample sets. The matrix square root is taken via a symmetric
/// eigendecomposition of the similarity-transformed product; eigenvalues
/// below zero are clamped. Warns on stderr when the most negative eigenvalue
/// is under -1e-6.
double frechet_distance(const Eigen::MatrixXd& samples_a, const Eigen::MatrixXd& samples_b);
double frechet_distance_fits(const GaussianFit& a, const GaussianFit& b);

/// Mean |sigma(model logit) - sigma(reference logit)| over test points,
/// reported per head (layout order: marginals, then p heads, then q heads)
/// and for the combined logit.
struct RatioMae {
    double combined = 0.0;
    std::vector<double> per_head;
};
RatioMae ratio_mae(const LogitHeadSet& model, const LogitHeadSet& reference,
                   const Eigen::MatrixXd& test_points);
double combined_ratio_mae(const std::function<double(const Eigen::VectorXd&)>& model_logit,
                          const std::function<double(const Eigen::VectorXd&)>& reference_logit,
                          const Eigen::MatrixXd& test_points);

/// Pearson chi-squared independence test on a C x C contingency table
/// against the product of empirical marginals, (C-1)^2 degrees of freedom.
struct Chi2Result {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    bool rejected = false;
    bool valid = true;  // false when any expected cell count is below 5
};
Chi2Result chi2_independence(const std::vector<int>& top, const std::vector<int>& bottom,
                             int class_count, double alpha = 0.01);

}  // namespace fgan

#endif
