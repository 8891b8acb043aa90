#include "fgan/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fgan {

ClassTable ClassTable::from_joint(Eigen::MatrixXd joint) {
    if (joint.rows() != joint.cols() || joint.rows() < 1) {
        throw std::invalid_argument("class table must be square and non-empty");
    }
    double total = joint.sum();
    if (!(total > 0.0)) throw std::invalid_argument("class table must have positive mass");
    joint /= total;
    ClassTable t;
    t.top_marginal = joint.rowwise().sum();
    t.bottom_marginal = joint.colwise().sum().transpose();
    t.joint = std::move(joint);
    return t;
}

ClassTable ClassTable::from_labels(const std::vector<int>& top, const std::vector<int>& bottom,
                                   int class_count) {
    if (top.size() != bottom.size() || top.empty()) {
        throw std::invalid_argument("label vectors must be non-empty and equal length");
    }
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(class_count, class_count);
    for (std::size_t i = 0; i < top.size(); ++i) {
        if (top[i] < 0 || top[i] >= class_count || bottom[i] < 0 || bottom[i] >= class_count) {
            throw std::invalid_argument("label out of range");
        }
        counts(top[i], bottom[i]) += 1.0;
    }
    return from_joint(std::move(counts));
}

namespace {

int nearest_class(const Eigen::Vector2d& point, const PairedCategoricalTask& task) {
    int best = 0;
    double best_d2 = (point - task.class_mean(0)).squaredNorm();
    for (int c = 1; c < task.class_count; ++c) {
        double d2 = (point - task.class_mean(c)).squaredNorm();
        if (d2 < best_d2) {  // strict: ties keep the lower index
            best_d2 = d2;
            best = c;
        }
    }
    return best;
}

}  // namespace

PartLabels classify_parts(const Eigen::MatrixXd& samples, const PairedCategoricalTask& task) {
    if (samples.cols() != 2 * PairedCategoricalTask::kPartDim) {
        throw std::invalid_argument("samples must have one 2-D emission per part");
    }
    PartLabels labels;
    labels.top.resize(static_cast<std::size_t>(samples.rows()));
    labels.bottom.resize(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        labels.top[static_cast<std::size_t>(i)] =
            nearest_class(samples.row(i).head<2>().transpose(), task);
        labels.bottom[static_cast<std::size_t>(i)] =
            nearest_class(samples.row(i).tail<2>().transpose(), task);
    }
    return labels;
}

std::optional<double> dependency_metric(const ClassTable& real_table,
                                        const ClassTable& gen_table) {
    if (real_table.joint.rows() != gen_table.joint.rows()) {
        throw std::invalid_argument("class tables must have matching size");
    }
    const int c = static_cast<int>(real_table.joint.rows());
    double acc = 0.0;
    for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) {
            double real_marg = real_table.top_marginal(i) * real_table.bottom_marginal(j);
            double gen_marg = gen_table.top_marginal(i) * gen_table.bottom_marginal(j);
            if (real_marg == 0.0 || gen_marg == 0.0) return std::nullopt;
            acc += std::abs(real_table.joint(i, j) / real_marg -
                            gen_table.joint(i, j) / gen_marg);
        }
    }
    return acc / (static_cast<double>(c) * static_cast<double>(c));
}

GaussianFit fit_gaussian(const Eigen::MatrixXd& samples) {
    if (samples.rows() < 2) throw std::invalid_argument("need at least 2 samples to fit");
    GaussianFit fit;
    fit.mean = samples.colwise().mean().transpose();
    Eigen::MatrixXd centered = samples.rowwise() - fit.mean.transpose();
    fit.cov = (centered.transpose() * centered) / static_cast<double>(samples.rows() - 1);
    return fit;
}

namespace {

// Symmetric positive-semidefinite square root via eigendecomposition,
// clamping small negative eigenvalues from roundoff.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    Eigen::VectorXd evals = es.eigenvalues();
    double min_eval = evals.minCoeff();
    if (min_eval < -1e-6) {
        std::fprintf(stderr, "warning: %s has eigenvalue %.3e below zero; clamping\n", what,
                     min_eval);
    }
    evals = evals.cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance_fits(const GaussianFit& a, const GaussianFit& b) {
    if (a.mean.size() != b.mean.size()) {
        throw std::invalid_argument("Gaussian fits must have matching dimension");
    }
    Eigen::MatrixXd s = psd_sqrt(a.cov, "first covariance");
    // s * cov_b * s is symmetric PSD and similar to cov_a * cov_b, so its PSD
    // square root has the trace of (cov_a cov_b)^(1/2).
    Eigen::MatrixXd inner = s * b.cov * s;
    inner = 0.5 * (inner + inner.transpose());  // enforce exact symmetry
    Eigen::MatrixXd cross = psd_sqrt(inner, "covariance product");
    double mean_term = (a.mean - b.mean).squaredNorm();
    return mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross.trace();
}

double frechet_distance(const Eigen::MatrixXd& samples_a, const Eigen::MatrixXd& samples_b) {
    return frechet_distance_fits(fit_gaussian(samples_a), fit_gaussian(samples_b));
}

RatioMae ratio_mae(const LogitHeadSet& model, const LogitHeadSet& reference,
                   const Eigen::MatrixXd& test_points) {
    if (test_points.rows() < 1) throw std::invalid_argument("need at least one test point");
    const std::size_t head_count = model.layout.marginals.size() +
                                   model.layout.p_head_count() + model.layout.pairs.size();
    RatioMae out;
    out.per_head.assign(head_count, 0.0);
    double combined_acc = 0.0;
    for (Eigen::Index r = 0; r < test_points.rows(); ++r) {
        Eigen::VectorXd x = test_points.row(r).transpose();
        HeadValues mv = model.values_at(x);
        HeadValues rv = reference.values_at(x);
        std::size_t k = 0;
        for (std::size_t i = 0; i < mv.marginals.size(); ++i, ++k) {
            out.per_head[k] += std::abs(sigmoid(mv.marginals[i]) - sigmoid(rv.marginals[i]));
        }
        for (std::size_t i = 0; i < mv.p.size(); ++i, ++k) {
            out.per_head[k] += std::abs(sigmoid(mv.p[i]) - sigmoid(rv.p[i]));
        }
        for (std::size_t i = 0; i < mv.q.size(); ++i, ++k) {
            out.per_head[k] += std::abs(sigmoid(mv.q[i]) - sigmoid(rv.q[i]));
        }
        combined_acc += std::abs(sigmoid(combine_logits(model.layout, mv)) -
                                 sigmoid(combine_logits(reference.layout, rv)));
    }
    const double n = static_cast<double>(test_points.rows());
    for (double& v : out.per_head) v /= n;
    out.combined = combined_acc / n;
    return out;
}

double combined_ratio_mae(const std::function<double(const Eigen::VectorXd&)>& model_logit,
                          const std::function<double(const Eigen::VectorXd&)>& reference_logit,
                          const Eigen::MatrixXd& test_points) {
    if (test_points.rows() < 1) throw std::invalid_argument("need at least one test point");
    double acc = 0.0;
    for (Eigen::Index r = 0; r < test_points.rows(); ++r) {
        Eigen::VectorXd x = test_points.row(r).transpose();
        acc += std::abs(sigmoid(model_logit(x)) - sigmoid(reference_logit(x)));
    }
    return acc / static_cast<double>(test_points.rows());
}

Chi2Result chi2_independence(const std::vector<int>& top, const std::vector<int>& bottom,
                             int class_count, double alpha) {
    ClassTable table = ClassTable::from_labels(top, bottom, class_count);
    const double n = static_cast<double>(top.size());
    Chi2Result res;
    res.dof = (class_count - 1) * (class_count - 1);
    for (int i = 0; i < class_count; ++i) {
        for (int j = 0; j < class_count; ++j) {
            double expected = n * table.top_marginal(i) * table.bottom_marginal(j);
            double observed = n * table.joint(i, j);
            if (expected < 5.0) res.valid = false;
            if (expected > 0.0) {
                double d = observed - expected;
                res.statistic += d * d / expected;
            }
        }
    }
    boost::math::chi_squared dist(res.dof);
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    res.rejected = res.p_value < alpha;
    return res;
}

}  // namespace fgan
