#include "fgan/tasks.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fgan {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

struct CholeskyDensity {
    Eigen::MatrixXd chol;
    double log_norm_const;
};

CholeskyDensity factor_covariance(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols()) throw std::invalid_argument("covariance must be square");
    if (!cov.isApprox(cov.transpose(), 1e-12))
        throw std::invalid_argument("covariance must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("covariance must be positive definite");
    CholeskyDensity out;
    out.chol = llt.matrixL();
    double log_det = 0.0;
    for (int i = 0; i < out.chol.rows(); ++i) log_det += 2.0 * std::log(out.chol(i, i));
    out.log_norm_const = -0.5 * (cov.rows() * kLog2Pi + log_det);
    return out;
}

double gaussian_log_density(const CholeskyDensity& f, const Eigen::VectorXd& centered) {
    Eigen::VectorXd z = f.chol.triangularView<Eigen::Lower>().solve(centered);
    return f.log_norm_const - 0.5 * z.squaredNorm();
}

}  // namespace

GaussianTask::GaussianTask(Eigen::VectorXd mean, Eigen::MatrixXd cov, Partition partition)
    : mean_(std::move(mean)), cov_(std::move(cov)), partition_(std::move(partition)) {
    if (cov_.rows() != mean_.size())
        throw std::invalid_argument("GaussianTask: mean/cov dimension mismatch");
    if (partition_.total_dim != mean_.size())
        throw std::invalid_argument("GaussianTask: partition does not cover the dimension");
    auto f = factor_covariance(cov_);
    chol_ = f.chol;
    log_norm_const_ = f.log_norm_const;
}

Eigen::MatrixXd GaussianTask::sample_joint(int n, Rng& rng) const {
    Eigen::MatrixXd out(n, dim());
    Eigen::VectorXd z(dim());
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < dim(); ++i) z(i) = rng.normal();
        out.row(r) = (mean_ + chol_ * z).transpose();
    }
    return out;
}

Eigen::MatrixXd GaussianTask::sample_marginal(int part_index, int n, Rng& rng) const {
    if (part_index < 0 || part_index >= partition_.part_count())
        throw std::out_of_range("GaussianTask::sample_marginal: bad part index");
    const auto& dims = partition_.parts[part_index];
    Eigen::VectorXd mu = project_columns(mean_.transpose(), dims).transpose();
    Eigen::MatrixXd sub(dims.size(), dims.size());
    for (std::size_t r = 0; r < dims.size(); ++r)
        for (std::size_t c = 0; c < dims.size(); ++c) sub(r, c) = cov_(dims[r], dims[c]);
    auto f = factor_covariance(sub);
    Eigen::MatrixXd out(n, dims.size());
    Eigen::VectorXd z(dims.size());
    for (int r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < dims.size(); ++i) z(i) = rng.normal();
        out.row(r) = (mu + f.chol * z).transpose();
    }
    return out;
}

double GaussianTask::log_density(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) throw std::invalid_argument("log_density: dimension mismatch");
    CholeskyDensity f{chol_, log_norm_const_};
    return gaussian_log_density(f, x - mean_);
}

double GaussianTask::marginal_log_density(const std::vector<int>& dims,
                                          const Eigen::VectorXd& x_sub) const {
    if (x_sub.size() != static_cast<Eigen::Index>(dims.size()))
        throw std::invalid_argument("marginal_log_density: dimension mismatch");
    Eigen::VectorXd mu(dims.size());
    Eigen::MatrixXd sub(dims.size(), dims.size());
    for (std::size_t r = 0; r < dims.size(); ++r) {
        mu(r) = mean_(dims[r]);
        for (std::size_t c = 0; c < dims.size(); ++c) sub(r, c) = cov_(dims[r], dims[c]);
    }
    auto f = factor_covariance(sub);
    return gaussian_log_density(f, x_sub - mu);
}

double GaussianTask::marginal_log_density(int part_index, const Eigen::VectorXd& x_part) const {
    if (part_index < 0 || part_index >= partition_.part_count())
        throw std::out_of_range("marginal_log_density: bad part index");
    return marginal_log_density(partition_.parts[part_index], x_part);
}

Partition PairedCategoricalTask::partition() const {
    return Partition::make({{0, 1}, {2, 3}}, 4);
}

Eigen::Vector2d PairedCategoricalTask::class_mean(int cls) const {
    double angle = 2.0 * M_PI * static_cast<double>(cls) / static_cast<double>(class_count);
    return {emission_radius * std::cos(angle), emission_radius * std::sin(angle)};
}

Eigen::MatrixXd PairedCategoricalTask::sample_joint(int n, Rng& rng) const {
    if (class_count < 2) throw std::invalid_argument("PairedCategoricalTask: need C >= 2");
    if (!(coupling >= 0.0 && coupling <= 1.0))
        throw std::invalid_argument("PairedCategoricalTask: coupling must lie in [0, 1]");
    Eigen::MatrixXd out(n, dim());
    for (int r = 0; r < n; ++r) {
        int top = static_cast<int>(rng.index(class_count));
        int bottom;
        if (rng.uniform() < coupling) {
            bottom = top;
        } else {
            bottom = static_cast<int>(rng.index(class_count - 1));
            if (bottom >= top) ++bottom;  // uniform over the other C-1 classes
        }
        Eigen::Vector2d mt = class_mean(top);
        Eigen::Vector2d mb = class_mean(bottom);
        out(r, 0) = mt(0) + emission_std * rng.normal();
        out(r, 1) = mt(1) + emission_std * rng.normal();
        out(r, 2) = mb(0) + emission_std * rng.normal();
        out(r, 3) = mb(1) + emission_std * rng.normal();
    }
    return out;
}

Eigen::MatrixXd PairedCategoricalTask::sample_marginal(int part_index, int n, Rng& rng) const {
    if (part_index < 0 || part_index > 1)
        throw std::out_of_range("PairedCategoricalTask::sample_marginal: bad part index");
    // Both class marginals are uniform for any coupling.
    Eigen::MatrixXd out(n, kPartDim);
    for (int r = 0; r < n; ++r) {
        int cls = static_cast<int>(rng.index(class_count));
        Eigen::Vector2d m = class_mean(cls);
        out(r, 0) = m(0) + emission_std * rng.normal();
        out(r, 1) = m(1) + emission_std * rng.normal();
    }
    return out;
}

Eigen::MatrixXd PairedCategoricalTask::analytic_class_table() const {
    Eigen::MatrixXd table(class_count, class_count);
    double diag = coupling / static_cast<double>(class_count);
    double off = (1.0 - coupling) /
                 (static_cast<double>(class_count) * static_cast<double>(class_count - 1));
    for (int t = 0; t < class_count; ++t)
        for (int b = 0; b < class_count; ++b) table(t, b) = t == b ? diag : off;
    return table;
}

Eigen::VectorXd GaussianMixture1::sample(Rng& rng) const {
    if (components.empty()) throw std::invalid_argument("GaussianMixture1: no components");
    double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = components.size() - 1;
    for (std::size_t i = 0; i < components.size(); ++i) {
        acc += components[i].weight;
        if (u < acc) {
            pick = i;
            break;
        }
    }
    const auto& c = components[pick];
    Eigen::VectorXd x(c.mean.size());
    for (int i = 0; i < x.size(); ++i) x(i) = c.mean(i) + c.std_dev * rng.normal();
    return x;
}

Partition AdditiveMixtureTask::partition() const {
    int s = source_dim();
    std::vector<int> a(s), v(s);
    for (int i = 0; i < s; ++i) {
        a[i] = i;
        v[i] = s + i;
    }
    return Partition::make({a, v}, 2 * s);
}

Eigen::MatrixXd AdditiveMixtureTask::sample_joint(int n, Rng& rng) const {
    if (source_a.dim() != source_v.dim())
        throw std::invalid_argument("AdditiveMixtureTask: source dims differ");
    int s = source_dim();
    Eigen::MatrixXd out(n, 2 * s);
    for (int r = 0; r < n; ++r) {
        out.row(r).head(s) = source_a.sample(rng).transpose();
        out.row(r).tail(s) = source_v.sample(rng).transpose();
    }
    return out;
}

Eigen::MatrixXd AdditiveMixtureTask::sample_marginal(int part_index, int n, Rng& rng) const {
    if (part_index < 0 || part_index > 1)
        throw std::out_of_range("AdditiveMixtureTask::sample_marginal: bad part index");
    const GaussianMixture1& src = part_index == 0 ? source_a : source_v;
    Eigen::MatrixXd out(n, source_dim());
    for (int r = 0; r < n; ++r) out.row(r) = src.sample(rng).transpose();
    return out;
}

Eigen::MatrixXd AdditiveMixtureTask::mixture_of(const Eigen::MatrixXd& joint_av) {
    int s = static_cast<int>(joint_av.cols()) / 2;
    return joint_av.leftCols(s) + joint_av.rightCols(s);
}

LogitHeadSet make_oracle_heads(const GaussianTask& p_task, const GaussianTask& q_task,
                               const HeadLayout& layout) {
    if (p_task.dim() != q_task.dim())
        throw std::invalid_argument("make_oracle_heads: task dimensions differ");
    if (layout.partition.total_dim != p_task.dim())
        throw std::invalid_argument("make_oracle_heads: layout does not match task dimension");

    LogitHeadSet set;
    set.layout = layout;
    for (const auto& m : layout.marginals) {
        auto dims = m.dims;
        set.marginal_fns.push_back([&p_task, &q_task, dims](const Eigen::VectorXd& xm) {
            return p_task.marginal_log_density(dims, xm) - q_task.marginal_log_density(dims, xm);
        });
    }
    for (const auto& pair : layout.pairs) {
        auto scope = pair.scope;
        auto parts = pair.decouple_parts;
        // Dependency logit: log of scope density over product of part densities.
        auto dependency_logit = [scope, parts](const GaussianTask& task,
                                               const Eigen::VectorXd& xs) {
            double logit = task.marginal_log_density(scope, xs);
            for (const auto& part : parts) {
                // Slice the scope-local coordinates belonging to this part.
                Eigen::VectorXd sub(part.size());
                for (std::size_t j = 0; j < part.size(); ++j) {
                    auto it = std::find(scope.begin(), scope.end(), part[j]);
                    sub(j) = xs(static_cast<Eigen::Index>(it - scope.begin()));
                }
                logit -= task.marginal_log_density(part, sub);
            }
            return logit;
        };
        if (pair.has_p)
            set.p_fns.push_back([&p_task, dependency_logit](const Eigen::VectorXd& xs) {
                return dependency_logit(p_task, xs);
            });
        set.q_fns.push_back([&q_task, dependency_logit](const Eigen::VectorXd& xs) {
            return dependency_logit(q_task, xs);
        });
    }
    return set;
}

}  // namespace fgan
