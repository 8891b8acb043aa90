#ifndef FGAN_TESTS_ORACLES_HPP
#define FGAN_TESTS_ORACLES_HPP

// Reference implementations kept deliberately independent of the library:
// plain scalar loops, no shared helpers, so that agreement between the two
// sides is evidence rather than tautology.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fgan/net.hpp"
#include "fgan/rng.hpp"

namespace testoracle {

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// ---------------------------------------------------------------------------
// Straight-line dense-network evaluation: one sample, explicit loops.

inline Eigen::VectorXd straight_line_forward(const fgan::DenseNet& net, const Eigen::VectorXd& x,
                                             bool activated = true) {
    std::vector<double> cur(x.data(), x.data() + x.size());
    for (int l = 0; l < net.num_layers(); ++l) {
        const Eigen::MatrixXd& w = net.weights[l];
        const Eigen::VectorXd& b = net.biases[l];
        std::vector<double> next(static_cast<std::size_t>(w.rows()));
        for (Eigen::Index o = 0; o < w.rows(); ++o) {
            double acc = b(o);
            for (Eigen::Index i = 0; i < w.cols(); ++i) acc += w(o, i) * cur[i];
            next[static_cast<std::size_t>(o)] = acc;
        }
        const bool last = l == net.num_layers() - 1;
        if (!last) {
            double slope = net.hidden_activation == fgan::HiddenActivation::relu ? 0.0 : 0.2;
            for (double& v : next)
                if (v < 0.0) v *= slope;
        } else if (activated && net.output_activation == fgan::OutputActivation::sigmoid) {
            for (double& v : next) v = 1.0 / (1.0 + std::exp(-v));
        }
        cur = std::move(next);
    }
    Eigen::VectorXd out(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) out(static_cast<Eigen::Index>(i)) = cur[i];
    return out;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver for symmetric matrices.

inline void jacobi_eigen(Eigen::MatrixXd a, Eigen::VectorXd& eigenvalues,
                         Eigen::MatrixXd* eigenvectors = nullptr) {
    if (a.rows() != a.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-300) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    eigenvalues.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) eigenvalues(i) = a(i, i);
    if (eigenvectors) *eigenvectors = v;
}

/// Largest singular value of an arbitrary matrix via Jacobi on the smaller Gram matrix.
inline double top_singular_value(const Eigen::MatrixXd& w) {
    Eigen::MatrixXd gram =
        w.rows() <= w.cols() ? Eigen::MatrixXd(w * w.transpose()) : Eigen::MatrixXd(w.transpose() * w);
    Eigen::VectorXd evals;
    jacobi_eigen(gram, evals);
    double top = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) top = std::max(top, evals(i));
    return std::sqrt(top);
}

/// Symmetric PSD square root via the Jacobi decomposition (negatives clamped).
inline Eigen::MatrixXd jacobi_psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    jacobi_eigen(m, evals, &evecs);
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double root = evals(k) > 0.0 ? std::sqrt(evals(k)) : 0.0;
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) out(r, c) += root * evecs(r, k) * evecs(c, k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gauss-Jordan elimination with partial pivoting: inverse plus log|det|.

struct GjResult {
    Eigen::MatrixXd inverse;
    double log_abs_det = 0.0;
    double det_sign = 1.0;
};

inline GjResult gj_invert(Eigen::MatrixXd a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("gj_invert: matrix must be square");
    const Eigen::Index n = a.rows();
    GjResult res;
    res.inverse = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        for (Eigen::Index r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) throw std::runtime_error("gj_invert: singular matrix");
        if (piv != col) {
            a.row(piv).swap(a.row(col));
            res.inverse.row(piv).swap(res.inverse.row(col));
            res.det_sign = -res.det_sign;
        }
        double d = a(col, col);
        res.log_abs_det += std::log(std::abs(d));
        if (d < 0.0) res.det_sign = -res.det_sign;
        for (Eigen::Index c = 0; c < n; ++c) {
            a(col, c) /= d;
            res.inverse(col, c) /= d;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a(r, col);
            if (f == 0.0) continue;
            for (Eigen::Index c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                res.inverse(r, c) -= f * res.inverse(col, c);
            }
        }
    }
    return res;
}

/// Multivariate normal log density from the direct inverse-based formula.
inline double gaussian_log_density(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                   const Eigen::VectorXd& x) {
    const double kLog2Pi = std::log(2.0 * M_PI);
    GjResult gj = gj_invert(cov);
    if (gj.det_sign <= 0.0) throw std::runtime_error("gaussian_log_density: det not positive");
    Eigen::VectorXd c = x - mean;
    double quad = 0.0;
    for (Eigen::Index r = 0; r < c.size(); ++r)
        for (Eigen::Index k = 0; k < c.size(); ++k) quad += c(r) * gj.inverse(r, k) * c(k);
    return -0.5 * (static_cast<double>(c.size()) * kLog2Pi + gj.log_abs_det + quad);
}

/// Marginal of a multivariate normal over an index subset.
inline double gaussian_marginal_log_density(const Eigen::VectorXd& mean,
                                            const Eigen::MatrixXd& cov,
                                            const std::vector<int>& dims,
                                            const Eigen::VectorXd& x_sub) {
    Eigen::VectorXd mu(dims.size());
    Eigen::MatrixXd sub(dims.size(), dims.size());
    for (std::size_t r = 0; r < dims.size(); ++r) {
        mu(static_cast<Eigen::Index>(r)) = mean(dims[r]);
        for (std::size_t c = 0; c < dims.size(); ++c)
            sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                cov(dims[r], dims[c]);
    }
    return gaussian_log_density(mu, sub, x_sub);
}

// ---------------------------------------------------------------------------
// Naive probability-space losses, valid for |logit| well below overflow.

inline double naive_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// h(sigmoid(d)) with h(a) = a / (1 - a): the density ratio a logit encodes.
inline double h_of_sigmoid(double d) {
    double a = naive_sigmoid(d);
    return a / (1.0 - a);
}

inline double naive_disc_loss(const Eigen::VectorXd& real, const Eigen::VectorXd& fake) {
    double lr = 0.0, lf = 0.0;
    for (Eigen::Index i = 0; i < real.size(); ++i) lr += std::log(naive_sigmoid(real(i)));
    // 1 - sigma(x) written as 1/(1+e^x), avoiding the subtraction's
    // cancellation so the direct formula stays usable out to |x| ~ 30.
    for (Eigen::Index i = 0; i < fake.size(); ++i)
        lf += std::log(1.0 / (1.0 + std::exp(fake(i))));
    return -(lr / static_cast<double>(real.size()) + lf / static_cast<double>(fake.size()));
}

inline double naive_gen_loss(const Eigen::VectorXd& logits) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) acc += std::log(naive_sigmoid(logits(i)));
    return -acc / static_cast<double>(logits.size());
}

// ---------------------------------------------------------------------------
// Dependency metric by full cell enumeration over two C x C count tables.

inline double enumerate_dependency_metric(const Eigen::MatrixXd& real_counts,
                                          const Eigen::MatrixXd& gen_counts) {
    const Eigen::Index c = real_counts.rows();
    auto ratio = [c](const Eigen::MatrixXd& counts, Eigen::Index i, Eigen::Index j) {
        double total = 0.0;
        for (Eigen::Index r = 0; r < c; ++r)
            for (Eigen::Index k = 0; k < c; ++k) total += counts(r, k);
        double row = 0.0, col = 0.0;
        for (Eigen::Index k = 0; k < c; ++k) row += counts(i, k) / total;
        for (Eigen::Index r = 0; r < c; ++r) col += counts(r, j) / total;
        return (counts(i, j) / total) / (row * col);
    };
    double acc = 0.0;
    for (Eigen::Index i = 0; i < c; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            acc += std::abs(ratio(real_counts, i, j) - ratio(gen_counts, i, j));
    return acc / static_cast<double>(c * c);
}

// ---------------------------------------------------------------------------
// Central finite differences with kink-aware fixture search.

inline constexpr double kFdStep = 1e-5;
/// Minimum |hidden pre-activation| that keeps an FD probe of size kFdStep on
/// one side of the ReLU/LeakyReLU kink.
inline constexpr double kKinkMargin = 1e-3;

inline double central_fd(const std::function<double()>& eval, double& param, double h = kFdStep) {
    const double saved = param;
    param = saved + h;
    double up = eval();
    param = saved - h;
    double down = eval();
    param = saved;
    return (up - down) / (2.0 * h);
}

/// Smallest |pre-activation| over all hidden layers of a forward pass;
/// configurations below kKinkMargin are rejected and redrawn.
inline double min_hidden_preact(const fgan::DenseNet& net, const Eigen::MatrixXd& batch) {
    fgan::ForwardCache cache;
    fgan::net_forward(net, batch, &cache);
    double min_abs = std::numeric_limits<double>::infinity();
    for (int l = 0; l + 1 < net.num_layers(); ++l)
        min_abs = std::min(min_abs, cache.pre_acts[static_cast<std::size_t>(l)]
                                        .cwiseAbs()
                                        .minCoeff());
    return min_abs;
}

}  // namespace testoracle

#endif
