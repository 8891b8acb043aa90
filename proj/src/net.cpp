#include "fgan/net.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fgan {

namespace {

void apply_hidden(Eigen::MatrixXd& m, HiddenActivation act) {
    if (act == HiddenActivation::relu) {
        m = m.cwiseMax(0.0);
    } else {
        m = m.unaryExpr([](double x) { return x >= 0.0 ? x : kLeakySlope * x; });
    }
}

Eigen::MatrixXd hidden_slope(const Eigen::MatrixXd& pre, HiddenActivation act) {
    if (act == HiddenActivation::relu) {
        return pre.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : 0.0; });
    }
    return pre.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : kLeakySlope; });
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& m) {
    return m.unaryExpr([](double x) {
        return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    });
}

}  // namespace

bool DenseNet::all_finite() const {
    for (const auto& w : weights)
        if (!w.allFinite()) return false;
    for (const auto& b : biases)
        if (!b.allFinite()) return false;
    return true;
}

DenseNet init_params(const std::vector<int>& layer_dims, std::uint64_t seed,
                     HiddenActivation hidden, OutputActivation output) {
    if (layer_dims.size() < 2) throw std::invalid_argument("init_params: need at least two layer dims");
    for (int d : layer_dims)
        if (d <= 0) throw std::invalid_argument("init_params: layer dims must be positive");

    DenseNet net;
    net.layer_dims = layer_dims;
    net.hidden_activation = hidden;
    net.output_activation = output;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        int fan_in = layer_dims[l];
        int fan_out = layer_dims[l + 1];
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return net;
}

ForwardResult net_forward(const DenseNet& net, const Eigen::MatrixXd& batch,
                          ForwardCache* cache) {
    if (batch.cols() != net.input_dim()) {
        std::ostringstream msg;
        msg << "net_forward: batch has " << batch.cols() << " columns, expected "
            << net.input_dim();
        throw std::invalid_argument(msg.str());
    }
    if (cache) {
        cache->input = batch;
        cache->pre_acts.clear();
        cache->post_acts.clear();
    }

    Eigen::MatrixXd act = batch;
    Eigen::MatrixXd pre;
    int L = net.num_layers();
    for (int l = 0; l < L; ++l) {
        pre = act * net.weights[l].transpose();
        pre.rowwise() += net.biases[l].transpose();
        if (cache) cache->pre_acts.push_back(pre);
        if (l + 1 < L) {
            act = pre;
            apply_hidden(act, net.hidden_activation);
        } else {
            act = net.output_activation == OutputActivation::sigmoid ? sigmoid(pre) : pre;
        }
        if (cache) cache->post_acts.push_back(act);
    }
    if (cache) cache->valid = true;
    return {pre, act};
}

NetGradients net_backward(const DenseNet& net, const ForwardCache& cache,
                          const Eigen::MatrixXd& upstream) {
    if (!cache.valid) throw std::logic_error("net_backward: forward cache missing or stale");
    int L = net.num_layers();
    if (upstream.rows() != cache.input.rows() || upstream.cols() != net.output_dim())
        throw std::invalid_argument("net_backward: upstream gradient shape mismatch");

    NetGradients g;
    g.weight_grads.resize(L);
    g.bias_grads.resize(L);

    // delta = dL/d(pre-activation of layer l)
    Eigen::MatrixXd delta;
    if (net.output_activation == OutputActivation::sigmoid) {
        const Eigen::MatrixXd& y = cache.post_acts.back();
        delta = upstream.cwiseProduct(y.cwiseProduct(Eigen::MatrixXd::Ones(y.rows(), y.cols()) - y));
    } else {
        delta = upstream;
    }

    for (int l = L - 1; l >= 0; --l) {
        const Eigen::MatrixXd& layer_in = l == 0 ? cache.input : cache.post_acts[l - 1];
        g.weight_grads[l] = delta.transpose() * layer_in;
        g.bias_grads[l] = delta.colwise().sum().transpose();
        Eigen::MatrixXd din = delta * net.weights[l];
        if (l > 0) {
            delta = din.cwiseProduct(hidden_slope(cache.pre_acts[l - 1], net.hidden_activation));
        } else {
            g.input_grad = din;
        }
    }
    return g;
}

AdamState AdamState::for_net(const DenseNet& net, double lr) {
    AdamState s;
    s.lr = lr;
    for (const auto& w : net.weights) {
        s.m_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
        s.v_weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : net.biases) {
        s.m_biases.push_back(Eigen::VectorXd::Zero(b.size()));
        s.v_biases.push_back(Eigen::VectorXd::Zero(b.size()));
    }
    return s;
}

namespace {

template <typename Mat>
void adam_update_one(Mat& param, const Mat& grad, Mat& m, Mat& v, const AdamState& s,
                     double bc1, double bc2) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols())
        throw std::invalid_argument("adam_step: gradient shape mismatch");
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    Mat m_hat = m / bc1;
    Mat v_hat = v / bc2;
    Mat denom = v_hat.cwiseSqrt() + Mat::Constant(param.rows(), param.cols(), s.eps);
    param -= s.lr * m_hat.cwiseQuotient(denom);
}

}  // namespace

void adam_step(DenseNet& net, const NetGradients& grads, AdamState& state) {
    if (grads.weight_grads.size() != net.weights.size() ||
        grads.bias_grads.size() != net.biases.size())
        throw std::invalid_argument("adam_step: gradient layer count mismatch");
    state.step_count += 1;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (int l = 0; l < net.num_layers(); ++l) {
        adam_update_one(net.weights[l], grads.weight_grads[l], state.m_weights[l],
                        state.v_weights[l], state, bc1, bc2);
        adam_update_one(net.biases[l], grads.bias_grads[l], state.m_biases[l],
                        state.v_biases[l], state, bc1, bc2);
    }
    if (!net.all_finite()) throw std::runtime_error("adam_step: parameters became non-finite");
}

SpectralNormState SpectralNormState::for_net(const DenseNet& net, std::uint64_t seed) {
    SpectralNormState s;
    Rng rng(seed);
    for (const auto& w : net.weights) {
        Eigen::VectorXd u(w.rows());
        for (int i = 0; i < u.size(); ++i) u(i) = rng.normal();
        double n = u.norm();
        if (n == 0.0) u.setConstant(1.0 / std::sqrt(static_cast<double>(u.size())));
        else u /= n;
        s.u.push_back(std::move(u));
    }
    return s;
}

NormalizedWeight spectral_normalize(const Eigen::MatrixXd& weight, Eigen::VectorXd& u,
                                    int iterations, bool advance_state) {
    if (!weight.allFinite())
        throw std::invalid_argument("spectral_normalize: weight has non-finite entries");
    if (u.size() != weight.rows())
        throw std::invalid_argument("spectral_normalize: u has wrong dimension");
    if (iterations < 1) throw std::invalid_argument("spectral_normalize: iterations must be >= 1");

    // Degenerate matrices (all-zero layers, or u exactly orthogonal to the
    // range) cannot sustain a power iteration; pass the weight through
    // unscaled. The only case reached in practice is an exactly-zero layer,
    // whose normalized form is itself zero.
    NormalizedWeight out;
    Eigen::VectorXd u_cur = u;
    Eigen::VectorXd v;
    for (int it = 0; it < iterations; ++it) {
        v = weight.transpose() * u_cur;
        double nv = v.norm();
        if (nv == 0.0) {
            out.weight = weight;
            out.sigma = 1.0;
            out.u = u_cur;
            out.v = Eigen::VectorXd::Zero(weight.cols());
            return out;
        }
        v /= nv;
        u_cur = weight * v;
        double nu = u_cur.norm();
        if (nu == 0.0) throw std::runtime_error("spectral_normalize: power iteration collapsed");
        u_cur /= nu;
    }
    double sigma = u_cur.dot(weight * v);
    if (advance_state) u = u_cur;

    out.weight = weight / sigma;
    out.sigma = sigma;
    out.u = u_cur;
    out.v = v;
    return out;
}

Eigen::MatrixXd spectral_norm_weight_grad(const Eigen::MatrixXd& grad_wbar,
                                          const NormalizedWeight& nw) {
    double inner = grad_wbar.cwiseProduct(nw.weight).sum();
    return grad_wbar / nw.sigma - (inner / nw.sigma) * (nw.u * nw.v.transpose());
}

}  // namespace fgan
