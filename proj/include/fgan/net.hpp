#ifndef FGAN_NET_HPP
#define FGAN_NET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fgan/rng.hpp"

namespace fgan {

enum class HiddenActivation { relu, leaky_relu };  // leaky slope fixed at 0.2
enum class OutputActivation { identity, sigmoid };

inline constexpr double kLeakySlope = 0.2;

/// Fully connected network with a fixed topology. Weights are stored
/// out x in per layer; batches are row-major (one sample per row).
struct DenseNet {
    std::vector<int> layer_dims;  // input dim first, output dim last
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    HiddenActivation hidden_activation = HiddenActivation::leaky_relu;
    OutputActivation output_activation = OutputActivation::identity;

    int num_layers() const { return static_cast<int>(weights.size()); }
    int input_dim() const { return layer_dims.front(); }
    int output_dim() const { return layer_dims.back(); }

    /// True when every weight and bias entry is finite.
    bool all_finite() const;
};

/// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out))), zero biases.
/// Bit-identical for identical seeds.
DenseNet init_params(const std::vector<int>& layer_dims, std::uint64_t seed,
                     HiddenActivation hidden = HiddenActivation::leaky_relu,
                     OutputActivation output = OutputActivation::identity);

/// Intermediates captured during a forward pass, required by net_backward.
struct ForwardCache {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre_acts;   // per layer, before activation
    std::vector<Eigen::MatrixXd> post_acts;  // per layer, after activation
    bool valid = false;
};

struct ForwardResult {
    Eigen::MatrixXd pre_activation;  // final-layer logits
    Eigen::MatrixXd activated;       // after output activation
};

/// Evaluates the network on a batch (rows = samples). Returns both the final
/// pre-activation and the activated output; fills `cache` when given.
ForwardResult net_forward(const DenseNet& net, const Eigen::MatrixXd& batch,
                          ForwardCache* cache = nullptr);

struct NetGradients {
    std::vector<Eigen::MatrixXd> weight_grads;
    std::vector<Eigen::VectorXd> bias_grads;
    Eigen::MatrixXd input_grad;
};

/// Reverse-mode gradients of the forward pass. `upstream` is dL/d(activated
/// output), same shape as the batch output. Also returns dL/d(input) so
/// generator updates can flow through discriminators.
NetGradients net_backward(const DenseNet& net, const ForwardCache& cache,
                          const Eigen::MatrixXd& upstream);

/// Bias-corrected Adam.
struct AdamState {
    std::vector<Eigen::MatrixXd> m_weights, v_weights;
    std::vector<Eigen::VectorXd> m_biases, v_biases;
    std::int64_t step_count = 0;
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_net(const DenseNet& net, double lr = 1e-4);
};

/// One Adam update applied in place; throws if shapes disagree or a
/// parameter becomes non-finite.
void adam_step(DenseNet& net, const NetGradients& grads, AdamState& state);

/// Persistent power-iteration state, one left singular vector estimate per
/// weight matrix.
struct SpectralNormState {
    std::vector<Eigen::VectorXd> u;
    int power_iterations_per_step = 1;

    static SpectralNormState for_net(const DenseNet& net, std::uint64_t seed);
};

struct NormalizedWeight {
    Eigen::MatrixXd weight;  // W / sigma
    double sigma = 0.0;
    Eigen::VectorXd u, v;  // singular vector estimates used for sigma
};

/// Scales `weight` by the reciprocal of the power-iteration estimate of its
/// largest singular value. Advances `u` by `iterations` power iterations
/// when advance_state is true, otherwise leaves it untouched.
NormalizedWeight spectral_normalize(const Eigen::MatrixXd& weight, Eigen::VectorXd& u,
                                    int iterations, bool advance_state = true);

/// dL/dW for W_bar = W / sigma with sigma = u^T W v held as a function of W
/// (u, v frozen): G/sigma - (<G, W_bar>/sigma) u v^T.
Eigen::MatrixXd spectral_norm_weight_grad(const Eigen::MatrixXd& grad_wbar,
                                          const NormalizedWeight& nw);

}  // namespace fgan

#endif
