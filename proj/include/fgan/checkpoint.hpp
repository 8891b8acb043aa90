#ifndef FGAN_CHECKPOINT_HPP
#define FGAN_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fgan/net.hpp"

namespace fgan {

/// Flat binary checkpoint layout (all integers little-endian int64, all
/// floats little-endian IEEE-754 binary64):
///
///   magic "FGAN1"
///   network_count
///   per network:
///     layer_count L
///     layer dims (L+1 values)
///     per layer: weight rows (row-major, out x in), then bias
///     adam step_count
///     per layer: first-moment weight rows, then first-moment bias
///     per layer: second-moment weight rows, then second-moment bias
///
/// Activations are not stored; they come from the experiment config that
/// reconstructs the networks.
struct NetworkSnapshot {
    std::vector<std::int64_t> layer_dims;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    std::int64_t adam_step_count = 0;
    std::vector<Eigen::MatrixXd> m_weights;
    std::vector<Eigen::VectorXd> m_biases;
    std::vector<Eigen::MatrixXd> v_weights;
    std::vector<Eigen::VectorXd> v_biases;
};

NetworkSnapshot snapshot_network(const DenseNet& net, const AdamState& adam);

/// Copies a snapshot's parameters and moments into an existing net/Adam pair.
/// Throws std::runtime_error when layer dimensions do not match.
void apply_snapshot(const NetworkSnapshot& snap, DenseNet& net, AdamState& adam);

void save_checkpoint(const std::string& path, const std::vector<NetworkSnapshot>& networks);

/// Throws std::runtime_error on missing file, bad magic, or truncation.
std::vector<NetworkSnapshot> load_checkpoint(const std::string& path);

}  // namespace fgan

#endif
