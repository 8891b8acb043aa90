#include "fgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fgan {

namespace {

constexpr char kMagic[5] = {'F', 'G', 'A', 'N', '1'};

void write_i64(std::ostream& os, std::int64_t value) {
    unsigned char buf[8];
    auto u = static_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(buf), 8);
}

void write_f64(std::ostream& os, double value) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(value);
    write_i64(os, static_cast<std::int64_t>(u));
}

std::int64_t read_i64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    if (!is) throw std::runtime_error("checkpoint truncated");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<std::int64_t>(u);
}

double read_f64(std::istream& is) {
    return std::bit_cast<double>(static_cast<std::uint64_t>(read_i64(is)));
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) write_f64(os, m(r, c));
    }
}

void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) write_f64(os, v(i));
}

Eigen::MatrixXd read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = read_f64(is);
    }
    return m;
}

Eigen::VectorXd read_vector(std::istream& is, Eigen::Index size) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = read_f64(is);
    return v;
}

void write_param_block(std::ostream& os, const std::vector<Eigen::MatrixXd>& weights,
                       const std::vector<Eigen::VectorXd>& biases) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        write_matrix(os, weights[l]);
        write_vector(os, biases[l]);
    }
}

void read_param_block(std::istream& is, const std::vector<std::int64_t>& dims,
                      std::vector<Eigen::MatrixXd>& weights,
                      std::vector<Eigen::VectorXd>& biases) {
    const std::size_t layers = dims.size() - 1;
    weights.resize(layers);
    biases.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        weights[l] = read_matrix(is, dims[l + 1], dims[l]);
        biases[l] = read_vector(is, dims[l + 1]);
    }
}

}  // namespace

NetworkSnapshot snapshot_network(const DenseNet& net, const AdamState& adam) {
    NetworkSnapshot snap;
    snap.layer_dims.reserve(net.layer_dims.size());
    for (int d : net.layer_dims) snap.layer_dims.push_back(d);
    snap.weights = net.weights;
    snap.biases = net.biases;
    snap.adam_step_count = adam.step_count;
    snap.m_weights = adam.m_weights;
    snap.m_biases = adam.m_biases;
    snap.v_weights = adam.v_weights;
    snap.v_biases = adam.v_biases;
    return snap;
}

void apply_snapshot(const NetworkSnapshot& snap, DenseNet& net, AdamState& adam) {
    if (snap.layer_dims.size() != net.layer_dims.size()) {
        throw std::runtime_error("snapshot layer count does not match network");
    }
    for (std::size_t i = 0; i < snap.layer_dims.size(); ++i) {
        if (snap.layer_dims[i] != net.layer_dims[i]) {
            throw std::runtime_error("snapshot layer dims do not match network");
        }
    }
    net.weights = snap.weights;
    net.biases = snap.biases;
    adam.step_count = snap.adam_step_count;
    adam.m_weights = snap.m_weights;
    adam.m_biases = snap.m_biases;
    adam.v_weights = snap.v_weights;
    adam.v_biases = snap.v_biases;
}

void save_checkpoint(const std::string& path, const std::vector<NetworkSnapshot>& networks) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_i64(os, static_cast<std::int64_t>(networks.size()));
    for (const NetworkSnapshot& snap : networks) {
        write_i64(os, static_cast<std::int64_t>(snap.layer_dims.size()) - 1);
        for (std::int64_t d : snap.layer_dims) write_i64(os, d);
        write_param_block(os, snap.weights, snap.biases);
        write_i64(os, snap.adam_step_count);
        write_param_block(os, snap.m_weights, snap.m_biases);
        write_param_block(os, snap.v_weights, snap.v_biases);
    }
    if (!os) throw std::runtime_error("failed writing checkpoint: " + path);
}

std::vector<NetworkSnapshot> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[sizeof(kMagic)];
    is.read(magic, sizeof(kMagic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("bad checkpoint magic in " + path);
    }
    std::int64_t count = read_i64(is);
    if (count < 0 || count > 1'000'000) throw std::runtime_error("implausible network count");
    std::vector<NetworkSnapshot> networks;
    networks.reserve(static_cast<std::size_t>(count));
    for (std::int64_t n = 0; n < count; ++n) {
        NetworkSnapshot snap;
        std::int64_t layers = read_i64(is);
        if (layers < 1 || layers > 1'000'000) throw std::runtime_error("implausible layer count");
        snap.layer_dims.resize(static_cast<std::size_t>(layers) + 1);
        for (std::int64_t& d : snap.layer_dims) {
            d = read_i64(is);
            if (d < 1) throw std::runtime_error("implausible layer dim");
        }
        read_param_block(is, snap.layer_dims, snap.weights, snap.biases);
        snap.adam_step_count = read_i64(is);
        read_param_block(is, snap.layer_dims, snap.m_weights, snap.m_biases);
        read_param_block(is, snap.layer_dims, snap.v_weights, snap.v_biases);
        networks.push_back(std::move(snap));
    }
    return networks;
}

}  // namespace fgan
