#include "fgan/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fgan {

void validate_cover(const std::vector<std::vector<int>>& parts, const std::vector<int>& scope,
                    const std::string& what) {
    std::vector<int> seen;
    for (const auto& part : parts) {
        if (part.empty()) throw std::invalid_argument(what + ": empty part");
        seen.insert(seen.end(), part.begin(), part.end());
    }
    std::vector<int> sorted_seen = seen;
    std::sort(sorted_seen.begin(), sorted_seen.end());
    if (std::adjacent_find(sorted_seen.begin(), sorted_seen.end()) != sorted_seen.end())
        throw std::invalid_argument(what + ": parts overlap");
    std::vector<int> sorted_scope = scope;
    std::sort(sorted_scope.begin(), sorted_scope.end());
    if (sorted_seen != sorted_scope)
        throw std::invalid_argument(what + ": parts do not cover the index set exactly");
}

Partition Partition::make(std::vector<std::vector<int>> parts, int total_dim) {
    if (parts.size() < 2) throw std::invalid_argument("Partition: need K >= 2 parts");
    if (total_dim <= 0) throw std::invalid_argument("Partition: total_dim must be positive");
    std::vector<int> scope(total_dim);
    for (int i = 0; i < total_dim; ++i) scope[i] = i;
    validate_cover(parts, scope, "Partition");
    Partition p;
    p.parts = std::move(parts);
    p.total_dim = total_dim;
    return p;
}

std::vector<Eigen::VectorXd> split(const Eigen::VectorXd& x, const Partition& partition) {
    if (x.size() != partition.total_dim) {
        std::ostringstream msg;
        msg << "split: vector has length " << x.size() << ", partition covers "
            << partition.total_dim;
        throw std::invalid_argument(msg.str());
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(partition.parts.size());
    for (const auto& dims : partition.parts) {
        Eigen::VectorXd part(dims.size());
        for (std::size_t j = 0; j < dims.size(); ++j) part(j) = x(dims[j]);
        out.push_back(std::move(part));
    }
    return out;
}

Eigen::VectorXd join(const std::vector<Eigen::VectorXd>& parts, const Partition& partition) {
    if (parts.size() != partition.parts.size())
        throw std::invalid_argument("join: part count mismatch");
    Eigen::VectorXd x(partition.total_dim);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& dims = partition.parts[i];
        if (static_cast<std::size_t>(parts[i].size()) != dims.size())
            throw std::invalid_argument("join: part length mismatch");
        for (std::size_t j = 0; j < dims.size(); ++j) x(dims[j]) = parts[i](j);
    }
    return x;
}

Eigen::MatrixXd project_columns(const Eigen::MatrixXd& batch, const std::vector<int>& dims) {
    Eigen::MatrixXd out(batch.rows(), dims.size());
    for (std::size_t j = 0; j < dims.size(); ++j) out.col(j) = batch.col(dims[j]);
    return out;
}

void scatter_add_columns(Eigen::MatrixXd& into, const Eigen::MatrixXd& grad,
                         const std::vector<int>& dims) {
    if (grad.cols() != static_cast<Eigen::Index>(dims.size()) || grad.rows() != into.rows())
        throw std::invalid_argument("scatter_add_columns: shape mismatch");
    for (std::size_t j = 0; j < dims.size(); ++j) into.col(dims[j]) += grad.col(j);
}

double h_map(double a) {
    if (!(a >= 0.0 && a < 1.0)) throw std::domain_error("h_map: argument must lie in [0, 1)");
    return a / (1.0 - a);
}

double h_inv(double ratio) {
    if (!(ratio >= 0.0)) throw std::domain_error("h_inv: ratio must be non-negative");
    return ratio / (1.0 + ratio);
}

std::string to_string(CombinationMode mode) {
    switch (mode) {
        case CombinationMode::joint: return "joint";
        case CombinationMode::conditional: return "conditional";
        case CombinationMode::independent_marginals: return "independent_marginals";
        case CombinationMode::hierarchical: return "hierarchical";
        case CombinationMode::autoregressive: return "autoregressive";
    }
    return "?";
}

CombinationMode combination_mode_from_string(const std::string& s) {
    if (s == "joint") return CombinationMode::joint;
    if (s == "conditional") return CombinationMode::conditional;
    if (s == "independent_marginals") return CombinationMode::independent_marginals;
    if (s == "hierarchical") return CombinationMode::hierarchical;
    if (s == "autoregressive") return CombinationMode::autoregressive;
    throw std::invalid_argument("unknown combination mode: " + s);
}

int HeadLayout::p_head_count() const {
    int n = 0;
    for (const auto& pr : pairs) n += pr.has_p ? 1 : 0;
    return n;
}

namespace {

std::vector<int> full_scope(const Partition& partition) {
    std::vector<int> scope(partition.total_dim);
    for (int i = 0; i < partition.total_dim; ++i) scope[i] = i;
    return scope;
}

}  // namespace

HeadLayout make_joint_layout(const Partition& partition) {
    HeadLayout layout;
    layout.mode = CombinationMode::joint;
    layout.partition = partition;
    for (const auto& dims : partition.parts) layout.marginals.push_back({dims});
    layout.pairs.push_back({full_scope(partition), partition.parts, true});
    return layout;
}

HeadLayout make_conditional_layout(const Partition& partition) {
    // Part 0 is the conditioning input: no marginal head for it.
    HeadLayout layout;
    layout.mode = CombinationMode::conditional;
    layout.partition = partition;
    for (std::size_t i = 1; i < partition.parts.size(); ++i)
        layout.marginals.push_back({partition.parts[i]});
    layout.pairs.push_back({full_scope(partition), partition.parts, true});
    return layout;
}

HeadLayout make_independent_layout(const Partition& partition) {
    HeadLayout layout;
    layout.mode = CombinationMode::independent_marginals;
    layout.partition = partition;
    for (const auto& dims : partition.parts) layout.marginals.push_back({dims});
    layout.pairs.push_back({full_scope(partition), partition.parts, false});
    return layout;
}

HeadLayout make_hierarchical_layout(const Partition& partition, const HierarchySpec& hierarchy) {
    if (hierarchy.sub_parts_per_part.size() != partition.parts.size())
        throw std::invalid_argument("hierarchical layout: one sub-partition per part required");
    HeadLayout layout;
    layout.mode = CombinationMode::hierarchical;
    layout.partition = partition;
    layout.pairs.push_back({full_scope(partition), partition.parts, true});
    for (std::size_t i = 0; i < partition.parts.size(); ++i) {
        const auto& subs = hierarchy.sub_parts_per_part[i];
        if (subs.empty()) throw std::invalid_argument("hierarchical layout: J_i must be >= 1");
        validate_cover(subs, partition.parts[i], "hierarchical sub-partition");
        // A single sub-part makes the group dependency trivial (c^i == 1):
        // no group pair is created, only the sub-marginal head.
        if (subs.size() > 1) layout.pairs.push_back({partition.parts[i], subs, true});
        for (const auto& sub : subs) layout.marginals.push_back({sub});
    }
    return layout;
}

HeadLayout make_autoregressive_layout(const AutoregressiveSpec& spec) {
    if (spec.ordered_parts.size() < 2)
        throw std::invalid_argument("autoregressive layout: need T >= 2 parts");
    std::vector<int> scope(spec.total_dim);
    for (int i = 0; i < spec.total_dim; ++i) scope[i] = i;
    validate_cover(spec.ordered_parts, scope, "autoregressive parts");

    HeadLayout layout;
    layout.mode = CombinationMode::autoregressive;
    layout.partition.parts = spec.ordered_parts;
    layout.partition.total_dim = spec.total_dim;
    std::vector<int> prefix = spec.ordered_parts[0];
    layout.marginals.push_back({spec.ordered_parts[0]});
    for (std::size_t i = 1; i < spec.ordered_parts.size(); ++i) {
        const auto& step = spec.ordered_parts[i];
        std::vector<int> pair_scope = prefix;
        pair_scope.insert(pair_scope.end(), step.begin(), step.end());
        layout.pairs.push_back({pair_scope, {prefix, step}, true});
        layout.marginals.push_back({step});
        prefix = pair_scope;
    }
    return layout;
}

double combine_logits(const HeadLayout& layout, const HeadValues& values) {
    if (values.marginals.size() != layout.marginals.size())
        throw std::invalid_argument("combine_logits: marginal value count mismatch");
    if (values.p.size() != static_cast<std::size_t>(layout.p_head_count()) ||
        values.q.size() != layout.pairs.size())
        throw std::invalid_argument("combine_logits: dependency value count mismatch");
    double logit = 0.0;
    std::size_t pi = 0;
    for (std::size_t j = 0; j < layout.pairs.size(); ++j) {
        if (layout.pairs[j].has_p) logit += values.p[pi++];
        logit -= values.q[j];
    }
    for (double d : values.marginals) logit += d;
    return logit;
}

HeadValues LogitHeadSet::values_at(const Eigen::VectorXd& x) const {
    HeadValues v;
    for (std::size_t i = 0; i < layout.marginals.size(); ++i) {
        Eigen::VectorXd slice = project_columns(x.transpose(), layout.marginals[i].dims).transpose();
        v.marginals.push_back(marginal_fns[i](slice));
    }
    std::size_t pi = 0;
    for (std::size_t j = 0; j < layout.pairs.size(); ++j) {
        Eigen::VectorXd slice = project_columns(x.transpose(), layout.pairs[j].scope).transpose();
        if (layout.pairs[j].has_p) v.p.push_back(p_fns[pi++](slice));
        v.q.push_back(q_fns[j](slice));
    }
    return v;
}

double LogitHeadSet::combined_logit(const Eigen::VectorXd& x) const {
    return combine_logits(layout, values_at(x));
}

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace fgan
