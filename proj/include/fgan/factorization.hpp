#ifndef FGAN_FACTORIZATION_HPP
#define FGAN_FACTORIZATION_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace fgan {

/// Ordered, disjoint index sets covering {0,...,total_dim-1}, K >= 2 parts.
struct Partition {
    std::vector<std::vector<int>> parts;
    int total_dim = 0;

    static Partition make(std::vector<std::vector<int>> parts, int total_dim);
    int part_count() const { return static_cast<int>(parts.size()); }
    int part_dim(int i) const { return static_cast<int>(parts[i].size()); }
};

/// Validates disjointness / exact cover for an arbitrary list of index sets
/// over `dims` indices drawn from `scope`. Shared by Partition, hierarchy
/// sub-splits and autoregressive orderings.
void validate_cover(const std::vector<std::vector<int>>& parts, const std::vector<int>& scope,
                    const std::string& what);

std::vector<Eigen::VectorXd> split(const Eigen::VectorXd& x, const Partition& partition);
Eigen::VectorXd join(const std::vector<Eigen::VectorXd>& parts, const Partition& partition);

/// Column projection of a row-batch onto a dimension subset.
Eigen::MatrixXd project_columns(const Eigen::MatrixXd& batch, const std::vector<int>& dims);
/// Adds `grad` (over `dims` columns) back into the matching columns of `into`.
void scatter_add_columns(Eigen::MatrixXd& into, const Eigen::MatrixXd& grad,
                         const std::vector<int>& dims);

/// h(a) = a / (1 - a), mapping a discriminator probability in [0,1) to a
/// density ratio; h_inv is its inverse on [0, inf).
double h_map(double a);
double h_inv(double ratio);

enum class CombinationMode { joint, conditional, independent_marginals, hierarchical, autoregressive };

std::string to_string(CombinationMode mode);
CombinationMode combination_mode_from_string(const std::string& s);

/// Two-level split: for each top-level part, a sub-partition into J_i >= 1
/// sub-parts given as global dimension indices covering exactly that part.
struct HierarchySpec {
    std::vector<std::vector<std::vector<int>>> sub_parts_per_part;
};

/// T >= 2 ordered parts; step i >= 2 gets a dependency head pair over the
/// dims of parts 1..i.
struct AutoregressiveSpec {
    std::vector<std::vector<int>> ordered_parts;
    int total_dim = 0;
};

/// One marginal logit head: consumes the listed dims.
struct MarginalHeadSpec {
    std::vector<int> dims;
};

/// One dependency head pair: p and q heads consume `scope`; the p head's
/// negatives (and the q head's) are built by decoupling `scope` across
/// `decouple_parts`. has_p is false in independent-marginals mode.
struct DependencyPairSpec {
    std::vector<int> scope;
    std::vector<std::vector<int>> decouple_parts;
    bool has_p = true;
};

/// Normalized description of a sub-discriminator set: which heads exist and
/// which dims each consumes. Every combination mode lowers to this form; the
/// combined logit is always sum(p_j - q_j) + sum(marginal_i).
struct HeadLayout {
    CombinationMode mode = CombinationMode::joint;
    Partition partition;
    std::vector<MarginalHeadSpec> marginals;
    std::vector<DependencyPairSpec> pairs;

    int p_head_count() const;
};

HeadLayout make_joint_layout(const Partition& partition);
HeadLayout make_conditional_layout(const Partition& partition);
HeadLayout make_independent_layout(const Partition& partition);
HeadLayout make_hierarchical_layout(const Partition& partition, const HierarchySpec& hierarchy);
HeadLayout make_autoregressive_layout(const AutoregressiveSpec& spec);

/// Raw pre-sigmoid outputs of every head, ordered as in the layout.
/// p entries exist only for pairs with has_p.
struct HeadValues {
    std::vector<double> marginals;
    std::vector<double> p;
    std::vector<double> q;
};

/// sum(p_j) - sum(q_j) + sum(marginal_i): the pre-sigmoid combined logit.
double combine_logits(const HeadLayout& layout, const HeadValues& values);

/// A head set evaluated by closures over global x: the shape oracle heads
/// and trained heads share for evaluation-side comparisons.
struct LogitHeadSet {
    HeadLayout layout;
    std::vector<std::function<double(const Eigen::VectorXd&)>> marginal_fns;  // part slice input
    std::vector<std::function<double(const Eigen::VectorXd&)>> p_fns;         // scope slice input
    std::vector<std::function<double(const Eigen::VectorXd&)>> q_fns;

    HeadValues values_at(const Eigen::VectorXd& x) const;
    double combined_logit(const Eigen::VectorXd& x) const;
};

double sigmoid(double x);

}  // namespace fgan

#endif
