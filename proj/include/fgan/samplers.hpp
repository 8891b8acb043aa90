#ifndef FGAN_SAMPLERS_HPP
#define FGAN_SAMPLERS_HPP

#include <Eigen/Dense>
#include <vector>

#include "fgan/rng.hpp"

namespace fgan {

/// Rows drawn uniformly with replacement from a pool.
Eigen::MatrixXd sample_rows(const Eigen::MatrixXd& pool, int n, Rng& rng);

/// Builds joint-shaped rows whose parts come from independently chosen pool
/// rows: marginals preserved, cross-part coupling broken. `part_dims` lists
/// the column indices of each part.
Eigen::MatrixXd independent_real_batch(const Eigen::MatrixXd& pool,
                                       const std::vector<std::vector<int>>& part_dims,
                                       int batch_size, Rng& rng);

/// Permutes each part (except the first) across rows with an independent
/// uniform permutation, exactly preserving every per-part multiset.
Eigen::MatrixXd shuffle_fake_parts(const Eigen::MatrixXd& batch,
                                   const std::vector<std::vector<int>>& part_dims, Rng& rng);

}  // namespace fgan

#endif
