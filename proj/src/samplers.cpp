#include "fgan/samplers.hpp"

#include <numeric>
#include <stdexcept>

namespace fgan {

Eigen::MatrixXd sample_rows(const Eigen::MatrixXd& pool, int n, Rng& rng) {
    if (pool.rows() == 0) throw std::invalid_argument("sample_rows: empty pool");
    Eigen::MatrixXd out(n, pool.cols());
    for (int r = 0; r < n; ++r)
        out.row(r) = pool.row(static_cast<Eigen::Index>(rng.index(pool.rows())));
    return out;
}

Eigen::MatrixXd independent_real_batch(const Eigen::MatrixXd& pool,
                                       const std::vector<std::vector<int>>& part_dims,
                                       int batch_size, Rng& rng) {
    if (pool.rows() < 2)
        throw std::invalid_argument("independent_real_batch: need a pool of at least 2 rows");
    // Columns outside the listed parts stay zero; callers project them away.
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(batch_size, pool.cols());
    for (int r = 0; r < batch_size; ++r) {
        for (const auto& dims : part_dims) {
            Eigen::Index src = static_cast<Eigen::Index>(rng.index(pool.rows()));
            for (int d : dims) out(r, d) = pool(src, d);
        }
    }
    return out;
}

Eigen::MatrixXd shuffle_fake_parts(const Eigen::MatrixXd& batch,
                                   const std::vector<std::vector<int>>& part_dims, Rng& rng) {
    if (batch.rows() < 2)
        throw std::invalid_argument("shuffle_fake_parts: need a batch of at least 2 rows");
    Eigen::MatrixXd out = batch;
    std::vector<int> perm(batch.rows());
    for (std::size_t i = 1; i < part_dims.size(); ++i) {  // part 0 keeps the identity
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t j = perm.size() - 1; j > 0; --j)
            std::swap(perm[j], perm[rng.index(j + 1)]);
        for (Eigen::Index r = 0; r < batch.rows(); ++r)
            for (int d : part_dims[i]) out(r, d) = batch(perm[r], d);
    }
    return out;
}

}  // namespace fgan
