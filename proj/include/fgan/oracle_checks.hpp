#ifndef FGAN_ORACLE_CHECKS_HPP
#define FGAN_ORACLE_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace fgan {

struct CheckResult {
    std::string name;
    bool pass = false;
    double max_err = 0.0;
    double tol = 0.0;
    std::string detail;
};

struct OracleCheckOptions {
    /// Test seam: flips the sign of the q-dependency term inside the combined
    /// logit of the Theorem-1 identity check, which must make it fail.
    bool flip_q_sign = false;
    std::uint64_t seed = 20240817;
};

/// Analytic-oracle identity suites:
///   combined-logit identity (sigmoid-of-sums vs product-of-ratios form),
///   oracle-head exactness on Gaussian fixtures,
///   combination-mode reduction identities,
///   the h bijection,
///   spectral normalization against an SVD oracle,
///   finite-difference gradient checks of every trainable operation.
std::vector<CheckResult> run_oracle_checks(const OracleCheckOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& results);
std::string format_check_report(const std::vector<CheckResult>& results);

}  // namespace fgan

#endif
