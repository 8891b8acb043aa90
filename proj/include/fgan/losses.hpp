#ifndef FGAN_LOSSES_HPP
#define FGAN_LOSSES_HPP

#include <Eigen/Dense>

namespace fgan {

/// log(1 + e^x) without overflow.
double softplus(double x);

/// Discriminator loss (to minimize): -[mean log sigma(real) + mean log(1 - sigma(fake))],
/// evaluated in logit space as mean softplus(-real) + mean softplus(fake).
double disc_loss(const Eigen::VectorXd& real_logits, const Eigen::VectorXd& fake_logits);

/// dLoss/d(real_logits) and dLoss/d(fake_logits).
struct DiscLossGrads {
    Eigen::VectorXd real;
    Eigen::VectorXd fake;
};
DiscLossGrads disc_loss_grads(const Eigen::VectorXd& real_logits,
                              const Eigen::VectorXd& fake_logits);

/// Non-saturating generator loss (to minimize): -mean log sigma(combined logit).
double gen_loss(const Eigen::VectorXd& fake_combined_logits);
Eigen::VectorXd gen_loss_grads(const Eigen::VectorXd& fake_combined_logits);

}  // namespace fgan

#endif
