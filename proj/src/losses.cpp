#include "fgan/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace fgan {

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

namespace {

double sigma(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

double disc_loss(const Eigen::VectorXd& real_logits, const Eigen::VectorXd& fake_logits) {
    if (real_logits.size() == 0 || fake_logits.size() == 0)
        throw std::invalid_argument("disc_loss: empty batch");
    double loss = 0.0;
    for (int i = 0; i < real_logits.size(); ++i) loss += softplus(-real_logits(i));
    loss /= static_cast<double>(real_logits.size());
    double fake = 0.0;
    for (int i = 0; i < fake_logits.size(); ++i) fake += softplus(fake_logits(i));
    return loss + fake / static_cast<double>(fake_logits.size());
}

DiscLossGrads disc_loss_grads(const Eigen::VectorXd& real_logits,
                              const Eigen::VectorXd& fake_logits) {
    if (real_logits.size() == 0 || fake_logits.size() == 0)
        throw std::invalid_argument("disc_loss_grads: empty batch");
    DiscLossGrads g;
    g.real.resize(real_logits.size());
    g.fake.resize(fake_logits.size());
    double nr = static_cast<double>(real_logits.size());
    double nf = static_cast<double>(fake_logits.size());
    for (int i = 0; i < real_logits.size(); ++i) g.real(i) = (sigma(real_logits(i)) - 1.0) / nr;
    for (int i = 0; i < fake_logits.size(); ++i) g.fake(i) = sigma(fake_logits(i)) / nf;
    return g;
}

double gen_loss(const Eigen::VectorXd& fake_combined_logits) {
    if (fake_combined_logits.size() == 0) throw std::invalid_argument("gen_loss: empty batch");
    double loss = 0.0;
    for (int i = 0; i < fake_combined_logits.size(); ++i)
        loss += softplus(-fake_combined_logits(i));
    return loss / static_cast<double>(fake_combined_logits.size());
}

Eigen::VectorXd gen_loss_grads(const Eigen::VectorXd& fake_combined_logits) {
    if (fake_combined_logits.size() == 0) throw std::invalid_argument("gen_loss_grads: empty batch");
    Eigen::VectorXd g(fake_combined_logits.size());
    double n = static_cast<double>(fake_combined_logits.size());
    for (int i = 0; i < fake_combined_logits.size(); ++i)
        g(i) = (sigma(fake_combined_logits(i)) - 1.0) / n;
    return g;
}

}  // namespace fgan
