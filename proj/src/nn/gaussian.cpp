#include "hvae/nn/gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace hvae::nn {

namespace {
void check_pair(std::span<const double> mu, std::span<const double> log_var) {
    if (mu.size() != log_var.size()) throw std::invalid_argument("mu and log_var lengths differ");
}
bool inside_clamp(double lv) { return lv > kLogVarMin && lv < kLogVarMax; }
}  // namespace

double kl_divergence(std::span<const double> mu, std::span<const double> log_var) {
    check_pair(mu, log_var);
    double sum = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
        if (!std::isfinite(mu[j]) || !std::isfinite(log_var[j]))
            throw std::invalid_argument("kl_divergence: non-finite input");
        const double lv = clamp_log_var(log_var[j]);
        sum += 1.0 + lv - mu[j] * mu[j] - std::exp(lv);
    }
    return -0.5 * sum;
}

void kl_gradient(std::span<const double> mu, std::span<const double> log_var, double weight,
                 std::span<double> d_mu, std::span<double> d_log_var) {
    check_pair(mu, log_var);
    for (std::size_t j = 0; j < mu.size(); ++j) {
        d_mu[j] += weight * mu[j];
        if (inside_clamp(log_var[j])) d_log_var[j] += weight * 0.5 * (std::exp(log_var[j]) - 1.0);
    }
}

std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> log_var,
                                   std::span<const double> noise) {
    check_pair(mu, log_var);
    if (noise.size() != mu.size()) throw std::invalid_argument("reparameterize: noise length mismatch");
    std::vector<double> z(mu.size());
    for (std::size_t j = 0; j < mu.size(); ++j) z[j] = mu[j] + std::exp(0.5 * clamp_log_var(log_var[j])) * noise[j];
    return z;
}

std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> log_var, Rng& rng) {
    auto noise = rng.normal_vector(mu.size());
    return reparameterize(mu, log_var, noise);
}

void reparameterize_backward(std::span<const double> log_var, std::span<const double> noise,
                             std::span<const double> dz, std::span<double> d_mu, std::span<double> d_log_var) {
    for (std::size_t j = 0; j < dz.size(); ++j) {
        d_mu[j] += dz[j];
        if (inside_clamp(log_var[j])) d_log_var[j] += dz[j] * noise[j] * 0.5 * std::exp(0.5 * log_var[j]);
    }
}

GaussianHead GaussianHead::create(ParameterSet& params, const std::string& name, std::size_t in,
                                  std::size_t latent) {
    return {DenseLayer::create(params, name + ".mu", in, latent, Activation::Identity),
            DenseLayer::create(params, name + ".log_var", in, latent, Activation::Identity)};
}

void GaussianHead::init(std::span<double> params, Rng& rng) const {
    mu.init(params, rng);
    log_var.init(params, rng);
}

}  // namespace hvae::nn
