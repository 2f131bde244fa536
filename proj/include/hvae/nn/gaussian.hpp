#pragma once

#include <span>
#include <string>
#include <vector>

#include "hvae/nn/layers.hpp"
#include "hvae/nn/rng.hpp"

namespace hvae::nn {

inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;

inline double clamp_log_var(double lv) { return lv < kLogVarMin ? kLogVarMin : (lv > kLogVarMax ? kLogVarMax : lv); }

/// KL( N(mu, exp(log_var)) || N(0, I) ) = -1/2 sum(1 + ln s2 - mu^2 - s2),
/// with ln s2 clamped to [kLogVarMin, kLogVarMax]. Always >= 0.
double kl_divergence(std::span<const double> mu, std::span<const double> log_var);

/// Accumulates weight * dKL/dmu and weight * dKL/dlog_var.
void kl_gradient(std::span<const double> mu, std::span<const double> log_var, double weight,
                 std::span<double> d_mu, std::span<double> d_log_var);

/// z = mu + exp(log_var / 2) * noise, log_var clamped first.
std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> log_var,
                                   std::span<const double> noise);
std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> log_var, Rng& rng);

/// Backpropagates dz through the reparameterization into d_mu/d_log_var
/// (accumulated). Clamped log-variances get zero gradient.
void reparameterize_backward(std::span<const double> log_var, std::span<const double> noise,
                             std::span<const double> dz, std::span<double> d_mu, std::span<double> d_log_var);

/// Two identity dense layers mapping a hidden state to mu and ln sigma^2.
struct GaussianHead {
    DenseLayer mu;
    DenseLayer log_var;

    static GaussianHead create(ParameterSet& params, const std::string& name, std::size_t in, std::size_t latent);
    void init(std::span<double> params, Rng& rng) const;
    std::size_t latent() const { return mu.out; }
};

}  // namespace hvae::nn
