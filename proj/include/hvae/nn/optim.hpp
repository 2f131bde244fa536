#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hvae::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction.
class AdamState {
public:
    AdamState(std::size_t parameter_count, AdamConfig config = {});

    /// Applies one update in place. Throws on size mismatch.
    void step(std::span<double> params, std::span<const double> grads);

    long long steps() const { return step_; }
    const AdamConfig& config() const { return config_; }
    std::span<const double> first_moment() const { return m_; }
    std::span<const double> second_moment() const { return v_; }

private:
    AdamConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    long long step_ = 0;
};

/// Rescales grads so their L2 norm is at most max_norm. Returns the norm
/// before clipping.
double clip_global_norm(std::span<double> grads, double max_norm);

/// Loss callback for grad_check: returns the loss at params and, when grad
/// is non-empty, writes the analytic gradient into it.
using LossFunction = std::function<double(std::span<const double> params, std::span<double> grad)>;

struct GradCheckOptions {
    std::size_t coordinates = 400;  // checks all parameters when there are fewer
    double step = 1e-5;
    double floor = 1e-4;            // denominator floor for tiny gradients
    std::uint64_t seed = 7;
};

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
};

/// Central finite differences against the analytic gradient. The relative
/// error of one coordinate is |analytic - numeric| / max(|numeric|, floor).
GradCheckResult grad_check(std::span<const double> params, const LossFunction& loss, GradCheckOptions options = {});

}  // namespace hvae::nn
