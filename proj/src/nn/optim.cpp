#include "hvae/nn/optim.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hvae/nn/rng.hpp"
#include "hvae/simd/kernels.hpp"

namespace hvae::nn {

AdamState::AdamState(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamState::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("adam: parameter/gradient shape mismatch");
    ++step_;
    const double t = static_cast<double>(step_);
    const double bias1 = 1.0 - std::pow(config_.beta1, t);
    const double bias2 = 1.0 - std::pow(config_.beta2, t);
    simd::kernels().adam(params.data(), grads.data(), m_.data(), v_.data(), params.size(), config_.beta1,
                         config_.beta2, config_.learning_rate / bias1, bias2, config_.epsilon);
}

double clip_global_norm(std::span<double> grads, double max_norm) {
    const double norm = std::sqrt(simd::kernels().dot(grads.data(), grads.data(), grads.size()));
    if (norm > max_norm && norm > 0.0) {
        const double s = max_norm / norm;
        for (auto& g : grads) g *= s;
    }
    return norm;
}

GradCheckResult grad_check(std::span<const double> params, const LossFunction& loss, GradCheckOptions options) {
    std::vector<double> theta(params.begin(), params.end());
    std::vector<double> analytic(theta.size(), 0.0);
    loss(theta, analytic);

    std::vector<std::size_t> coords(theta.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (coords.size() > options.coordinates) {
        Rng rng(options.seed);
        rng.shuffle(coords);
        coords.resize(options.coordinates);
    }

    GradCheckResult result;
    for (std::size_t idx : coords) {
        const double saved = theta[idx];
        theta[idx] = saved + options.step;
        const double plus = loss(theta, {});
        theta[idx] = saved - options.step;
        const double minus = loss(theta, {});
        theta[idx] = saved;
        const double numeric = (plus - minus) / (2.0 * options.step);
        const double err = std::abs(analytic[idx] - numeric) / std::max(std::abs(numeric), options.floor);
        ++result.checked;
        if (err > result.max_relative_error || result.checked == 1) {
            result.max_relative_error = err;
            result.worst_index = idx;
            result.worst_analytic = analytic[idx];
            result.worst_numeric = numeric;
        }
    }
    return result;
}

}  // namespace hvae::nn
