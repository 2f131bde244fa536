#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hvae/nn/optim.hpp"
#include "hvae/nn/parameters.hpp"
#include "hvae/nn/rng.hpp"

namespace hvae {

/// Batch-mean loss and its parts.
struct LossTerms {
    double total = 0.0;
    double reconstruction = 0.0;
    double derivative = 0.0;  // zero for the point model
    double kl = 0.0;
};

struct TrainOptions {
    std::size_t epochs = 0;
    std::size_t batch_size = 4;
    double clip_norm = 5.0;
    nn::AdamConfig adam{};
    std::uint64_t seed = 1;
    /// Called after every epoch with (epoch index, epoch-mean loss).
    std::function<void(std::size_t, const LossTerms&)> on_epoch;
};

struct TrainHistory {
    std::vector<LossTerms> epochs;
};

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(std::size_t epoch, const std::string& what)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

/// Evaluates a minibatch: given item indices and one latent noise vector per
/// item (items x latent), returns the batch-mean loss and writes its
/// gradient.
using BatchLoss = std::function<LossTerms(std::span<const std::size_t> items, std::span<const double> noise,
                                          std::span<double> grad)>;

/// Shuffled minibatch Adam with global-norm clipping. Epoch = one pass over
/// all items; the last batch may be short. Throws TrainingDiverged on a
/// non-finite loss.
TrainHistory run_training(nn::ParameterSet& params, std::size_t item_count, std::size_t latent,
                          const TrainOptions& options, const BatchLoss& batch_loss);

}  // namespace hvae
