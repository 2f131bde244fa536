#include "hvae/models/training.hpp"

#include <cmath>
#include <numeric>

namespace hvae {

TrainHistory run_training(nn::ParameterSet& params, std::size_t item_count, std::size_t latent,
                          const TrainOptions& options, const BatchLoss& batch_loss) {
    TrainHistory history;
    if (options.epochs == 0) return history;
    if (item_count == 0) throw std::invalid_argument("training dataset is empty");
    if (options.batch_size == 0) throw std::invalid_argument("batch size must be positive");

    nn::Rng rng(options.seed);
    nn::AdamState adam(params.size(), options.adam);
    std::vector<double> grad(params.size());
    std::vector<std::size_t> order(item_count);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        LossTerms sum;
        for (std::size_t begin = 0; begin < item_count; begin += options.batch_size) {
            const std::size_t end = std::min(item_count, begin + options.batch_size);
            std::span<const std::size_t> items(order.data() + begin, end - begin);
            const auto noise = rng.normal_vector(items.size() * latent);
            std::fill(grad.begin(), grad.end(), 0.0);
            const LossTerms batch = batch_loss(items, noise, grad);
            if (!std::isfinite(batch.total)) throw TrainingDiverged(epoch, "non-finite loss");
            nn::clip_global_norm(grad, options.clip_norm);
            adam.step(params.values(), grad);
            const double w = static_cast<double>(items.size());
            sum.total += w * batch.total;
            sum.reconstruction += w * batch.reconstruction;
            sum.derivative += w * batch.derivative;
            sum.kl += w * batch.kl;
        }
        const double inv = 1.0 / static_cast<double>(item_count);
        LossTerms mean{sum.total * inv, sum.reconstruction * inv, sum.derivative * inv, sum.kl * inv};
        history.epochs.push_back(mean);
        if (options.on_epoch) options.on_epoch(epoch, mean);
    }
    return history;
}

}  // namespace hvae
