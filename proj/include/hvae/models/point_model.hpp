#pragma once

// Upper model: a recurrent VAE over the sequence of stroke endpoint pairs
// (x_start, x_end) of one character, i.e. its stroke order.
//
// Encoder: LSTM over the M pair vectors, Gaussian head on the last hidden
// state. Decoder: z -> tanh dense -> initial hidden state, then an LSTM
// unrolled M steps with z as the input at every step, and a per-step tanh
// dense + linear readout emitting one pair vector.

#include <cstdint>
#include <span>
#include <vector>

#include "hvae/core/normalization.hpp"
#include "hvae/core/text.hpp"
#include "hvae/core/trajectory.hpp"
#include "hvae/models/training.hpp"
#include "hvae/nn/gaussian.hpp"
#include "hvae/nn/layers.hpp"

namespace hvae {

using EndpointSequence = std::vector<StrokeEndpoints>;

struct PointModelConfig {
    std::size_t hidden = 64;
    std::size_t latent = 6;
    std::size_t readout = 64;
    std::size_t max_strokes = 8;

    bool operator==(const PointModelConfig&) const = default;
};

struct Posterior {
    std::vector<double> mu;
    std::vector<double> log_var;
};

/// Padded batch of normalized pair sequences with explicit lengths. Rows at
/// or beyond an item's length are padding and never read.
struct PointBatch {
    std::size_t max_len = 0;
    std::size_t width = 0;
    std::vector<double> data;          // items x max_len x width
    std::vector<std::size_t> lengths;  // per item

    std::size_t size() const { return lengths.size(); }
    std::span<const double> item(std::size_t b) const {
        return std::span<const double>(data).subspan(b * max_len * width, lengths[b] * width);
    }
};

class PointModel {
public:
    /// Fresh model with seeded initialization. schema is the per-sample
    /// channel set; stats normalize the 2C-wide pair vector.
    PointModel(PointModelConfig config, ChannelSchema schema, NormalizationStats stats, std::uint64_t seed);

    /// Fits pair normalization over the dataset, then initializes.
    static PointModel create(PointModelConfig config, const ChannelSchema& schema,
                             const std::vector<EndpointSequence>& dataset, std::uint64_t seed);

    const PointModelConfig& config() const { return config_; }
    const ChannelSchema& schema() const { return schema_; }
    const NormalizationStats& stats() const { return stats_; }
    nn::ParameterSet& parameters() { return params_; }
    const nn::ParameterSet& parameters() const { return params_; }
    std::size_t pair_width() const { return 2 * schema_.size(); }

    ConfigEntries run_config;

    /// Normalized pair vector [start; end] for one stroke.
    std::vector<double> pair_vector(const StrokeEndpoints& e) const;

    Posterior encode(const EndpointSequence& seq) const;
    EndpointSequence decode(std::span<const double> z, std::size_t m_count) const;

    PointBatch make_batch(std::span<const EndpointSequence> seqs, std::size_t max_len = 0) const;

    /// Objective per item: (1/M) sum_m |x_hat_m - x_m|^2 + KL,
    /// averaged over the batch. noise is items x latent. grad may be empty.
    LossTerms loss(std::span<const double> params, const PointBatch& batch, std::span<const double> noise,
                   std::span<double> grad) const;
    LossTerms loss(const PointBatch& batch, nn::Rng& rng, std::span<double> grad) const;

    // Layer layout, exposed for tests and serialization.
    nn::LstmLayer encoder;
    nn::GaussianHead head;
    nn::DenseLayer decoder_init;
    nn::LstmLayer decoder;
    nn::DenseLayer readout;
    nn::DenseLayer output;

private:
    void build();
    void check_sequence(const EndpointSequence& seq) const;
    Posterior encode_normalized(std::span<const double> params, std::span<const double> rows,
                                nn::LstmLayer::Sequence* cache) const;

    PointModelConfig config_;
    ChannelSchema schema_;
    NormalizationStats stats_;
    nn::ParameterSet params_;
};

/// Minibatch training on workspace-unit sequences.
TrainHistory train_point(PointModel& model, const std::vector<EndpointSequence>& dataset, const TrainOptions& options);

}  // namespace hvae
