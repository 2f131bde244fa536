#pragma once

// Lower model: a conditional recurrent VAE over origin-offset strokes (the
// "touch"). The condition is the stroke's final offset sample, fed to every
// encoder and decoder step. The decoder is open-loop: stacked LSTMs unrolled
// N steps on [z; condition; phase] with a per-step tanh + linear readout.

#include <cstdint>
#include <span>
#include <vector>

#include "hvae/core/normalization.hpp"
#include "hvae/core/text.hpp"
#include "hvae/core/trajectory.hpp"
#include "hvae/models/point_model.hpp"
#include "hvae/models/training.hpp"
#include "hvae/nn/gaussian.hpp"
#include "hvae/nn/layers.hpp"

namespace hvae {

struct TrajModelConfig {
    std::size_t hidden = 256;
    std::size_t layers = 2;
    std::size_t latent = 3;
    std::size_t readout = 256;
    std::size_t samples = 100;     // N
    bool condition_force = true;   // include force channels in the condition
    bool phase_input = true;       // feed n / (N - 1) to the decoder

    bool operator==(const TrajModelConfig&) const = default;
};

struct TrajBatch {
    std::size_t samples = 0;
    std::size_t width = 0;
    std::size_t cond_width = 0;
    std::vector<double> data;  // items x samples x width, normalized
    std::vector<double> cond;  // items x cond_width, normalized

    std::size_t size() const { return width == 0 || samples == 0 ? 0 : data.size() / (samples * width); }
};

struct DecodedStroke {
    Trajectory trajectory;  // offset coordinates, first position sample exactly zero
    double end_error = 0.0; // planar distance of the last sample from the endpoint label
};

/// Forward-difference derivative: (x[n+1] - x[n]) / sample_period, N - 1
/// samples on the same schema.
Trajectory derivative_sequence(const Trajectory& traj);

class TrajModel {
public:
    TrajModel(TrajModelConfig config, ChannelSchema schema, NormalizationStats stats, double sample_period,
              std::uint64_t seed);

    /// Fits normalization on offset strokes (each of length config.samples,
    /// starting at the origin) and initializes.
    static TrajModel create(TrajModelConfig config, const std::vector<Trajectory>& offset_strokes, std::uint64_t seed);

    const TrajModelConfig& config() const { return config_; }
    const ChannelSchema& schema() const { return schema_; }
    const NormalizationStats& stats() const { return stats_; }
    double sample_period() const { return sample_period_; }
    nn::ParameterSet& parameters() { return params_; }
    const nn::ParameterSet& parameters() const { return params_; }
    const std::vector<std::size_t>& condition_channels() const { return cond_idx_; }
    const std::vector<std::size_t>& position_channels() const { return pos_idx_; }

    ConfigEntries run_config;

    Posterior encode(const Trajectory& offset_stroke) const;
    /// endpoint: the label x_end' in offset workspace units, one value per
    /// schema channel.
    DecodedStroke decode(std::span<const double> z, const Sample& endpoint) const;

    TrajBatch make_batch(std::span<const Trajectory> offset_strokes) const;

    /// (1/N) sum |x_hat - x|^2 + (1/(N-1)) sum |D x_hat - D x|^2 + KL per
    /// item, batch-averaged. D is the forward difference over normalized
    /// time n / (N - 1). noise is items x latent; grad may be empty.
    LossTerms loss(std::span<const double> params, const TrajBatch& batch, std::span<const double> noise,
                   std::span<double> grad) const;
    LossTerms loss(const TrajBatch& batch, nn::Rng& rng, std::span<double> grad) const;

    std::vector<nn::LstmLayer> encoder;
    nn::GaussianHead head;
    std::vector<nn::LstmLayer> decoder;
    nn::DenseLayer readout;
    nn::DenseLayer output;

private:
    void build();
    void check_stroke(const Trajectory& t) const;
    std::size_t decoder_input_width() const;
    void condition_vector(std::span<const double> final_sample, std::span<double> out) const;
    Posterior encode_normalized(std::span<const double> params, std::span<const double> rows,
                                std::span<const double> cond, std::vector<nn::LstmLayer::Sequence>& caches) const;
    /// Normalized decoder output (N x C) with the first position sample clamped.
    void decode_normalized(std::span<const double> params, std::span<const double> z, std::span<const double> cond,
                           std::vector<nn::LstmLayer::Sequence>& caches, std::vector<double>& readouts,
                           std::vector<double>& out) const;

    TrajModelConfig config_;
    ChannelSchema schema_;
    NormalizationStats stats_;
    double sample_period_;
    std::vector<std::size_t> cond_idx_;
    std::vector<std::size_t> pos_idx_;
    std::vector<double> origin_;  // normalized value of 0 per channel
    nn::ParameterSet params_;
};

TrainHistory train_traj(TrajModel& model, const std::vector<Trajectory>& offset_strokes, const TrainOptions& options);

}  // namespace hvae
