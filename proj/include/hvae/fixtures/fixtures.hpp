#pragma once

// Synthetic stand-ins for hand-recorded drawing data: single strokes with a
// configurable touch pattern, and block-letter characters recorded as one
// continuous trajectory with zero-force pen-up travel between strokes.

#include <string>
#include <vector>

#include "hvae/core/trajectory.hpp"
#include "hvae/nn/rng.hpp"

namespace hvae::fixtures {

enum class StrokeKind { Straight, Zigzag, Arc };
enum class ForceProfile { Constant, Trapezoid };

StrokeKind parse_stroke_kind(const std::string& text);

struct SyntheticStrokeSpec {
    StrokeKind kind = StrokeKind::Straight;
    double amplitude = 0.0;  // zigzag lateral amplitude or arc sagitta [m]
    double frequency = 0.0;  // zigzag cycles per stroke
    double length = 0.1;     // chord length [m]
    double angle_deg = 0.0;  // chord direction
    ForceProfile profile = ForceProfile::Constant;
    double peak_force = 1.0;      // [N]
    double base_fraction = 0.4;   // trapezoid edge force as a fraction of peak
    double noise_sigma = 0.0;     // position noise [m]

    void validate() const;
};

/// A stroke starting at the origin, sampled at the recording period.
/// Zigzag sweeps sideways sinusoidally, so whole cycle counts end on the
/// chord. Noise draws are taken for every kind, so zigzag with zero
/// amplitude reproduces the straight stroke for the same seed.
Trajectory make_stroke(const SyntheticStrokeSpec& spec, std::size_t n_samples, nn::Rng& rng);

struct CharacterOptions {
    double speed = 0.1;             // pen speed [m/s]
    double travel_speed = 0.25;     // pen-up speed [m/s]
    double peak_force = 1.5;        // [N]
    double base_fraction = 0.4;
    double corner_jitter = 0.0;     // per-recording jitter of stroke corners [m]
    double noise_sigma = 0.0;       // per-sample position noise [m]
    std::size_t min_stroke_samples = 20;
    std::size_t idle_samples = 6;   // zero-force samples before and after
};

struct Character {
    std::string letter;
    std::vector<StrokeEndpoints> endpoints;  // generating strokes, in order
    Trajectory recording;                    // x, y, f_z at the recording period
};

/// Letters with a fixed block-capital stroke decomposition.
const std::string& supported_letters();
std::size_t canonical_stroke_count(char letter);

/// Throws on unsupported letters or non-positive scale.
Character make_character(char letter, double scale, nn::Rng& rng, const CharacterOptions& options = {});

}  // namespace hvae::fixtures
