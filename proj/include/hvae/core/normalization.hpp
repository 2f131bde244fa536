#pragma once

#include <span>
#include <string>
#include <vector>

#include "hvae/core/trajectory.hpp"

namespace hvae {

/// Per-channel affine map value -> (value - offset) / scale.
struct NormalizationStats {
    std::vector<std::string> channels;
    std::vector<double> offset;
    std::vector<double> scale;

    std::size_t size() const { return offset.size(); }
    void validate() const;

    double normalize(std::size_t c, double v) const { return (v - offset[c]) / scale[c]; }
    double denormalize(std::size_t c, double v) const { return v * scale[c] + offset[c]; }

    void normalize_row(std::span<const double> in, std::span<double> out) const;
    void denormalize_row(std::span<const double> in, std::span<double> out) const;

    bool operator==(const NormalizationStats&) const = default;
};

/// Ranges narrower than this get scale 1.
inline constexpr double kDegenerateRange = 1e-9;

/// Midrange offset and half-range scale per channel over every sample of
/// every trajectory, so the mapped dataset lies in [-1, 1].
NormalizationStats fit_stats(std::span<const Trajectory> dataset);

/// Same rule over raw rows of a fixed width (used for endpoint vectors).
NormalizationStats fit_stats_rows(std::span<const std::vector<double>> rows, std::vector<std::string> channels);

Trajectory normalize(const Trajectory& traj, const NormalizationStats& stats);
Trajectory denormalize(const Trajectory& traj, const NormalizationStats& stats);

}  // namespace hvae
