#include "hvae/core/normalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hvae {

void NormalizationStats::validate() const {
    if (offset.size() != scale.size() || channels.size() != scale.size())
        throw std::invalid_argument("normalization stats have inconsistent widths");
    for (std::size_t c = 0; c < scale.size(); ++c) {
        if (!(scale[c] > 0.0) || !std::isfinite(scale[c]) || !std::isfinite(offset[c]))
            throw std::invalid_argument("normalization scale must be positive and finite");
    }
}

void NormalizationStats::normalize_row(std::span<const double> in, std::span<double> out) const {
    for (std::size_t c = 0; c < in.size(); ++c) out[c] = normalize(c, in[c]);
}

void NormalizationStats::denormalize_row(std::span<const double> in, std::span<double> out) const {
    for (std::size_t c = 0; c < in.size(); ++c) out[c] = denormalize(c, in[c]);
}

namespace {

NormalizationStats from_ranges(const std::vector<double>& lo, const std::vector<double>& hi,
                               std::vector<std::string> channels) {
    NormalizationStats stats;
    stats.channels = std::move(channels);
    for (std::size_t c = 0; c < lo.size(); ++c) {
        const double range = hi[c] - lo[c];
        if (range < kDegenerateRange) {
            stats.offset.push_back(0.5 * (lo[c] + hi[c]));
            stats.scale.push_back(1.0);
        } else {
            stats.offset.push_back(0.5 * (lo[c] + hi[c]));
            stats.scale.push_back(0.5 * range);
        }
    }
    return stats;
}

void check_matches(const Trajectory& traj, const NormalizationStats& stats) {
    stats.validate();
    if (stats.size() != traj.channels())
        throw std::invalid_argument("normalization stats do not match trajectory schema");
    for (std::size_t c = 0; c < stats.size(); ++c)
        if (stats.channels[c] != traj.schema()[c].name)
            throw std::invalid_argument("normalization stats channel '" + stats.channels[c] +
                                        "' does not match schema channel '" + traj.schema()[c].name + "'");
}

}  // namespace

NormalizationStats fit_stats(std::span<const Trajectory> dataset) {
    if (dataset.empty()) throw std::invalid_argument("cannot fit normalization on an empty dataset");
    const auto& schema = dataset.front().schema();
    const std::size_t width = schema.size();
    std::vector<double> lo(width, std::numeric_limits<double>::infinity());
    std::vector<double> hi(width, -std::numeric_limits<double>::infinity());
    for (const auto& traj : dataset) {
        if (!traj.schema().same_channels(schema))
            throw std::invalid_argument("dataset trajectories do not share a schema");
        for (std::size_t n = 0; n < traj.size(); ++n)
            for (std::size_t c = 0; c < width; ++c) {
                lo[c] = std::min(lo[c], traj.at(n, c));
                hi[c] = std::max(hi[c], traj.at(n, c));
            }
    }
    std::vector<std::string> names;
    for (const auto& ch : schema.channels()) names.push_back(ch.name);
    return from_ranges(lo, hi, std::move(names));
}

NormalizationStats fit_stats_rows(std::span<const std::vector<double>> rows, std::vector<std::string> channels) {
    if (rows.empty()) throw std::invalid_argument("cannot fit normalization on an empty dataset");
    const std::size_t width = channels.size();
    std::vector<double> lo(width, std::numeric_limits<double>::infinity());
    std::vector<double> hi(width, -std::numeric_limits<double>::infinity());
    for (const auto& row : rows) {
        if (row.size() != width) throw std::invalid_argument("row width does not match channel list");
        for (std::size_t c = 0; c < width; ++c) {
            lo[c] = std::min(lo[c], row[c]);
            hi[c] = std::max(hi[c], row[c]);
        }
    }
    return from_ranges(lo, hi, std::move(channels));
}

Trajectory normalize(const Trajectory& traj, const NormalizationStats& stats) {
    check_matches(traj, stats);
    std::vector<double> out(traj.data().size());
    for (std::size_t n = 0; n < traj.size(); ++n)
        stats.normalize_row(traj.row(n), std::span<double>(out).subspan(n * traj.channels(), traj.channels()));
    return Trajectory(traj.schema(), std::move(out));
}

Trajectory denormalize(const Trajectory& traj, const NormalizationStats& stats) {
    check_matches(traj, stats);
    std::vector<double> out(traj.data().size());
    for (std::size_t n = 0; n < traj.size(); ++n)
        stats.denormalize_row(traj.row(n), std::span<double>(out).subspan(n * traj.channels(), traj.channels()));
    return Trajectory(traj.schema(), std::move(out));
}

}  // namespace hvae
