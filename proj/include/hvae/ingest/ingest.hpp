#pragma once

#include <span>
#include <string>
#include <vector>

#include "hvae/core/trajectory.hpp"

namespace hvae::ingest {

/// Sample period of the motion-capture and force recordings.
inline constexpr double kRecordingPeriod = 0.008;

struct RawRecording {
    Trajectory trajectory;
    std::string label;
};

struct SegmentationConfig {
    double force_threshold = 0.25;  // N
    std::string force_channel = "f_z";
    std::size_t min_stroke_samples = 5;

    void validate() const;
};

/// Maximal contiguous runs with force >= threshold, in temporal order.
/// Runs shorter than min_stroke_samples are dropped. Throws when the force
/// channel is missing or no run survives ("no stroke found").
std::vector<Trajectory> segment_strokes(const RawRecording& rec, const SegmentationConfig& cfg);

/// First and last sample of each stroke, stroke_index counting from 1.
std::vector<StrokeEndpoints> extract_endpoints(std::span<const Trajectory> strokes);

/// Nearest-index selection of target_n samples; first and last samples are
/// kept bit-exact and the sample period is stretched accordingly.
Trajectory downsample(const Trajectory& traj, std::size_t target_n);

/// Linear interpolation onto target_n samples when the source is shorter;
/// downsample() otherwise.
Trajectory fit_length(const Trajectory& traj, std::size_t target_n);

struct OffsetResult {
    Trajectory trajectory;
    Sample start;
};

/// Subtracts the first sample from every position channel. Force and
/// velocity channels are left as recorded.
OffsetResult offset_to_origin(const Trajectory& traj);

/// Inverse of offset_to_origin.
Trajectory add_start(const Trajectory& offset, const Sample& start);

struct Translation {
    double dx = 0.0;
    double dy = 0.0;
};

enum class Pivot { Origin, Centroid };

/// Angles 0, step, 2 step, ... below 360 degrees.
std::vector<double> rotation_angles(double step_deg);

/// Every trajectory x every angle x every translation, in that nesting
/// order. Rotation acts on the x/y position channels and, when present, on
/// v_x/v_y; force is untouched. With Pivot::Centroid the rotation is about
/// the mean x/y of the whole dataset. An empty translation list means a
/// single zero translation. Angle 0 with zero translation copies the input.
std::vector<Trajectory> augment(std::span<const Trajectory> dataset, std::span<const double> angles_deg,
                                std::span<const Translation> translations, Pivot pivot = Pivot::Origin);

}  // namespace hvae::ingest
