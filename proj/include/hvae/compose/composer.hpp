#pragma once

// Generation: the point decoder proposes stroke endpoints, each stroke's
// offset endpoint conditions the trajectory decoder, and the start point is
// added back. Also spline resampling for replay and file export.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hvae/core/text.hpp"
#include "hvae/core/trajectory.hpp"
#include "hvae/models/point_model.hpp"
#include "hvae/models/traj_model.hpp"

namespace hvae {

/// Strokes in workspace coordinates, in drawing order. Pen-up travel
/// between strokes is not represented.
struct MultiStrokeTrajectory {
    std::vector<Trajectory> strokes;
    ConfigEntries config;

    std::size_t total_samples() const;
    bool operator==(const MultiStrokeTrajectory& other) const { return strokes == other.strokes; }
};

struct ComposedPlan {
    std::shared_ptr<const PointModel> point_model;
    std::shared_ptr<const TrajModel> traj_model;
    std::vector<double> z_point;
    /// One latent per stroke, a single shared latent, or empty for the
    /// prior mean (all zeros).
    std::vector<std::vector<double>> z_traj;
    std::size_t m_count = 0;

    void validate() const;
};

struct Composition {
    MultiStrokeTrajectory trajectory;
    EndpointSequence endpoints;      // decoded by the point model
    std::vector<double> end_errors;  // per stroke, distance of the last sample from the decoded end
};

/// Throws std::invalid_argument unless both models share one channel set.
void check_compatible(const PointModel& point, const TrajModel& traj);

Composition compose(const ComposedPlan& plan);

/// The plan with its lower decoder replaced; the point model is untouched.
ComposedPlan swap_models(const ComposedPlan& plan, std::shared_ptr<const TrajModel> traj_model);

struct ResampleOptions {
    double target_period = 0.001;
    /// Append v_x/v_y (or overwrite existing ones) from the spline's first
    /// derivative of x/y.
    bool add_velocity = true;
};

struct Resampled {
    MultiStrokeTrajectory trajectory;
    std::vector<std::string> warnings;
};

/// floor((n - 1) * source_period / target_period) + 1
std::size_t resampled_count(std::size_t n, double source_period, double target_period);

/// Natural cubic spline per channel and stroke, evaluated on the target
/// grid. Strokes with fewer than 4 samples fall back to linear
/// interpolation and add a warning.
Resampled resample_spline(const MultiStrokeTrajectory& traj, const ResampleOptions& options = {});

/// Natural cubic spline through equally spaced knots.
class NaturalSpline {
public:
    NaturalSpline(std::vector<double> values, double spacing);
    /// Value and first derivative at interval i, local offset u in [0, h].
    double value(std::size_t i, double u) const;
    double derivative(std::size_t i, double u) const;
    std::size_t knots() const { return y_.size(); }

private:
    std::vector<double> y_;
    std::vector<double> m_;  // second derivatives
    double h_;
};

void write_csv(std::ostream& out, const MultiStrokeTrajectory& traj);
MultiStrokeTrajectory read_csv(std::istream& in);
void save_csv(const std::string& path, const MultiStrokeTrajectory& traj);
MultiStrokeTrajectory load_csv(const std::string& path);

struct SvgOptions {
    double pixels_per_meter = 4000.0;
    double margin = 20.0;
    double min_width = 0.5;
    double max_width = 4.0;
};

/// One polyline per stroke; width follows the stroke's mean force. The
/// config entries go into a <metadata id="hvae-config"> block, one
/// XML-escaped key=value per line.
void write_svg(std::ostream& out, const MultiStrokeTrajectory& traj, const SvgOptions& options = {});
void save_svg(const std::string& path, const MultiStrokeTrajectory& traj, const SvgOptions& options = {});

}  // namespace hvae
