#pragma once

// Axis-decoupled impedance-controlled point-mass plant with a unilateral
// spring surface below the tool and a velocity-based disturbance observer.
//
// Per axis: acc_ref = Kp (x_cmd - x) + Kd (v_cmd - v_f), where v_f is the
// measured velocity through a first-order derivative filter. With force
// control on, the z axis regulates contact force instead of height:
// acc_ref_z = Kd_z (0 - v_f) - Kf (f_cmd - f), the minus because the surface
// reaction f acts along +z. The applied force is
// u = I acc_ref - d_hat, d_hat being the observer's estimate of all external
// force (contact plus disturbance).

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "hvae/compose/composer.hpp"

namespace hvae::replay {

inline constexpr std::size_t kAxes = 3;  // x, y, z
using Axes = std::array<double, kAxes>;

struct ControllerGains {
    Axes kp{500.0, 500.0, 100.0};  // [1/s^2]
    Axes kd{35.0, 35.0, 200.0};    // [1/s]
    Axes kf{0.0, 0.0, 0.15};       // [m/(N s^2)]
    Axes inertia{1.6, 0.72, 0.32}; // nominal and plant mass per axis
    double cutoff_hz = 10.0;       // derivative filter and observer; 0 disables the filter
    double ts = 0.001;             // [s]
    /// Keep Kp_z active while force control is on (literal parallel law).
    bool z_position_in_force_mode = false;

    void validate() const;
};

struct PlantParams {
    double k_env = 1e4;          // [N/m]
    double surface_height = 0.0; // [m]

    void validate() const;
    double contact_force(double z) const { return z < surface_height ? k_env * (surface_height - z) : 0.0; }
};

struct ReplayConfig {
    ControllerGains gains;
    PlantParams plant;
};

/// key = value text; '#' starts a comment. Keys: Kp, Kd, Kf, I (3 or 6
/// comma-separated values, only the translational first three are used),
/// g, Ts, K_env, surface_height, z_position_in_force_mode. Missing keys keep
/// their defaults; unknown keys are an error.
ReplayConfig parse_config(std::istream& in);
ReplayConfig load_config(const std::string& path);
void write_config(std::ostream& out, const ReplayConfig& config);

struct DobState {
    double w = 0.0;
};

/// Starts the observer at a zero estimate for the current velocity.
DobState dob_init(double inertia, double velocity, double cutoff_rad);

/// One observer step. applied_force acted over the step that began at
/// velocity_prev and ended at velocity_now. Returns the estimate of the
/// external force at the end of the step.
double dob_step(DobState& state, double inertia, double applied_force, double velocity_prev, double velocity_now,
                double cutoff_rad, double ts);

struct Command {
    Axes position{};  // z is the height command
    Axes velocity{};
    double force = 0.0;  // desired contact force along z
};

struct PlantState {
    Axes position{};
    Axes velocity{};
    Axes filtered_velocity{};
    Axes disturbance_estimate{};
    std::array<DobState, kAxes> dob{};
    double contact_force = 0.0;
    double time = 0.0;
};

struct StepOptions {
    bool force_control = true;
    bool dob = true;
    Axes disturbance{};  // external force per axis [N]
};

PlantState make_state(const ReplayConfig& config, const Axes& position, const Axes& velocity = {});

/// One control period: control law, plant integration (semi-implicit
/// Euler), observer and filter updates. Throws on a non-finite state.
PlantState control_step(const ReplayConfig& config, const PlantState& state, const Command& command,
                        const StepOptions& options);

struct ReplayOptions {
    bool force_control = true;
    bool dob = true;
    /// Reference height below the surface, e.g. the spring-law depth for
    /// the nominal force when replaying without force control [m].
    double reference_depth = 0.0;
    double height_offset = 0.0;  // z command relative to the reference height [m]
    Axes disturbance{};
};

struct ReplayLog {
    double ts = 0.0;
    std::vector<double> time;
    std::vector<int> stroke;
    std::vector<Axes> position_cmd;
    std::vector<Axes> position;
    std::vector<double> force_cmd;
    std::vector<double> force;
    std::vector<Axes> disturbance_estimate;
    ConfigEntries config;

    std::size_t size() const { return time.size(); }
};

/// Replays the strokes back to back at the controller period. Missing v_x/v_y
/// channels command zero velocity; a missing f_z commands zero force. The z
/// command is surface - reference_depth + height_offset. The plant starts at
/// rest at the first command with z at the commanded height.
ReplayLog run_replay(const ReplayConfig& config, const MultiStrokeTrajectory& traj, const ReplayOptions& options);

void write_log(std::ostream& out, const ReplayLog& log);
void save_log(const std::string& path, const ReplayLog& log);

}  // namespace hvae::replay
