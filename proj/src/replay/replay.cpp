#include "hvae/replay/replay.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace hvae::replay {

namespace {

double to_rad(double hz) { return 2.0 * std::numbers::pi * hz; }

bool all_nonneg(const Axes& a) {
    for (double v : a)
        if (!(v >= 0.0) || !std::isfinite(v)) return false;
    return true;
}

}  // namespace

void ControllerGains::validate() const {
    if (!all_nonneg(kp) || !all_nonneg(kd) || !all_nonneg(kf)) throw std::invalid_argument("gains must be >= 0");
    for (double m : inertia)
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("inertia must be positive");
    if (!(cutoff_hz >= 0.0) || !std::isfinite(cutoff_hz)) throw std::invalid_argument("cutoff must be >= 0");
    if (!(ts > 0.0) || !std::isfinite(ts)) throw std::invalid_argument("Ts must be positive");
}

void PlantParams::validate() const {
    if (!(k_env >= 0.0) || !std::isfinite(k_env)) throw std::invalid_argument("K_env must be >= 0");
    if (!std::isfinite(surface_height)) throw std::invalid_argument("surface height must be finite");
}

// ---------------------------------------------------------------------------
// Config file

namespace {

Axes parse_axes(std::string_view key, std::string_view value) {
    auto parts = split(value, ',');
    if (parts.size() != 3 && parts.size() != 6)
        throw std::invalid_argument(std::string(key) + " needs 3 or 6 values, got " + std::to_string(parts.size()));
    Axes a{};
    for (std::size_t i = 0; i < kAxes; ++i) a[i] = parse_double(trim(parts[i]));
    for (std::size_t i = kAxes; i < parts.size(); ++i) (void)parse_double(trim(parts[i]));
    return a;
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw std::invalid_argument("expected a boolean, got '" + std::string(v) + "'");
}

std::string axes_text(const Axes& a) {
    return format_double(a[0]) + ", " + format_double(a[1]) + ", " + format_double(a[2]);
}

}  // namespace

ReplayConfig parse_config(std::istream& in) {
    ReplayConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view l = line;
        if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
        l = trim(l);
        if (l.empty()) continue;
        const auto eq = l.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("gains line " + std::to_string(line_no) + ": expected key = value");
        const std::string_view key = trim(l.substr(0, eq)), value = trim(l.substr(eq + 1));
        try {
            if (key == "Kp") cfg.gains.kp = parse_axes(key, value);
            else if (key == "Kd") cfg.gains.kd = parse_axes(key, value);
            else if (key == "Kf") cfg.gains.kf = parse_axes(key, value);
            else if (key == "I") cfg.gains.inertia = parse_axes(key, value);
            else if (key == "g") cfg.gains.cutoff_hz = parse_double(value);
            else if (key == "Ts") cfg.gains.ts = parse_double(value);
            else if (key == "K_env") cfg.plant.k_env = parse_double(value);
            else if (key == "surface_height") cfg.plant.surface_height = parse_double(value);
            else if (key == "z_position_in_force_mode") cfg.gains.z_position_in_force_mode = parse_bool(value);
            else throw std::invalid_argument("unknown key '" + std::string(key) + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("gains line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.gains.validate();
    cfg.plant.validate();
    return cfg;
}

ReplayConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read gains file '" + path + "'");
    return parse_config(f);
}

void write_config(std::ostream& out, const ReplayConfig& c) {
    out << "# controller gains, translational axes x, y, z\n";
    out << "Kp = " << axes_text(c.gains.kp) << "\n";
    out << "Kd = " << axes_text(c.gains.kd) << "\n";
    out << "Kf = " << axes_text(c.gains.kf) << "\n";
    out << "I = " << axes_text(c.gains.inertia) << "\n";
    out << "g = " << format_double(c.gains.cutoff_hz) << "\n";
    out << "Ts = " << format_double(c.gains.ts) << "\n";
    out << "z_position_in_force_mode = " << (c.gains.z_position_in_force_mode ? "true" : "false") << "\n";
    out << "# environment\n";
    out << "K_env = " << format_double(c.plant.k_env) << "\n";
    out << "surface_height = " << format_double(c.plant.surface_height) << "\n";
}

// ---------------------------------------------------------------------------
// Observer and plant

DobState dob_init(double inertia, double velocity, double cutoff_rad) { return {cutoff_rad * inertia * velocity}; }

double dob_step(DobState& state, double inertia, double applied_force, double velocity_prev, double velocity_now,
                double cutoff_rad, double ts) {
    // w tracks g/(s+g) (u + g I v); the estimate g I v - w is the low-passed
    // I dv/dt - u, i.e. the external force.
    state.w += ts * cutoff_rad * (applied_force + cutoff_rad * inertia * velocity_prev - state.w);
    return cutoff_rad * inertia * velocity_now - state.w;
}

PlantState make_state(const ReplayConfig& config, const Axes& position, const Axes& velocity) {
    config.gains.validate();
    config.plant.validate();
    const double g = to_rad(config.gains.cutoff_hz);
    PlantState s;
    s.position = position;
    s.velocity = velocity;
    s.filtered_velocity = velocity;
    for (std::size_t a = 0; a < kAxes; ++a) s.dob[a] = dob_init(config.gains.inertia[a], velocity[a], g);
    s.contact_force = config.plant.contact_force(position[2]);
    return s;
}

PlantState control_step(const ReplayConfig& config, const PlantState& state, const Command& command,
                        const StepOptions& options) {
    const ControllerGains& k = config.gains;
    const double g = to_rad(k.cutoff_hz);
    const double f_contact = config.plant.contact_force(state.position[2]);
    PlantState next = state;
    for (std::size_t a = 0; a < kAxes; ++a) {
        const double x = state.position[a], v = state.velocity[a], vf = state.filtered_velocity[a];
        const double m = k.inertia[a];
        double acc_ref;
        if (a == 2 && options.force_control) {
            // Contact pushes the tool up, so more force means accelerating down.
            acc_ref = k.kd[a] * (command.velocity[a] - vf) - k.kf[a] * (command.force - f_contact);
            if (k.z_position_in_force_mode) acc_ref += k.kp[a] * (command.position[a] - x);
        } else {
            acc_ref = k.kp[a] * (command.position[a] - x) + k.kd[a] * (command.velocity[a] - vf);
        }
        const double u = m * acc_ref - (options.dob ? state.disturbance_estimate[a] : 0.0);
        const double external = options.disturbance[a] + (a == 2 ? f_contact : 0.0);
        const double v_new = v + k.ts * (u + external) / m;
        next.velocity[a] = v_new;
        next.position[a] = x + k.ts * v_new;
        next.disturbance_estimate[a] = dob_step(next.dob[a], m, u, v, v_new, g, k.ts);
        next.filtered_velocity[a] = g > 0.0 ? vf + k.ts * g * (v_new - vf) : v_new;
        if (!std::isfinite(next.position[a]) || !std::isfinite(v_new) || !std::isfinite(next.disturbance_estimate[a]))
            throw std::runtime_error("replay state became non-finite at t = " + format_double(state.time));
    }
    next.contact_force = config.plant.contact_force(next.position[2]);
    next.time = state.time + k.ts;
    return next;
}

ReplayLog run_replay(const ReplayConfig& config, const MultiStrokeTrajectory& traj, const ReplayOptions& options) {
    config.gains.validate();
    config.plant.validate();
    ReplayLog log;
    log.ts = config.gains.ts;
    log.config = traj.config;
    if (traj.total_samples() == 0) return log;

    if (!std::isfinite(options.reference_depth) || !std::isfinite(options.height_offset))
        throw std::invalid_argument("height offset and reference depth must be finite");
    const double z_cmd = config.plant.surface_height - options.reference_depth + options.height_offset;
    const StepOptions step{options.force_control, options.dob, options.disturbance};
    PlantState state;
    bool started = false;
    for (std::size_t s = 0; s < traj.strokes.size(); ++s) {
        const Trajectory& t = traj.strokes[s];
        if (std::abs(t.sample_period() - log.ts) > 1e-12 * log.ts)
            throw std::invalid_argument("stroke " + std::to_string(s + 1) + " is sampled at " +
                                        format_double(t.sample_period()) + " s, controller runs at " +
                                        format_double(log.ts) + " s; resample first");
        const ChannelSchema& sc = t.schema();
        const std::size_t ix = sc.require("x"), iy = sc.require("y");
        const auto ivx = sc.index_of("v_x"), ivy = sc.index_of("v_y"), ifz = sc.index_of("f_z");
        for (std::size_t n = 0; n < t.size(); ++n) {
            Command cmd;
            cmd.position = {t.at(n, ix), t.at(n, iy), z_cmd};
            cmd.velocity = {ivx ? t.at(n, *ivx) : 0.0, ivy ? t.at(n, *ivy) : 0.0, 0.0};
            cmd.force = ifz ? t.at(n, *ifz) : 0.0;
            if (!started) {
                state = make_state(config, cmd.position);
                started = true;
            }
            state = control_step(config, state, cmd, step);
            log.time.push_back(state.time);
            log.stroke.push_back(static_cast<int>(s + 1));
            log.position_cmd.push_back(cmd.position);
            log.position.push_back(state.position);
            log.force_cmd.push_back(cmd.force);
            log.force.push_back(state.contact_force);
            log.disturbance_estimate.push_back(state.disturbance_estimate);
        }
    }
    return log;
}

void write_log(std::ostream& out, const ReplayLog& log) {
    out << "#hvae-replay 1\n";
    out << "#Ts " << format_double(log.ts) << '\n';
    for (const auto& [k, v] : log.config) out << "#config " << k << '=' << v << '\n';
    out << "t,stroke,x_cmd,y_cmd,z_cmd,x,y,z,f_cmd,f,d_x,d_y,d_z\n";
    for (std::size_t i = 0; i < log.size(); ++i) {
        out << format_double(log.time[i]) << ',' << log.stroke[i];
        for (double v : log.position_cmd[i]) out << ',' << format_double(v);
        for (double v : log.position[i]) out << ',' << format_double(v);
        out << ',' << format_double(log.force_cmd[i]) << ',' << format_double(log.force[i]);
        for (double v : log.disturbance_estimate[i]) out << ',' << format_double(v);
        out << '\n';
    }
}

void save_log(const std::string& path, const ReplayLog& log) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    write_log(f, log);
    if (!f) throw std::runtime_error("error writing '" + path + "'");
}

}  // namespace hvae::replay
