// replay: run a resampled trajectory through the impedance-controlled plant.

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cli.hpp"
#include "hvae/replay/replay.hpp"

namespace hvae::cli {

void add_replay_command(CLI::App& app, Context& ctx) {
    struct Opts {
        std::string traj, gains, out;
        bool force_control = true;
        bool dob = true;
        double height_offset_mm = 0.0;
        double reference_depth_mm = 0.0;
        std::vector<double> disturbance{0.0, 0.0, 0.0};
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(app, "replay", "simulate the impedance-controlled replay of a trajectory");
    spec->option("traj", o->traj, "trajectory CSV at the controller period")->required();
    spec->option("gains", o->gains, "gains file (default: built-in gains)");
    spec->option("force-control", o->force_control, "regulate contact force along z");
    spec->option("dob", o->dob, "disturbance observer");
    spec->option("height-offset-mm", o->height_offset_mm, "z command above the reference height [mm]");
    spec->option("reference-depth-mm", o->reference_depth_mm, "reference height below the surface [mm]");
    spec->option("disturbance", o->disturbance, "constant external force x,y,z [N]");
    spec->option("out", o->out, "replay log CSV")->required();
    spec->app().callback([o, spec, &ctx] {
        replay::ReplayConfig cfg;
        if (!o->gains.empty()) {
            try {
                cfg = replay::load_config(input_path(o->gains, "gains file").string());
            } catch (const std::invalid_argument& e) {
                throw CLI::ValidationError(e.what());
            }
        }
        if (o->disturbance.size() != replay::kAxes) throw CLI::ValidationError("--disturbance needs 3 values");
        const auto traj = load_csv(input_path(o->traj, "trajectory").string());
        replay::ReplayOptions opt;
        opt.force_control = o->force_control;
        opt.dob = o->dob;
        opt.height_offset = 1e-3 * o->height_offset_mm;
        opt.reference_depth = 1e-3 * o->reference_depth_mm;
        for (std::size_t a = 0; a < replay::kAxes; ++a) opt.disturbance[a] = o->disturbance[a];

        replay::ReplayLog log;
        try {
            log = replay::run_replay(cfg, traj, opt);
        } catch (const std::invalid_argument& e) {
            throw CLI::ValidationError(e.what());
        }
        auto config = spec->capture();
        std::ostringstream gains_text;
        replay::write_config(gains_text, cfg);
        const std::string gains_lines = gains_text.str();
        for (auto line : split(gains_lines, '\n')) {
            line = trim(line);
            if (line.empty() || line.front() == '#') continue;
            const auto eq = line.find('=');
            config.emplace_back("meta.gains." + std::string(trim(line.substr(0, eq))),
                                std::string(trim(line.substr(eq + 1))));
        }
        append_prefixed(config, traj.config, "in");
        log.config = config;
        const auto path = output_path(o->out);
        replay::save_log(path.string(), log);

        double sum_f = 0.0, max_f = 0.0, sum_xy = 0.0;
        for (std::size_t i = 0; i < log.size(); ++i) {
            const double ef = std::abs(log.force[i] - log.force_cmd[i]);
            sum_f += ef;
            max_f = std::max(max_f, ef);
            sum_xy += std::pow(log.position[i][0] - log.position_cmd[i][0], 2) +
                      std::pow(log.position[i][1] - log.position_cmd[i][1], 2);
        }
        const double n = std::max<double>(1.0, static_cast<double>(log.size()));
        char buf[160];
        std::snprintf(buf, sizeof buf, "%zu steps: mean |f - f_cmd| %.4f N, max %.4f N, planar RMS error %.4f mm",
                      log.size(), sum_f / n, max_f, 1e3 * std::sqrt(sum_xy / n));
        note(ctx, buf);
        note(ctx, "wrote " + path.string());
    });
}

}  // namespace hvae::cli
