// compose, generate, resample and export.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "cli.hpp"
#include "hvae/compose/composer.hpp"
#include "hvae/models/model_io.hpp"

namespace hvae::cli {

namespace {

std::size_t stroke_count(std::size_t requested, const PointModel& model) {
    if (requested > 0) return requested;
    const std::string typical = config_value(model.run_config, "meta.typical_strokes");
    if (typical.empty()) throw CLI::ValidationError("the point model records no stroke count; pass --strokes");
    return static_cast<std::size_t>(parse_int(typical));
}

std::vector<std::vector<double>> split_latents(const std::vector<double>& flat, std::size_t latent,
                                               std::size_t strokes) {
    if (flat.empty()) return {};
    if (flat.size() != latent && flat.size() != latent * strokes)
        throw CLI::ValidationError("--z-traj needs " + std::to_string(latent) + " values (shared) or " +
                                   std::to_string(latent * strokes) + " (one latent per stroke), got " +
                                   std::to_string(flat.size()));
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < flat.size(); i += latent)
        out.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i),
                         flat.begin() + static_cast<std::ptrdiff_t>(i + latent));
    return out;
}

std::vector<double> point_latent(const std::vector<double>& given, const PointModel& model) {
    if (given.empty()) return std::vector<double>(model.config().latent, 0.0);
    if (given.size() != model.config().latent)
        throw CLI::ValidationError("--z-point needs " + std::to_string(model.config().latent) + " values, got " +
                                   std::to_string(given.size()));
    return given;
}

void report(const Context& ctx, const std::string& name, const Composition& c) {
    std::string line = name + ": " + std::to_string(c.trajectory.strokes.size()) + " strokes, end error [mm]";
    for (double e : c.end_errors) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.3f", 1e3 * e);
        line += buf;
    }
    note(ctx, line);
}

template <class Model, class Loader>
std::shared_ptr<const Model> load_model(const std::string& path, const char* what, Loader loader) {
    const auto p = input_path(path, what);
    try {
        return std::make_shared<const Model>(loader(p));
    } catch (const std::runtime_error& e) {
        throw CLI::ValidationError(e.what());
    }
}

void add_compose(CLI::App& app, Context& ctx) {
    struct Opts {
        std::string point, traj;
        std::vector<double> z_point, z_traj;
        bool random_z = false;
        std::size_t strokes = 0;
        std::uint64_t seed = 1;
        std::string out, svg;
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(app, "compose", "decode endpoints, then each stroke, into one trajectory");
    spec->option("point", o->point, "point model file")->required();
    spec->option("traj", o->traj, "traj model file")->required();
    spec->option("z-point", o->z_point, "point latent (default zeros)");
    spec->option("z-traj", o->z_traj, "traj latent, shared or one per stroke (default zeros)");
    spec->option("random-z", o->random_z, "draw both latents from the prior with --seed");
    spec->option("strokes", o->strokes, "stroke count (0 = the count the point model was trained on)");
    spec->seed_option(o->seed);
    spec->option("out", o->out, "trajectory CSV")->required();
    spec->option("svg", o->svg, "optional SVG rendering");
    spec->app().callback([o, spec, &ctx] {
        auto point = load_model<PointModel>(o->point, "point model", [](auto& p) { return load_point_model(p); });
        auto traj = load_model<TrajModel>(o->traj, "traj model", [](auto& p) { return load_traj_model(p); });
        ComposedPlan plan{point, traj, {}, {}, stroke_count(o->strokes, *point)};
        if (o->random_z) {
            if (!o->z_point.empty() || !o->z_traj.empty())
                throw CLI::ValidationError("--random-z excludes --z-point and --z-traj");
            nn::Rng rng(o->seed);
            plan.z_point = rng.normal_vector(point->config().latent);
            for (std::size_t m = 0; m < plan.m_count; ++m) plan.z_traj.push_back(rng.normal_vector(traj->config().latent));
        } else {
            plan.z_point = point_latent(o->z_point, *point);
            plan.z_traj = split_latents(o->z_traj, traj->config().latent, plan.m_count);
        }
        Composition c;
        try {
            c = compose(plan);
        } catch (const std::invalid_argument& e) {
            throw CLI::ValidationError(e.what());
        }
        auto config = spec->capture();
        append_prefixed(config, point->run_config, "in.point");
        append_prefixed(config, traj->run_config, "in.traj");
        c.trajectory.config = config;
        save_csv(output_path(o->out).string(), c.trajectory);
        if (!o->svg.empty()) save_svg(output_path(o->svg).string(), c.trajectory);
        report(ctx, o->out, c);
    });
}

// File stems, suffixed -1, -2, ... when two inputs share one.
std::vector<std::string> unique_stems(const std::vector<std::string>& paths) {
    std::vector<std::string> stems;
    for (const auto& p : paths) stems.push_back(std::filesystem::path(p).stem().string());
    std::vector<std::string> out = stems;
    for (std::size_t i = 0; i < stems.size(); ++i)
        if (std::count(stems.begin(), stems.end(), stems[i]) > 1) out[i] += "-" + std::to_string(i + 1);
    return out;
}

void add_generate(CLI::App& app, Context& ctx) {
    struct Opts {
        std::vector<std::string> point, traj;
        std::vector<double> z_point, z_traj;
        std::size_t strokes = 0;
        std::string sweep;
        double sweep_from = -2.0, sweep_to = 2.0;
        std::size_t sweep_steps = 5;
        bool svg = true;
        std::string out_dir = "generated";
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(app, "generate",
                                              "compose every point model with every traj model, optionally sweeping "
                                              "one latent coordinate");
    spec->option("point", o->point, "point model files")->required();
    spec->option("traj", o->traj, "traj model files (swapped in turn)")->required();
    spec->option("z-point", o->z_point, "point latent (default zeros)");
    spec->option("z-traj", o->z_traj, "shared traj latent (default zeros)");
    spec->option("strokes", o->strokes, "stroke count (0 = per point model)");
    spec->option("sweep", o->sweep, "latent coordinate to sweep: point:<k> or traj:<k>");
    spec->option("sweep-from", o->sweep_from, "sweep start");
    spec->option("sweep-to", o->sweep_to, "sweep end");
    spec->option("sweep-steps", o->sweep_steps, "sweep points");
    spec->option("svg", o->svg, "also write SVG renderings");
    spec->option("out-dir", o->out_dir, "output directory");
    spec->app().callback([o, spec, &ctx] {
        std::vector<std::shared_ptr<const PointModel>> points;
        std::vector<std::shared_ptr<const TrajModel>> trajs;
        for (const auto& p : o->point)
            points.push_back(load_model<PointModel>(p, "point model", [](auto& q) { return load_point_model(q); }));
        for (const auto& t : o->traj)
            trajs.push_back(load_model<TrajModel>(t, "traj model", [](auto& q) { return load_traj_model(q); }));

        bool sweep_point = false;
        std::size_t sweep_dim = 0;
        if (!o->sweep.empty()) {
            const auto colon = o->sweep.find(':');
            const auto which = o->sweep.substr(0, colon);
            if (colon == std::string::npos || (which != "point" && which != "traj"))
                throw CLI::ValidationError("--sweep must look like point:<k> or traj:<k>");
            sweep_point = which == "point";
            try {
                sweep_dim = static_cast<std::size_t>(parse_int(o->sweep.substr(colon + 1)));
            } catch (const std::invalid_argument&) {
                throw CLI::ValidationError("--sweep index is not an integer");
            }
            if (o->sweep_steps < 2) throw CLI::ValidationError("--sweep-steps must be at least 2");
        }
        const std::size_t steps = o->sweep.empty() ? 1 : o->sweep_steps;
        const auto point_names = unique_stems(o->point), traj_names = unique_stems(o->traj);

        const auto dir = output_path((std::filesystem::path(o->out_dir) / "x").string()).parent_path();
        std::size_t written = 0;
        for (std::size_t pi = 0; pi < points.size(); ++pi)
            for (std::size_t ti = 0; ti < trajs.size(); ++ti)
                for (std::size_t s = 0; s < steps; ++s) {
                    const auto& pm = points[pi];
                    const auto& tm = trajs[ti];
                    ComposedPlan plan{pm, tm, point_latent(o->z_point, *pm), {}, stroke_count(o->strokes, *pm)};
                    plan.z_traj = split_latents(o->z_traj, tm->config().latent, 1);
                    std::string name = point_names[pi] + "__" + traj_names[ti];
                    if (!o->sweep.empty()) {
                        const double v = o->sweep_from + (o->sweep_to - o->sweep_from) * static_cast<double>(s) /
                                                             static_cast<double>(steps - 1);
                        std::vector<double>& z = sweep_point ? plan.z_point
                                                             : (plan.z_traj.empty()
                                                                    ? plan.z_traj.emplace_back(tm->config().latent, 0.0)
                                                                    : plan.z_traj.front());
                        if (sweep_dim >= z.size())
                            throw CLI::ValidationError("--sweep index " + std::to_string(sweep_dim) +
                                                       " outside the latent dimension " + std::to_string(z.size()));
                        z[sweep_dim] = v;
                        char buf[32];
                        std::snprintf(buf, sizeof buf, "__s%02zu", s);
                        name += buf;
                    }
                    Composition c;
                    try {
                        c = compose(plan);
                    } catch (const std::invalid_argument& e) {
                        throw CLI::ValidationError(name + ": " + e.what());
                    }
                    auto config = spec->capture();
                    config.emplace_back("meta.variant", name);
                    append_prefixed(config, pm->run_config, "in.point");
                    append_prefixed(config, tm->run_config, "in.traj");
                    c.trajectory.config = config;
                    save_csv((dir / (name + ".csv")).string(), c.trajectory);
                    if (o->svg) save_svg((dir / (name + ".svg")).string(), c.trajectory);
                    report(ctx, name, c);
                    ++written;
                }
        note(ctx, "wrote " + std::to_string(written) + " compositions to " + dir.string());
    });
}

void add_resample(CLI::App& app, Context& ctx) {
    struct Opts {
        std::string in, out;
        double period = 0.001;
        bool velocity = true;
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(app, "resample", "natural cubic spline onto the controller period");
    spec->option("in", o->in, "trajectory CSV")->required();
    spec->option("period", o->period, "target sample period [s]");
    spec->option("velocity", o->velocity, "add v_x/v_y from the spline derivative");
    spec->option("out", o->out, "resampled trajectory CSV")->required();
    spec->app().callback([o, spec, &ctx] {
        if (!(o->period > 0.0)) throw CLI::ValidationError("--period must be positive");
        const auto in = load_csv(input_path(o->in, "trajectory").string());
        auto r = resample_spline(in, {o->period, o->velocity});
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
        auto config = spec->capture();
        append_prefixed(config, in.config, "in");
        r.trajectory.config = config;
        const auto path = output_path(o->out);
        save_csv(path.string(), r.trajectory);
        note(ctx, "wrote " + std::to_string(r.trajectory.total_samples()) + " samples to " + path.string());
    });
}

MultiStrokeTrajectory load_any_trajectory(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::string first;
    std::getline(f, first);
    if (first.rfind("#hvae-dataset", 0) == 0) {
        const Dataset ds = load_dataset(path);
        if (config_value(ds.config, "meta.content") == "endpoints")
            throw CLI::ValidationError("endpoint datasets have no strokes to draw");
        return {ds.trajectories(), ds.config};
    }
    return load_csv(path.string());
}

void add_export(CLI::App& app, Context& ctx) {
    struct Opts {
        std::string in, out;
        double px_per_m = 4000.0, margin = 20.0, min_width = 0.5, max_width = 4.0;
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(app, "export", "render a trajectory CSV or stroke dataset as SVG");
    spec->option("in", o->in, "trajectory CSV or dataset")->required();
    spec->option("px-per-m", o->px_per_m, "drawing scale");
    spec->option("margin", o->margin, "margin [px]");
    spec->option("min-width", o->min_width, "line width at zero force [px]");
    spec->option("max-width", o->max_width, "line width at the largest mean force [px]");
    spec->option("out", o->out, "SVG file")->required();
    spec->app().callback([o, spec, &ctx] {
        auto traj = load_any_trajectory(input_path(o->in, "input"));
        auto config = spec->capture();
        append_prefixed(config, traj.config, "in");
        traj.config = config;
        const auto path = output_path(o->out);
        save_svg(path.string(), traj, {o->px_per_m, o->margin, o->min_width, o->max_width});
        note(ctx, "wrote " + path.string());
    });
}

}  // namespace

void add_generate_commands(CLI::App& app, Context& ctx) {
    add_compose(app, ctx);
    add_generate(app, ctx);
    add_resample(app, ctx);
    add_export(app, ctx);
}

}  // namespace hvae::cli
