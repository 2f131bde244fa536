// fixtures and ingest: synthetic recordings in, training datasets out.

#include <algorithm>
#include <cmath>

#include "cli.hpp"
#include "hvae/fixtures/fixtures.hpp"
#include "hvae/ingest/ingest.hpp"

namespace hvae::cli {

namespace {

fixtures::ForceProfile parse_profile(const std::string& s) {
    if (s == "constant") return fixtures::ForceProfile::Constant;
    if (s == "trapezoid") return fixtures::ForceProfile::Trapezoid;
    throw CLI::ValidationError("--profile must be constant or trapezoid, got '" + s + "'");
}

void add_fixture_strokes(CLI::App& parent, Context& ctx) {
    struct Opts {
        std::string kind = "zigzag";
        std::vector<double> lengths{0.06, 0.10};
        std::vector<double> angles{0.0, 20.0 / 3.0, 40.0 / 3.0};
        double amplitude = 0.008;
        double frequency = 3.0;
        std::string profile = "trapezoid";
        double peak = 1.5;
        double base_fraction = 0.4;
        double noise = 1e-4;
        std::size_t samples = 800;
        std::size_t repeats = 1;
        std::uint64_t seed = 1;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(parent, "strokes", "single-stroke recordings on a length x angle grid");
    spec->option("kind", o->kind, "straight, zigzag or arc");
    spec->option("lengths", o->lengths, "chord lengths [m]");
    spec->option("angles", o->angles, "chord directions [deg]");
    spec->option("amplitude", o->amplitude, "zigzag amplitude or arc sagitta [m]");
    spec->option("frequency", o->frequency, "zigzag cycles per stroke");
    spec->option("profile", o->profile, "force profile: constant or trapezoid");
    spec->option("peak", o->peak, "peak force [N]");
    spec->option("base-fraction", o->base_fraction, "trapezoid edge force / peak");
    spec->option("noise", o->noise, "position noise sigma [m]");
    spec->option("samples", o->samples, "samples per stroke at 8 ms");
    spec->option("repeats", o->repeats, "recordings per grid cell");
    spec->seed_option(o->seed);
    spec->option("out", o->out, "output dataset")->required();
    spec->app().callback([o, spec, &ctx] {
        fixtures::StrokeKind kind;
        try {
            kind = fixtures::parse_stroke_kind(o->kind);
        } catch (const std::invalid_argument& e) {
            throw CLI::ValidationError(e.what());
        }
        nn::Rng rng(o->seed);
        std::vector<Trajectory> trajs;
        std::vector<std::string> labels;
        for (double len : o->lengths)
            for (double ang : o->angles)
                for (std::size_t r = 0; r < o->repeats; ++r) {
                    fixtures::SyntheticStrokeSpec s{kind,     o->amplitude, o->frequency, len,
                                                    ang,      parse_profile(o->profile), o->peak,
                                                    o->base_fraction, o->noise};
                    trajs.push_back(fixtures::make_stroke(s, o->samples, rng));
                    labels.push_back(o->kind + " L=" + format_double(len) + " a=" + format_double(ang) +
                                     " r=" + std::to_string(r + 1));
                }
        if (trajs.empty()) throw CLI::ValidationError("empty length or angle list");
        auto config = spec->capture();
        config.emplace_back("meta.content", "recordings");
        const auto path = output_path(o->out);
        save_dataset(path, Dataset::from_trajectories(trajs, labels, config));
        note(ctx, "wrote " + std::to_string(trajs.size()) + " recordings to " + path.string());
    });
}

void add_fixture_characters(CLI::App& parent, Context& ctx) {
    struct Opts {
        std::string letters = "A";
        std::size_t count = 20;
        double scale = 0.1;
        double jitter = 5e-4;
        double noise = 5e-5;
        double peak = 1.5;
        double speed = 0.1;
        std::uint64_t seed = 1;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(parent, "characters", "block letters with pen-up travel");
    spec->option("letters", o->letters, "letters to record, e.g. A or AEHK (supported: " +
                                            fixtures::supported_letters() + ")");
    spec->option("count", o->count, "recordings per letter");
    spec->option("scale", o->scale, "letter height [m]");
    spec->option("jitter", o->jitter, "per-recording corner jitter [m]");
    spec->option("noise", o->noise, "per-sample position noise [m]");
    spec->option("peak", o->peak, "peak force [N]");
    spec->option("speed", o->speed, "pen speed [m/s]");
    spec->seed_option(o->seed);
    spec->option("out", o->out, "output dataset")->required();
    spec->app().callback([o, spec, &ctx] {
        if (o->letters.empty() || o->count == 0) throw CLI::ValidationError("nothing to record");
        nn::Rng rng(o->seed);
        std::vector<Trajectory> trajs;
        std::vector<std::string> labels;
        fixtures::CharacterOptions opt{.speed = o->speed,
                                       .peak_force = o->peak,
                                       .corner_jitter = o->jitter,
                                       .noise_sigma = o->noise};
        for (char c : o->letters)
            for (std::size_t k = 0; k < o->count; ++k) {
                try {
                    trajs.push_back(fixtures::make_character(c, o->scale, rng, opt).recording);
                } catch (const std::invalid_argument& e) {
                    throw CLI::ValidationError(e.what());
                }
                labels.push_back(std::string(1, c) + "#" + std::to_string(k + 1));
            }
        auto config = spec->capture();
        config.emplace_back("meta.content", "recordings");
        const auto path = output_path(o->out);
        save_dataset(path, Dataset::from_trajectories(trajs, labels, config));
        note(ctx, "wrote " + std::to_string(trajs.size()) + " recordings to " + path.string());
    });
}

void add_ingest(CLI::App& app, Context& ctx) {
    struct Opts {
        std::string in;
        std::string mode = "strokes";
        std::size_t samples = 100;
        double rotation_step = 20.0;
        std::string pivot = "origin";
        double threshold = 0.25;
        std::size_t min_samples = 5;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(app, "ingest", "segment recordings into training datasets");
    spec->option("in", o->in, "recordings dataset")->required();
    spec->option("mode", o->mode, "strokes (offset, resampled, rotated) or endpoints");
    spec->option("samples", o->samples, "samples per stroke (strokes mode)");
    spec->option("rotation-step", o->rotation_step, "augmentation step [deg], 0 disables (strokes mode)");
    spec->option("pivot", o->pivot, "rotation pivot: origin or centroid");
    spec->option("threshold", o->threshold, "contact force threshold [N]");
    spec->option("min-samples", o->min_samples, "shortest kept stroke");
    spec->option("out", o->out, "output dataset")->required();
    spec->app().callback([o, spec, &ctx] {
        if (o->mode != "strokes" && o->mode != "endpoints")
            throw CLI::ValidationError("--mode must be strokes or endpoints, got '" + o->mode + "'");
        if (o->pivot != "origin" && o->pivot != "centroid")
            throw CLI::ValidationError("--pivot must be origin or centroid, got '" + o->pivot + "'");
        if (o->samples < 3) throw CLI::ValidationError("--samples must be at least 3");
        const Dataset raw = load_tagged(input_path(o->in, "recordings"), "recordings");
        const ingest::SegmentationConfig seg{o->threshold, "f_z", o->min_samples};

        auto config = spec->capture();
        config.emplace_back("meta.content", o->mode);
        append_prefixed(config, raw.config, "in");

        const auto records = raw.trajectories();
        const auto path = output_path(o->out);
        if (o->mode == "endpoints") {
            std::vector<EndpointSequence> seqs;
            std::vector<std::string> labels;
            for (std::size_t r = 0; r < records.size(); ++r) {
                const auto strokes = ingest::segment_strokes({records[r], raw.records[r].label}, seg);
                seqs.push_back(ingest::extract_endpoints(strokes));
                labels.push_back(raw.records[r].label);
            }
            save_dataset(path, endpoint_dataset(seqs, labels, raw.schema, config));
            note(ctx, "wrote " + std::to_string(seqs.size()) + " endpoint sequences to " + path.string());
            return;
        }

        std::vector<Trajectory> strokes;
        std::vector<std::string> base_labels;
        for (std::size_t r = 0; r < records.size(); ++r) {
            const auto segs = ingest::segment_strokes({records[r], raw.records[r].label}, seg);
            for (std::size_t k = 0; k < segs.size(); ++k) {
                strokes.push_back(ingest::offset_to_origin(ingest::fit_length(segs[k], o->samples)).trajectory);
                base_labels.push_back(raw.records[r].label + "/s" + std::to_string(k + 1));
            }
        }
        const auto angles = o->rotation_step > 0.0 ? ingest::rotation_angles(o->rotation_step) : std::vector<double>{0.0};
        const auto pivot = o->pivot == "centroid" ? ingest::Pivot::Centroid : ingest::Pivot::Origin;
        auto augmented = ingest::augment(strokes, angles, {}, pivot);
        if (pivot == ingest::Pivot::Centroid)
            for (auto& t : augmented) t = ingest::offset_to_origin(t).trajectory;
        std::vector<std::string> labels;
        for (const auto& l : base_labels)
            for (double a : angles) labels.push_back(l + "/r" + format_double(a));
        save_dataset(path, Dataset::from_trajectories(augmented, labels, config));
        note(ctx, "wrote " + std::to_string(augmented.size()) + " strokes (" + std::to_string(strokes.size()) + " x " +
                      std::to_string(angles.size()) + " rotations) to " + path.string());
    });
}

}  // namespace

void add_data_commands(CLI::App& app, Context& ctx) {
    auto* fx = app.add_subcommand("fixtures", "synthetic recordings standing in for captured data");
    fx->require_subcommand(1);
    add_fixture_strokes(*fx, ctx);
    add_fixture_characters(*fx, ctx);
    add_ingest(app, ctx);
}

}  // namespace hvae::cli
