// train-point and train-traj.

#include <cstdio>
#include <iostream>
#include <map>

#include "cli.hpp"
#include "hvae/models/model_io.hpp"
#include "hvae/models/traj_model.hpp"

namespace hvae::cli {

namespace {

struct TrainCommon {
    TrainCommon(std::size_t default_epochs, std::size_t default_batch) : epochs(default_epochs), batch(default_batch) {}

    std::size_t epochs;
    std::size_t batch;
    double lr = 1e-3;
    double clip = 5.0;
    std::size_t log_every = 100;
    std::uint64_t seed = 1;
    std::string data;
    std::string out;
    std::string loss_out;

    void add(CommandSpec& spec) {
        spec.option("data", data, "training dataset")->required();
        spec.option("epochs", epochs, "passes over the dataset");
        spec.option("batch", batch, "minibatch size");
        spec.option("lr", lr, "Adam learning rate");
        spec.option("clip", clip, "global gradient-norm clip");
        spec.option("log-every", log_every, "progress line every k epochs (0 = never)");
        spec.seed_option(seed);
        spec.option("out", out, "model file")->required();
        spec.option("loss-out", loss_out, "loss history CSV (default: <out stem>.loss.csv)");
    }

    TrainOptions options(const Context& ctx) const {
        TrainOptions t;
        t.epochs = epochs;
        t.batch_size = batch;
        t.clip_norm = clip;
        t.adam.learning_rate = lr;
        t.seed = seed + 1;
        const std::size_t every = log_every;
        const std::size_t total = epochs;
        if (!ctx.quiet && every > 0)
            t.on_epoch = [every, total](std::size_t e, const LossTerms& l) {
                if ((e + 1) % every == 0 || e + 1 == total) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "epoch %zu/%zu  loss %.6g  rec %.6g  der %.6g  kl %.6g", e + 1,
                                  total, l.total, l.reconstruction, l.derivative, l.kl);
                    std::cerr << buf << '\n';
                }
            };
        return t;
    }

    std::filesystem::path loss_path() const {
        if (!loss_out.empty()) return output_path(loss_out);
        auto p = std::filesystem::path(out);
        p.replace_extension(".loss.csv");
        return output_path(p.string());
    }
};

void add_train_point(CLI::App& app, Context& ctx) {
    struct Opts {
        TrainCommon common{10000, 4};
        std::size_t hidden = 64;
        std::size_t latent = 6;
        std::size_t readout = 64;
        std::size_t max_strokes = 8;
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(app, "train-point", "train the stroke-order (endpoint) model");
    o->common.add(*spec);
    spec->option("hidden", o->hidden, "LSTM width");
    spec->option("latent", o->latent, "latent dimension");
    spec->option("readout", o->readout, "tanh readout width");
    spec->option("max-strokes", o->max_strokes, "longest endpoint sequence the model accepts");
    spec->app().callback([o, spec, &ctx] {
        const Dataset ds = load_tagged(input_path(o->common.data, "dataset"), "endpoints");
        const auto seqs = endpoint_sequences(ds);

        std::map<std::size_t, std::size_t> counts;
        for (const auto& s : seqs) ++counts[s.size()];
        std::size_t typical = 0, best = 0;
        for (const auto& [m, c] : counts)
            if (c > best) typical = m, best = c;

        PointModel model = PointModel::create({o->hidden, o->latent, o->readout, o->max_strokes}, ds.schema, seqs,
                                              o->common.seed);
        auto config = spec->capture();
        config.emplace_back("meta.typical_strokes", std::to_string(typical));
        append_prefixed(config, ds.config, "in");
        model.run_config = config;

        note(ctx, "training point model on " + std::to_string(seqs.size()) + " sequences, " +
                      std::to_string(model.parameters().size()) + " parameters");
        const auto history = train_point(model, seqs, o->common.options(ctx));
        const auto path = output_path(o->common.out);
        save_model(path, model);
        write_loss_history(o->common.loss_path(), history, config);
        note(ctx, "wrote " + path.string());
    });
}

void add_train_traj(CLI::App& app, Context& ctx) {
    struct Opts {
        TrainCommon common{5000, 10};
        std::size_t hidden = 256;
        std::size_t layers = 2;
        std::size_t latent = 3;
        std::size_t readout = 256;
        bool condition_force = true;
        bool phase_input = true;
    };
    auto o = std::make_shared<Opts>();
    auto spec = std::make_shared<CommandSpec>(app, "train-traj", "train the conditional touch (stroke) model");
    o->common.add(*spec);
    spec->option("hidden", o->hidden, "LSTM width");
    spec->option("layers", o->layers, "stacked LSTM layers");
    spec->option("latent", o->latent, "latent dimension");
    spec->option("readout", o->readout, "tanh readout width");
    spec->option("condition-force", o->condition_force, "include force in the endpoint condition");
    spec->option("phase-input", o->phase_input, "feed normalized time to the decoder");
    spec->app().callback([o, spec, &ctx] {
        const Dataset ds = load_tagged(input_path(o->common.data, "dataset"), "strokes");
        const auto strokes = ds.trajectories();
        const std::size_t n = strokes.front().size();
        TrajModelConfig cfg{o->hidden, o->layers, o->latent, o->readout, n, o->condition_force, o->phase_input};
        TrajModel model = TrajModel::create(cfg, strokes, o->common.seed);
        auto config = spec->capture();
        append_prefixed(config, ds.config, "in");
        model.run_config = config;

        note(ctx, "training traj model on " + std::to_string(strokes.size()) + " strokes of " + std::to_string(n) +
                      " samples, " + std::to_string(model.parameters().size()) + " parameters");
        const auto history = train_traj(model, strokes, o->common.options(ctx));
        const auto path = output_path(o->common.out);
        save_model(path, model);
        write_loss_history(o->common.loss_path(), history, config);
        note(ctx, "wrote " + path.string());
    });
}

}  // namespace

void add_train_commands(CLI::App& app, Context& ctx) {
    add_train_point(app, ctx);
    add_train_traj(app, ctx);
}

}  // namespace hvae::cli
