#include <iostream>

#include "cli.hpp"

namespace {

using namespace hvae::cli;

std::unique_ptr<CLI::App> make_app(Context& ctx) {
    auto app = std::make_unique<CLI::App>("hvae: stroke-order and touch trajectory generator", "hvae");
    app->require_subcommand(1);
    app->fallthrough();
    app->set_config("--config", "", "key = value file; sections name subcommands, e.g. [train-traj]");
    app->add_flag("-q,--quiet", ctx.quiet, "no progress output");
    add_data_commands(*app, ctx);
    add_train_commands(*app, ctx);
    add_generate_commands(*app, ctx);
    add_replay_command(*app, ctx);

    auto* rerun = app->add_subcommand("rerun", "rerun the command recorded in an artifact");
    auto artifact = std::make_shared<std::string>();
    auto show = std::make_shared<bool>(false);
    auto out_dir = std::make_shared<std::string>();
    rerun->add_option("artifact", *artifact, "any file written by hvae")->required();
    rerun->add_flag("--show", *show, "print the command instead of running it");
    rerun->add_option("--out-dir", *out_dir, "write outputs here instead (inputs resolve as usual)");
    rerun->callback([artifact, show, out_dir, &ctx] {
        const auto args = rerun_arguments(read_artifact_config(input_path(*artifact, "artifact")));
        std::string line = "hvae";
        for (const auto& a : args) line += " " + a;
        if (*show) {
            std::cout << line << '\n';
            return;
        }
        note(ctx, line);
        if (!out_dir->empty()) set_output_dir_override(*out_dir);
        Context inner = ctx;
        auto again = make_app(inner);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        again->parse(reversed);
    });
    return app;
}

}  // namespace

int main(int argc, char** argv) {
    Context ctx;
    auto app = make_app(ctx);
    try {
        app->parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app->exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app->exit(e);
    } catch (const CLI::ParseError& e) {
        app->exit(e);
        return kExitUsage;
    } catch (const hvae::TrainingDiverged& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
