#pragma once

// Shared plumbing for the hvae subcommands: option registration that also
// records the effective value of every option, output and input path
// resolution, and artifact provenance.

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

#include "hvae/core/dataset_io.hpp"
#include "hvae/core/text.hpp"
#include "hvae/models/point_model.hpp"
#include "hvae/models/training.hpp"

namespace hvae::cli {

inline constexpr int kExitUsage = 2;
inline constexpr int kExitDiverged = 3;

struct Context {
    bool quiet = false;
};

/// The options of one subcommand plus a formatter for each, so the effective
/// run configuration can be written into every artifact and replayed later.
class CommandSpec {
public:
    CommandSpec(CLI::App& parent, std::string name, std::string description);
    CommandSpec(const CommandSpec&) = delete;
    CommandSpec& operator=(const CommandSpec&) = delete;

    CLI::App& app() { return *app_; }
    const std::string& command() const { return command_; }

    CLI::Option* option(const std::string& name, std::string& value, const std::string& help);
    CLI::Option* option(const std::string& name, double& value, const std::string& help);
    template <class T>
        requires std::is_integral_v<T> && std::is_unsigned_v<T> && (!std::is_same_v<T, bool>)
    CLI::Option* option(const std::string& name, T& value, const std::string& help) {
        record(name, [&value] { return std::to_string(value); });
        return app_->add_option("--" + name, value, help)->capture_default_str();
    }
    CLI::Option* option(const std::string& name, bool& value, const std::string& help);
    CLI::Option* option(const std::string& name, std::vector<double>& value, const std::string& help);
    CLI::Option* option(const std::string& name, std::vector<std::string>& value, const std::string& help);

    /// --seed, defaulting to HVAE_SEED when set, else 1.
    CLI::Option* seed_option(std::uint64_t& seed);

    /// command=<words> followed by name=value for every option in
    /// declaration order. Empty values are kept so the record is complete.
    ConfigEntries capture() const;

private:
    void record(const std::string& name, std::function<std::string()> fmt);

    CLI::App* app_;
    std::string command_;
    std::vector<std::pair<std::string, std::function<std::string()>>> formatters_;
};

/// Relative outputs go under the override directory when one is set, else
/// under HVAE_OUT_DIR when that is set. Parent directories are created.
std::filesystem::path output_path(const std::string& path);
void set_output_dir_override(std::string dir);

/// The path as given when it exists, else under HVAE_OUT_DIR when that
/// exists; otherwise a usage error.
std::filesystem::path input_path(const std::string& path, const std::string& what);

/// Appends every entry of `from` as prefix.key.
void append_prefixed(ConfigEntries& to, const ConfigEntries& from, const std::string& prefix);

/// Looks a key up; empty when absent.
std::string config_value(const ConfigEntries& config, const std::string& key);

/// Reads the embedded run configuration of any hvae artifact (dataset,
/// model, trajectory CSV, replay log, loss CSV or SVG).
ConfigEntries read_artifact_config(const std::filesystem::path& path);

/// argv (without the program name) that reruns the command recorded in
/// config. Dotted keys (in.* for inputs, meta.* for derived facts) are not
/// options and are skipped.
std::vector<std::string> rerun_arguments(const ConfigEntries& config);

void write_loss_history(const std::filesystem::path& path, const TrainHistory& history, const ConfigEntries& config);

/// Endpoint datasets hold one record per character with 2M rows
/// alternating stroke start and stroke end.
Dataset endpoint_dataset(const std::vector<EndpointSequence>& seqs, const std::vector<std::string>& labels,
                         const ChannelSchema& schema, ConfigEntries config);
std::vector<EndpointSequence> endpoint_sequences(const Dataset& ds);

/// Loads a dataset and checks its meta.content tag.
Dataset load_tagged(const std::filesystem::path& path, const std::string& content);

void note(const Context& ctx, const std::string& message);

void add_data_commands(CLI::App& app, Context& ctx);
void add_train_commands(CLI::App& app, Context& ctx);
void add_generate_commands(CLI::App& app, Context& ctx);
void add_replay_command(CLI::App& app, Context& ctx);

}  // namespace hvae::cli
