#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace hvae::cli {

namespace {

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
    return out;
}

std::string join_strings(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

const char* env(const char* name) {
    const char* v = std::getenv(name);
    return v && *v ? v : nullptr;
}

}  // namespace

CommandSpec::CommandSpec(CLI::App& parent, std::string name, std::string description)
    : app_(parent.add_subcommand(name, std::move(description))),
      command_(parent.get_parent() ? parent.get_name() + " " + name : name) {}

void CommandSpec::record(const std::string& name, std::function<std::string()> fmt) {
    formatters_.emplace_back(name, std::move(fmt));
}

CLI::Option* CommandSpec::option(const std::string& name, std::string& value, const std::string& help) {
    record(name, [&value] { return value; });
    return app_->add_option("--" + name, value, help)->capture_default_str();
}

CLI::Option* CommandSpec::option(const std::string& name, double& value, const std::string& help) {
    record(name, [&value] { return format_double(value); });
    return app_->add_option("--" + name, value, help)->default_str(format_double(value));
}

CLI::Option* CommandSpec::option(const std::string& name, bool& value, const std::string& help) {
    record(name, [&value] { return std::string(value ? "on" : "off"); });
    return app_->add_option("--" + name, value, help + " (on|off)")->default_str(value ? "on" : "off");
}

CLI::Option* CommandSpec::option(const std::string& name, std::vector<double>& value, const std::string& help) {
    record(name, [&value] { return join_doubles(value); });
    return app_->add_option("--" + name, value, help)->delimiter(',')->default_str(join_doubles(value));
}

CLI::Option* CommandSpec::option(const std::string& name, std::vector<std::string>& value, const std::string& help) {
    record(name, [&value] { return join_strings(value); });
    return app_->add_option("--" + name, value, help)->delimiter(',')->default_str(join_strings(value));
}

CLI::Option* CommandSpec::seed_option(std::uint64_t& seed) {
    if (const char* s = env("HVAE_SEED")) {
        try {
            seed = static_cast<std::uint64_t>(std::stoull(s));
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("HVAE_SEED is not an unsigned integer: '") + s + "'");
        }
    }
    return option("seed", seed, "random seed (default from HVAE_SEED)");
}

ConfigEntries CommandSpec::capture() const {
    ConfigEntries out{{"command", command_}};
    for (const auto& [name, fmt] : formatters_) out.emplace_back(name, fmt());
    return out;
}

namespace {
std::string output_override;
}

void set_output_dir_override(std::string dir) { output_override = std::move(dir); }

std::filesystem::path output_path(const std::string& path) {
    if (path.empty()) throw CLI::ValidationError("output path is empty");
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (!output_override.empty()) p = std::filesystem::path(output_override) / p;
        else if (const char* dir = env("HVAE_OUT_DIR")) p = std::filesystem::path(dir) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
}

std::filesystem::path input_path(const std::string& path, const std::string& what) {
    if (path.empty()) throw CLI::ValidationError(what + " path is empty");
    std::filesystem::path p(path);
    if (std::filesystem::exists(p)) return p;
    if (p.is_relative())
        if (const char* dir = env("HVAE_OUT_DIR"))
            if (auto q = std::filesystem::path(dir) / p; std::filesystem::exists(q)) return q;
    throw CLI::ValidationError(what + " '" + path + "' does not exist");
}

void append_prefixed(ConfigEntries& to, const ConfigEntries& from, const std::string& prefix) {
    for (const auto& [k, v] : from) to.emplace_back(prefix + "." + k, v);
}

std::string config_value(const ConfigEntries& config, const std::string& key) {
    for (const auto& [k, v] : config)
        if (k == key) return v;
    return {};
}

namespace {

std::string xml_unescape(std::string_view s) {
    static const std::pair<std::string_view, char> table[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}};
    std::string out;
    for (std::size_t i = 0; i < s.size();) {
        bool hit = false;
        for (const auto& [code, c] : table)
            if (s.substr(i, code.size()) == code) {
                out += c;
                i += code.size();
                hit = true;
                break;
            }
        if (!hit) out += s[i++];
    }
    return out;
}

std::pair<std::string, std::string> split_entry(std::string_view kv) {
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw std::runtime_error("malformed config entry '" + std::string(kv) + "'");
    return {std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1))};
}

}  // namespace

ConfigEntries read_artifact_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read '" + path.string() + "'");
    std::string first;
    std::getline(f, first);
    f.seekg(0);
    ConfigEntries out;
    if (!first.empty() && first.front() == '{') {
        const auto j = nlohmann::ordered_json::parse(f);
        for (const auto& kv : j.at("run_config")) out.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
        return out;
    }
    std::string line;
    if (first.rfind("<?xml", 0) == 0 || first.rfind("<svg", 0) == 0) {
        bool inside = false;
        while (std::getline(f, line)) {
            const auto t = trim(line);
            if (t.rfind("<metadata id=\"hvae-config\"", 0) == 0) inside = true;
            else if (t == "</metadata>") break;
            else if (inside) out.push_back(split_entry(xml_unescape(t)));
        }
        return out;
    }
    if (first.rfind("#hvae-", 0) != 0) throw std::runtime_error("'" + path.string() + "' is not an hvae artifact");
    while (std::getline(f, line)) {
        if (line.rfind("#config ", 0) == 0) out.push_back(split_entry(std::string_view(line).substr(8)));
        else if (line.empty() || line.front() != '#') break;
    }
    return out;
}

std::vector<std::string> rerun_arguments(const ConfigEntries& config) {
    const std::string command = config_value(config, "command");
    if (command.empty()) throw std::runtime_error("artifact carries no command record");
    std::vector<std::string> args;
    for (auto word : split(command, ' ')) args.emplace_back(word);
    for (const auto& [k, v] : config) {
        if (k == "command" || k.rfind("in.", 0) == 0 || k.find('.') != std::string::npos) continue;
        if (v.empty()) continue;
        args.push_back("--" + k + "=" + v);
    }
    return args;
}

void write_loss_history(const std::filesystem::path& path, const TrainHistory& history, const ConfigEntries& config) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << "#hvae-loss 1\n";
    for (const auto& [k, v] : config) f << "#config " << k << '=' << v << '\n';
    f << "epoch,total,reconstruction,derivative,kl\n";
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        const auto& l = history.epochs[e];
        f << (e + 1) << ',' << format_double(l.total) << ',' << format_double(l.reconstruction) << ','
          << format_double(l.derivative) << ',' << format_double(l.kl) << '\n';
    }
    if (!f) throw std::runtime_error("error writing '" + path.string() + "'");
}

Dataset endpoint_dataset(const std::vector<EndpointSequence>& seqs, const std::vector<std::string>& labels,
                         const ChannelSchema& schema, ConfigEntries config) {
    std::vector<Trajectory> rows;
    for (const auto& seq : seqs) {
        std::vector<Sample> samples;
        for (const auto& e : seq) {
            samples.push_back(e.start);
            samples.push_back(e.end);
        }
        rows.emplace_back(schema, samples);
    }
    return Dataset::from_trajectories(rows, labels, std::move(config));
}

std::vector<EndpointSequence> endpoint_sequences(const Dataset& ds) {
    std::vector<EndpointSequence> out;
    for (const auto& t : ds.trajectories()) {
        if (t.size() % 2 != 0) throw std::runtime_error("endpoint record with an odd row count");
        EndpointSequence seq;
        for (std::size_t m = 0; m < t.size() / 2; ++m)
            seq.push_back({t.sample(2 * m), t.sample(2 * m + 1), static_cast<int>(m + 1)});
        out.push_back(std::move(seq));
    }
    return out;
}

Dataset load_tagged(const std::filesystem::path& path, const std::string& content) {
    Dataset ds = load_dataset(path);
    const std::string tag = config_value(ds.config, "meta.content");
    if (tag != content)
        throw CLI::ValidationError("'" + path.string() + "' holds " + (tag.empty() ? "untagged" : tag) +
                                   " records, expected " + content);
    if (ds.records.empty()) throw CLI::ValidationError("'" + path.string() + "' holds no records");
    return ds;
}

void note(const Context& ctx, const std::string& message) {
    if (!ctx.quiet) std::cerr << message << '\n';
}

}  // namespace hvae::cli
