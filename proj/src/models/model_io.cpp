#include "hvae/models/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace hvae {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormatTag = "hvae-model";

Json schema_json(const ChannelSchema& s) {
    Json channels = Json::array();
    for (const auto& c : s.channels())
        channels.push_back({{"name", c.name}, {"unit", c.unit}, {"role", std::string(to_string(c.role))}});
    return {{"sample_period", s.sample_period()}, {"channels", channels}};
}

ChannelSchema schema_from(const Json& j) {
    std::vector<Channel> channels;
    for (const auto& c : j.at("channels"))
        channels.push_back({c.at("name").get<std::string>(), c.at("unit").get<std::string>(),
                            parse_channel_role(c.at("role").get<std::string>())});
    return ChannelSchema(std::move(channels), j.at("sample_period").get<double>());
}

Json stats_json(const NormalizationStats& s) {
    return {{"channels", s.channels}, {"offset", s.offset}, {"scale", s.scale}};
}

NormalizationStats stats_from(const Json& j) {
    NormalizationStats s{j.at("channels").get<std::vector<std::string>>(), j.at("offset").get<std::vector<double>>(),
                         j.at("scale").get<std::vector<double>>()};
    s.validate();
    return s;
}

Json config_json(const ConfigEntries& c) {
    Json out = Json::array();
    for (const auto& [k, v] : c) out.push_back(Json::array({k, v}));
    return out;
}

ConfigEntries config_from(const Json& j) {
    ConfigEntries c;
    for (const auto& kv : j) c.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    return c;
}

Json params_json(const nn::ParameterSet& p) {
    Json out = Json::array();
    const auto values = p.values();
    for (const auto& b : p.blocks()) {
        Json v = Json::array();
        for (std::size_t i = 0; i < b.size(); ++i) v.push_back(values[b.offset + i]);
        out.push_back({{"name", b.name}, {"rows", b.rows}, {"cols", b.cols}, {"values", std::move(v)}});
    }
    return out;
}

void load_params(const Json& j, nn::ParameterSet& p) {
    const auto& blocks = p.blocks();
    if (j.size() != blocks.size())
        throw std::runtime_error("model file has " + std::to_string(j.size()) + " parameter blocks, layout expects " +
                                 std::to_string(blocks.size()));
    auto values = p.values();
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        const auto& e = j[i];
        const auto name = e.at("name").get<std::string>();
        if (name != b.name || e.at("rows").get<std::size_t>() != b.rows || e.at("cols").get<std::size_t>() != b.cols)
            throw std::runtime_error("parameter block " + std::to_string(i) + " is '" + name + "', layout expects '" +
                                     b.name + "' (" + std::to_string(b.rows) + "x" + std::to_string(b.cols) + ")");
        const auto& v = e.at("values");
        if (v.size() != b.size()) throw std::runtime_error("parameter block '" + name + "' has the wrong value count");
        for (std::size_t k = 0; k < b.size(); ++k) {
            const double x = v[k].get<double>();
            if (!std::isfinite(x)) throw std::runtime_error("parameter block '" + name + "' holds a non-finite value");
            values[b.offset + k] = x;
        }
    }
}

Json header(const char* kind) { return {{"format", kFormatTag}, {"version", kModelFormatVersion}, {"kind", kind}}; }

Json parse_checked(std::istream& in, const char* kind) {
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kFormatTag) throw std::runtime_error("not an hvae model file");
    if (j.value("version", -1) != kModelFormatVersion)
        throw std::runtime_error("unsupported model file version " + j.value("version", Json(-1)).dump());
    if (j.value("kind", "") != kind)
        throw std::runtime_error("expected a " + std::string(kind) + " model, file holds a " + j.value("kind", "?") +
                                 " model");
    return j;
}

void finish(std::ostream& out, const Json& j) {
    out << j.dump(1) << '\n';
    if (!out) throw std::runtime_error("error writing model file");
}

template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const Json::exception& e) {
        throw std::runtime_error(std::string("malformed model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("malformed model file: ") + e.what());
    }
}

}  // namespace

void write_model(std::ostream& out, const PointModel& m) {
    Json j = header("point");
    j["schema"] = schema_json(m.schema());
    j["stats"] = stats_json(m.stats());
    const auto& c = m.config();
    j["hyperparameters"] = {
        {"hidden", c.hidden}, {"latent", c.latent}, {"readout", c.readout}, {"max_strokes", c.max_strokes}};
    j["run_config"] = config_json(m.run_config);
    j["parameters"] = params_json(m.parameters());
    finish(out, j);
}

void write_model(std::ostream& out, const TrajModel& m) {
    Json j = header("traj");
    j["schema"] = schema_json(m.schema());
    j["stats"] = stats_json(m.stats());
    const auto& c = m.config();
    j["hyperparameters"] = {{"hidden", c.hidden},
                            {"layers", c.layers},
                            {"latent", c.latent},
                            {"readout", c.readout},
                            {"samples", c.samples},
                            {"condition_force", c.condition_force},
                            {"phase_input", c.phase_input},
                            {"sample_period", m.sample_period()}};
    j["run_config"] = config_json(m.run_config);
    j["parameters"] = params_json(m.parameters());
    finish(out, j);
}

PointModel read_point_model(std::istream& in) {
    const Json j = parse_checked(in, "point");
    return guarded([&] {
        const auto& h = j.at("hyperparameters");
        PointModelConfig c{h.at("hidden").get<std::size_t>(), h.at("latent").get<std::size_t>(),
                           h.at("readout").get<std::size_t>(), h.at("max_strokes").get<std::size_t>()};
        PointModel m(c, schema_from(j.at("schema")), stats_from(j.at("stats")), 0);
        m.run_config = config_from(j.at("run_config"));
        load_params(j.at("parameters"), m.parameters());
        return m;
    });
}

TrajModel read_traj_model(std::istream& in) {
    const Json j = parse_checked(in, "traj");
    return guarded([&] {
        const auto& h = j.at("hyperparameters");
        TrajModelConfig c{h.at("hidden").get<std::size_t>(),  h.at("layers").get<std::size_t>(),
                          h.at("latent").get<std::size_t>(),  h.at("readout").get<std::size_t>(),
                          h.at("samples").get<std::size_t>(), h.at("condition_force").get<bool>(),
                          h.at("phase_input").get<bool>()};
        TrajModel m(c, schema_from(j.at("schema")), stats_from(j.at("stats")), h.at("sample_period").get<double>(), 0);
        m.run_config = config_from(j.at("run_config"));
        load_params(j.at("parameters"), m.parameters());
        return m;
    });
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read model file '" + path.string() + "'");
    return f;
}

}  // namespace

void save_model(const std::filesystem::path& path, const PointModel& model) {
    auto f = open_out(path);
    write_model(f, model);
}

void save_model(const std::filesystem::path& path, const TrajModel& model) {
    auto f = open_out(path);
    write_model(f, model);
}

PointModel load_point_model(const std::filesystem::path& path) {
    auto f = open_in(path);
    return read_point_model(f);
}

TrajModel load_traj_model(const std::filesystem::path& path) {
    auto f = open_in(path);
    return read_traj_model(f);
}

ModelKind peek_model_kind(const std::filesystem::path& path) {
    auto f = open_in(path);
    Json j;
    try {
        j = Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw std::runtime_error("model file '" + path.string() + "' is not valid JSON");
    }
    const auto kind = j.is_object() ? j.value("kind", "") : "";
    if (kind == "point") return ModelKind::Point;
    if (kind == "traj") return ModelKind::Traj;
    throw std::runtime_error("'" + path.string() + "' is not an hvae model file");
}

}  // namespace hvae
