#include "hvae/core/trajectory.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace hvae {

std::string_view to_string(ChannelRole role) {
    switch (role) {
        case ChannelRole::Position: return "position";
        case ChannelRole::Force: return "force";
        case ChannelRole::Velocity: return "velocity";
        case ChannelRole::Other: return "other";
    }
    return "other";
}

ChannelRole parse_channel_role(std::string_view text) {
    if (text == "position") return ChannelRole::Position;
    if (text == "force") return ChannelRole::Force;
    if (text == "velocity") return ChannelRole::Velocity;
    if (text == "other") return ChannelRole::Other;
    throw std::invalid_argument("unknown channel role '" + std::string(text) + "'");
}

ChannelSchema::ChannelSchema(std::vector<Channel> channels, double sample_period)
    : channels_(std::move(channels)), sample_period_(sample_period) {
    if (channels_.empty()) throw std::invalid_argument("schema needs at least one channel");
    if (!(sample_period_ > 0.0) || !std::isfinite(sample_period_))
        throw std::invalid_argument("sample period must be positive");
    std::set<std::string> seen;
    for (const auto& ch : channels_) {
        if (ch.name.empty()) throw std::invalid_argument("channel name must not be empty");
        if (!seen.insert(ch.name).second) throw std::invalid_argument("duplicate channel '" + ch.name + "'");
    }
}

ChannelSchema ChannelSchema::planar_with_force(double sample_period) {
    return ChannelSchema({{"x", "m", ChannelRole::Position},
                          {"y", "m", ChannelRole::Position},
                          {"f_z", "N", ChannelRole::Force}},
                         sample_period);
}

std::optional<std::size_t> ChannelSchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < channels_.size(); ++i)
        if (channels_[i].name == name) return i;
    return std::nullopt;
}

std::size_t ChannelSchema::require(std::string_view name) const {
    if (auto i = index_of(name)) return *i;
    throw std::invalid_argument("schema has no channel '" + std::string(name) + "'");
}

std::vector<std::size_t> ChannelSchema::indices_with_role(ChannelRole role) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < channels_.size(); ++i)
        if (channels_[i].role == role) out.push_back(i);
    return out;
}

ChannelSchema ChannelSchema::with_sample_period(double sample_period) const {
    return ChannelSchema(channels_, sample_period);
}

Trajectory::Trajectory(ChannelSchema schema, std::vector<double> data)
    : schema_(std::move(schema)), data_(std::move(data)) {
    if (data_.size() % schema_.size() != 0)
        throw std::invalid_argument("trajectory data is not a whole number of samples");
    if (data_.size() / schema_.size() < 2) throw std::invalid_argument("trajectory needs at least 2 samples");
    for (double v : data_)
        if (!std::isfinite(v)) throw std::invalid_argument("trajectory contains a non-finite value");
}

namespace {
std::vector<double> flatten(const ChannelSchema& schema, const std::vector<Sample>& samples) {
    std::vector<double> data;
    data.reserve(samples.size() * schema.size());
    for (const auto& s : samples) {
        if (s.size() != schema.size()) throw std::invalid_argument("sample does not match schema width");
        data.insert(data.end(), s.values().begin(), s.values().end());
    }
    return data;
}
}  // namespace

Trajectory::Trajectory(ChannelSchema schema, const std::vector<Sample>& samples)
    : Trajectory(schema, flatten(schema, samples)) {}

Sample Trajectory::sample(std::size_t n) const {
    auto r = row(n);
    return Sample(std::vector<double>(r.begin(), r.end()));
}

std::vector<double> Trajectory::channel(std::size_t c) const {
    std::vector<double> out(size());
    for (std::size_t n = 0; n < size(); ++n) out[n] = at(n, c);
    return out;
}

double planar_path_length(const Trajectory& traj) {
    const std::size_t ix = traj.schema().require("x");
    const std::size_t iy = traj.schema().require("y");
    double len = 0.0;
    for (std::size_t n = 1; n < traj.size(); ++n)
        len += std::hypot(traj.at(n, ix) - traj.at(n - 1, ix), traj.at(n, iy) - traj.at(n - 1, iy));
    return len;
}

}  // namespace hvae
