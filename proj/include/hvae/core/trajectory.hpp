#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hvae {

enum class ChannelRole { Position, Force, Velocity, Other };

std::string_view to_string(ChannelRole role);
ChannelRole parse_channel_role(std::string_view text);

struct Channel {
    std::string name;
    std::string unit;
    ChannelRole role = ChannelRole::Other;

    bool operator==(const Channel&) const = default;
};

/// Ordered, uniquely named channels plus the sample period they were
/// recorded at.
class ChannelSchema {
public:
    ChannelSchema(std::vector<Channel> channels, double sample_period);

    /// x[m], y[m], f_z[N]: the channel set the models train on by default.
    static ChannelSchema planar_with_force(double sample_period);

    std::size_t size() const { return channels_.size(); }
    const Channel& operator[](std::size_t i) const { return channels_[i]; }
    const std::vector<Channel>& channels() const { return channels_; }
    double sample_period() const { return sample_period_; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    /// Throws std::invalid_argument when the channel is absent.
    std::size_t require(std::string_view name) const;
    std::vector<std::size_t> indices_with_role(ChannelRole role) const;

    ChannelSchema with_sample_period(double sample_period) const;
    /// Same names, units and roles in the same order (period ignored).
    bool same_channels(const ChannelSchema& other) const { return channels_ == other.channels_; }

private:
    std::vector<Channel> channels_;
    double sample_period_;
};

/// One time step: one value per schema channel.
class Sample {
public:
    Sample() = default;
    explicit Sample(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool operator==(const Sample&) const = default;

private:
    std::vector<double> values_;
};

/// A multichannel time series of at least two samples, stored row-major.
class Trajectory {
public:
    /// data holds size() * schema.size() finite values, row-major.
    Trajectory(ChannelSchema schema, std::vector<double> data);
    Trajectory(ChannelSchema schema, const std::vector<Sample>& samples);

    const ChannelSchema& schema() const { return schema_; }
    std::size_t size() const { return data_.size() / schema_.size(); }
    std::size_t channels() const { return schema_.size(); }
    double sample_period() const { return schema_.sample_period(); }

    double at(std::size_t n, std::size_t c) const { return data_[n * schema_.size() + c]; }
    std::span<const double> row(std::size_t n) const {
        return std::span<const double>(data_).subspan(n * schema_.size(), schema_.size());
    }
    Sample sample(std::size_t n) const;
    Sample front() const { return sample(0); }
    Sample back() const { return sample(size() - 1); }
    std::vector<double> channel(std::size_t c) const;
    std::span<const double> data() const { return data_; }

    bool operator==(const Trajectory& other) const {
        return schema_.channels() == other.schema_.channels() &&
               schema_.sample_period() == other.schema_.sample_period() && data_ == other.data_;
    }

private:
    ChannelSchema schema_;
    std::vector<double> data_;
};

/// Start and end sample of one stroke; stroke_index counts from 1.
struct StrokeEndpoints {
    Sample start;
    Sample end;
    int stroke_index = 1;

    bool operator==(const StrokeEndpoints&) const = default;
};

/// Sum of Euclidean step lengths over the x/y channels.
double planar_path_length(const Trajectory& traj);

}  // namespace hvae
