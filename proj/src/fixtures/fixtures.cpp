#include "hvae/fixtures/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "hvae/ingest/ingest.hpp"

namespace hvae::fixtures {

StrokeKind parse_stroke_kind(const std::string& text) {
    if (text == "straight") return StrokeKind::Straight;
    if (text == "zigzag") return StrokeKind::Zigzag;
    if (text == "arc") return StrokeKind::Arc;
    throw std::invalid_argument("unknown stroke kind '" + text + "'");
}

void SyntheticStrokeSpec::validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("stroke length must be positive");
    if (!(peak_force > 0.25)) throw std::invalid_argument("peak force must exceed the 0.25 N contact threshold");
    if (amplitude < 0.0 || frequency < 0.0 || noise_sigma < 0.0)
        throw std::invalid_argument("amplitude, frequency and noise must be non-negative");
    if (base_fraction < 0.0 || base_fraction > 1.0) throw std::invalid_argument("base_fraction must be in [0, 1]");
}

namespace {

double trapezoid(double s, double peak, double base_fraction) {
    constexpr double ramp = 0.2;
    const double base = base_fraction * peak;
    if (s < ramp) return base + (peak - base) * s / ramp;
    if (s > 1.0 - ramp) return base + (peak - base) * (1.0 - s) / ramp;
    return peak;
}

}  // namespace

Trajectory make_stroke(const SyntheticStrokeSpec& spec, std::size_t n_samples, nn::Rng& rng) {
    spec.validate();
    if (n_samples < 2) throw std::invalid_argument("make_stroke needs at least 2 samples");
    const double rad = spec.angle_deg * std::numbers::pi / 180.0;
    const double ux = std::cos(rad), uy = std::sin(rad);
    std::vector<double> data;
    data.reserve(n_samples * 3);
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(n_samples - 1);
        const double along = s * spec.length;
        double lateral = 0.0;
        switch (spec.kind) {
            case StrokeKind::Straight: break;
            case StrokeKind::Zigzag: lateral = spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.frequency * s); break;
            case StrokeKind::Arc: lateral = spec.amplitude * std::sin(std::numbers::pi * s); break;
        }
        double nx = spec.noise_sigma * rng.normal();
        double ny = spec.noise_sigma * rng.normal();
        if (k == 0) nx = ny = 0.0;
        data.push_back(along * ux - lateral * uy + nx);
        data.push_back(along * uy + lateral * ux + ny);
        data.push_back(spec.profile == ForceProfile::Constant ? spec.peak_force
                                                              : trapezoid(s, spec.peak_force, spec.base_fraction));
    }
    return Trajectory(ChannelSchema::planar_with_force(ingest::kRecordingPeriod), std::move(data));
}

namespace {

struct Segment {
    double x0, y0, x1, y1;
};

const std::map<char, std::vector<Segment>>& glyphs() {
    static const std::map<char, std::vector<Segment>> table{
        {'A', {{0.0, 0.0, 0.5, 0.8}, {0.5, 0.8, 1.0, 0.0}, {0.1875, 0.3, 0.8125, 0.3}}},
        {'E', {{0.0, 1.0, 0.0, 0.0}, {0.0, 1.0, 0.7, 1.0}, {0.0, 0.5, 0.6, 0.5}, {0.0, 0.0, 0.7, 0.0}}},
        {'F', {{0.0, 1.0, 0.0, 0.0}, {0.0, 1.0, 0.7, 1.0}, {0.0, 0.5, 0.6, 0.5}}},
        {'H', {{0.0, 1.0, 0.0, 0.0}, {0.7, 1.0, 0.7, 0.0}, {0.0, 0.5, 0.7, 0.5}}},
        {'I', {{0.35, 1.0, 0.35, 0.0}}},
        {'K', {{0.0, 1.0, 0.0, 0.0}, {0.7, 1.0, 0.0, 0.45}, {0.2, 0.6, 0.7, 0.0}}},
        {'L', {{0.0, 1.0, 0.0, 0.0}, {0.0, 0.0, 0.7, 0.0}}},
        {'M', {{0.0, 0.0, 0.0, 1.0}, {0.0, 1.0, 0.4, 0.3}, {0.4, 0.3, 0.8, 1.0}, {0.8, 1.0, 0.8, 0.0}}},
        {'N', {{0.0, 0.0, 0.0, 1.0}, {0.0, 1.0, 0.7, 0.0}, {0.7, 0.0, 0.7, 1.0}}},
        {'T', {{0.0, 1.0, 0.8, 1.0}, {0.4, 1.0, 0.4, 0.0}}},
        {'V', {{0.0, 1.0, 0.4, 0.0}, {0.4, 0.0, 0.8, 1.0}}},
        {'W', {{0.0, 1.0, 0.25, 0.0}, {0.25, 0.0, 0.5, 0.7}, {0.5, 0.7, 0.75, 0.0}, {0.75, 0.0, 1.0, 1.0}}},
        {'X', {{0.0, 1.0, 0.7, 0.0}, {0.7, 1.0, 0.0, 0.0}}},
        {'Y', {{0.0, 1.0, 0.35, 0.5}, {0.7, 1.0, 0.35, 0.5}, {0.35, 0.5, 0.35, 0.0}}},
        {'Z', {{0.0, 1.0, 0.7, 1.0}, {0.7, 1.0, 0.0, 0.0}, {0.0, 0.0, 0.7, 0.0}}},
    };
    return table;
}

}  // namespace

const std::string& supported_letters() {
    static const std::string letters = [] {
        std::string s;
        for (const auto& [c, _] : glyphs()) s += c;
        return s;
    }();
    return letters;
}

std::size_t canonical_stroke_count(char letter) {
    auto it = glyphs().find(letter);
    if (it == glyphs().end()) throw std::invalid_argument(std::string("unsupported letter '") + letter + "'");
    return it->second.size();
}

Character make_character(char letter, double scale, nn::Rng& rng, const CharacterOptions& options) {
    auto it = glyphs().find(letter);
    if (it == glyphs().end()) throw std::invalid_argument(std::string("unsupported letter '") + letter + "'");
    if (!(scale > 0.0)) throw std::invalid_argument("character scale must be positive");
    const double dt = ingest::kRecordingPeriod;

    std::vector<Segment> strokes = it->second;
    for (auto& s : strokes) {
        s.x0 = s.x0 * scale + options.corner_jitter * rng.normal();
        s.y0 = s.y0 * scale + options.corner_jitter * rng.normal();
        s.x1 = s.x1 * scale + options.corner_jitter * rng.normal();
        s.y1 = s.y1 * scale + options.corner_jitter * rng.normal();
    }

    std::vector<double> data;
    auto push = [&](double x, double y, double f) {
        data.push_back(x);
        data.push_back(y);
        data.push_back(f);
    };
    auto travel = [&](double xa, double ya, double xb, double yb, std::size_t n) {
        for (std::size_t k = 1; k < n; ++k) {
            const double s = static_cast<double>(k) / static_cast<double>(n);
            push(xa + s * (xb - xa), ya + s * (yb - ya), 0.0);
        }
    };

    Character ch{std::string(1, letter), {}, Trajectory(ChannelSchema::planar_with_force(dt), {0, 0, 0, 0, 0, 0})};
    for (std::size_t k = 0; k < options.idle_samples; ++k) push(strokes.front().x0, strokes.front().y0, 0.0);

    const double peak = options.peak_force;
    int m = 1;
    for (std::size_t i = 0; i < strokes.size(); ++i) {
        const auto& s = strokes[i];
        const double len = std::hypot(s.x1 - s.x0, s.y1 - s.y0);
        const auto n = std::max<std::size_t>(options.min_stroke_samples,
                                             static_cast<std::size_t>(std::lround(len / (options.speed * dt))) + 1);
        for (std::size_t k = 0; k < n; ++k) {
            const double u = static_cast<double>(k) / static_cast<double>(n - 1);
            const double nx = options.noise_sigma * rng.normal();
            const double ny = options.noise_sigma * rng.normal();
            push(s.x0 + u * (s.x1 - s.x0) + nx, s.y0 + u * (s.y1 - s.y0) + ny,
                 trapezoid(u, peak, options.base_fraction));
        }
        const std::size_t first = data.size() / 3 - n;
        const std::size_t last = data.size() / 3 - 1;
        ch.endpoints.push_back({Sample({data[first * 3], data[first * 3 + 1], data[first * 3 + 2]}),
                                Sample({data[last * 3], data[last * 3 + 1], data[last * 3 + 2]}), m++});
        if (i + 1 < strokes.size()) {
            const auto& next = strokes[i + 1];
            const double gap = std::hypot(next.x0 - data[last * 3], next.y0 - data[last * 3 + 1]);
            const auto ng = std::max<std::size_t>(
                options.idle_samples, static_cast<std::size_t>(std::lround(gap / (options.travel_speed * dt))) + 1);
            // Lift off in place first so the pen-up gap always has zero-force samples.
            push(data[last * 3], data[last * 3 + 1], 0.0);
            travel(data[last * 3], data[last * 3 + 1], next.x0, next.y0, ng);
        }
    }
    const double ex = data[data.size() - 3], ey = data[data.size() - 2];
    for (std::size_t k = 0; k < options.idle_samples; ++k) push(ex, ey, 0.0);
    ch.recording = Trajectory(ChannelSchema::planar_with_force(dt), std::move(data));
    return ch;
}

}  // namespace hvae::fixtures
