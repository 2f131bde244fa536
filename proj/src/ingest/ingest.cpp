#include "hvae/ingest/ingest.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hvae::ingest {

void SegmentationConfig::validate() const {
    if (!(force_threshold > 0.0)) throw std::invalid_argument("force threshold must be positive");
    if (min_stroke_samples < 2) throw std::invalid_argument("min_stroke_samples must be at least 2");
}

namespace {

Trajectory slice(const Trajectory& traj, std::size_t begin, std::size_t end) {
    const std::size_t w = traj.channels();
    auto d = traj.data().subspan(begin * w, (end - begin) * w);
    return Trajectory(traj.schema(), std::vector<double>(d.begin(), d.end()));
}

}  // namespace

std::vector<Trajectory> segment_strokes(const RawRecording& rec, const SegmentationConfig& cfg) {
    cfg.validate();
    const auto& traj = rec.trajectory;
    const std::size_t fc = traj.schema().require(cfg.force_channel);
    std::vector<Trajectory> strokes;
    std::size_t n = 0;
    while (n < traj.size()) {
        if (traj.at(n, fc) < cfg.force_threshold) {
            ++n;
            continue;
        }
        std::size_t end = n;
        while (end < traj.size() && traj.at(end, fc) >= cfg.force_threshold) ++end;
        if (end - n >= cfg.min_stroke_samples) strokes.push_back(slice(traj, n, end));
        n = end;
    }
    if (strokes.empty()) throw std::runtime_error("no stroke found in recording '" + rec.label + "'");
    return strokes;
}

std::vector<StrokeEndpoints> extract_endpoints(std::span<const Trajectory> strokes) {
    if (strokes.empty()) throw std::invalid_argument("extract_endpoints: empty stroke list");
    std::vector<StrokeEndpoints> out;
    out.reserve(strokes.size());
    int m = 1;
    for (const auto& s : strokes) out.push_back({s.front(), s.back(), m++});
    return out;
}

Trajectory downsample(const Trajectory& traj, std::size_t target_n) {
    const std::size_t len = traj.size();
    if (target_n < 2) throw std::invalid_argument("downsample: target must be at least 2 samples");
    if (target_n > len)
        throw std::invalid_argument("downsample: target " + std::to_string(target_n) + " exceeds source length " +
                                    std::to_string(len));
    if (target_n == len) return traj;
    const std::size_t w = traj.channels();
    std::vector<double> data;
    data.reserve(target_n * w);
    const std::size_t span = len - 1, steps = target_n - 1;
    for (std::size_t k = 0; k < target_n; ++k) {
        const std::size_t idx = (2 * k * span + steps) / (2 * steps);  // round(k * span / steps)
        auto r = traj.row(idx);
        data.insert(data.end(), r.begin(), r.end());
    }
    const double period = traj.sample_period() * static_cast<double>(span) / static_cast<double>(steps);
    return Trajectory(traj.schema().with_sample_period(period), std::move(data));
}

Trajectory fit_length(const Trajectory& traj, std::size_t target_n) {
    if (target_n <= traj.size()) return downsample(traj, target_n);
    const std::size_t w = traj.channels();
    const double span = static_cast<double>(traj.size() - 1);
    std::vector<double> data(target_n * w);
    for (std::size_t k = 0; k < target_n; ++k) {
        const double u = span * static_cast<double>(k) / static_cast<double>(target_n - 1);
        std::size_t i = static_cast<std::size_t>(u);
        if (i >= traj.size() - 1) i = traj.size() - 2;
        const double a = u - static_cast<double>(i);
        for (std::size_t c = 0; c < w; ++c)
            data[k * w + c] = (k + 1 == target_n) ? traj.at(traj.size() - 1, c)
                                                   : traj.at(i, c) + a * (traj.at(i + 1, c) - traj.at(i, c));
    }
    const double period = traj.sample_period() * span / static_cast<double>(target_n - 1);
    return Trajectory(traj.schema().with_sample_period(period), std::move(data));
}

OffsetResult offset_to_origin(const Trajectory& traj) {
    const auto pos = traj.schema().indices_with_role(ChannelRole::Position);
    Sample start = traj.front();
    std::vector<double> data(traj.data().begin(), traj.data().end());
    const std::size_t w = traj.channels();
    for (std::size_t n = 0; n < traj.size(); ++n)
        for (std::size_t c : pos) data[n * w + c] -= start[c];
    return {Trajectory(traj.schema(), std::move(data)), std::move(start)};
}

Trajectory add_start(const Trajectory& offset, const Sample& start) {
    if (start.size() != offset.channels()) throw std::invalid_argument("add_start: start sample width mismatch");
    const auto pos = offset.schema().indices_with_role(ChannelRole::Position);
    std::vector<double> data(offset.data().begin(), offset.data().end());
    const std::size_t w = offset.channels();
    for (std::size_t n = 0; n < offset.size(); ++n)
        for (std::size_t c : pos) data[n * w + c] += start[c];
    return Trajectory(offset.schema(), std::move(data));
}

std::vector<double> rotation_angles(double step_deg) {
    if (!(step_deg > 0.0)) throw std::invalid_argument("rotation step must be positive");
    std::vector<double> out;
    for (int k = 0; k * step_deg < 360.0 - 1e-9; ++k) out.push_back(k * step_deg);
    return out;
}

std::vector<Trajectory> augment(std::span<const Trajectory> dataset, std::span<const double> angles_deg,
                                std::span<const Translation> translations, Pivot pivot) {
    if (angles_deg.empty()) throw std::invalid_argument("augment: empty angle list");
    if (dataset.empty()) return {};
    static const Translation kNone{};
    if (translations.empty()) translations = std::span<const Translation>(&kNone, 1);

    const auto& schema = dataset.front().schema();
    const std::size_t ix = schema.require("x"), iy = schema.require("y");
    const auto ivx = schema.index_of("v_x"), ivy = schema.index_of("v_y");

    double cx = 0.0, cy = 0.0;
    if (pivot == Pivot::Centroid) {
        double count = 0.0;
        for (const auto& t : dataset)
            for (std::size_t n = 0; n < t.size(); ++n) {
                cx += t.at(n, ix);
                cy += t.at(n, iy);
                count += 1.0;
            }
        cx /= count;
        cy /= count;
    }

    std::vector<Trajectory> out;
    out.reserve(dataset.size() * angles_deg.size() * translations.size());
    for (const auto& traj : dataset) {
        if (!traj.schema().same_channels(schema)) throw std::invalid_argument("augment: mixed schemas");
        const std::size_t w = traj.channels();
        for (double deg : angles_deg) {
            const bool rotate = std::fmod(deg, 360.0) != 0.0;
            const double rad = deg * std::numbers::pi / 180.0;
            const double cs = std::cos(rad), sn = std::sin(rad);
            for (const auto& tr : translations) {
                std::vector<double> data(traj.data().begin(), traj.data().end());
                for (std::size_t n = 0; n < traj.size(); ++n) {
                    double* row = data.data() + n * w;
                    if (rotate) {
                        const double x = row[ix] - cx, y = row[iy] - cy;
                        row[ix] = cx + cs * x - sn * y;
                        row[iy] = cy + sn * x + cs * y;
                        if (ivx && ivy) {
                            const double vx = row[*ivx], vy = row[*ivy];
                            row[*ivx] = cs * vx - sn * vy;
                            row[*ivy] = sn * vx + cs * vy;
                        }
                    }
                    if (tr.dx != 0.0) row[ix] += tr.dx;
                    if (tr.dy != 0.0) row[iy] += tr.dy;
                }
                out.emplace_back(traj.schema(), std::move(data));
            }
        }
    }
    return out;
}

}  // namespace hvae::ingest
