#include "hvae/compose/composer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hvae/ingest/ingest.hpp"

namespace hvae {

std::size_t MultiStrokeTrajectory::total_samples() const {
    std::size_t n = 0;
    for (const auto& s : strokes) n += s.size();
    return n;
}

void check_compatible(const PointModel& point, const TrajModel& traj) {
    if (!point.schema().same_channels(traj.schema()))
        throw std::invalid_argument("point model and trajectory model use different channel sets (" +
                                    std::to_string(point.schema().size()) + " vs " +
                                    std::to_string(traj.schema().size()) + " channels)");
}

void ComposedPlan::validate() const {
    if (!point_model || !traj_model) throw std::invalid_argument("plan needs both models");
    check_compatible(*point_model, *traj_model);
    if (z_point.size() != point_model->config().latent)
        throw std::invalid_argument("z_point has dimension " + std::to_string(z_point.size()) + ", point model expects " +
                                    std::to_string(point_model->config().latent));
    if (m_count == 0 || m_count > point_model->config().max_strokes)
        throw std::invalid_argument("stroke count " + std::to_string(m_count) + " outside 1.." +
                                    std::to_string(point_model->config().max_strokes));
    if (!z_traj.empty() && z_traj.size() != 1 && z_traj.size() != m_count)
        throw std::invalid_argument("z_traj must hold one latent per stroke or a single shared latent");
    for (const auto& z : z_traj)
        if (z.size() != traj_model->config().latent)
            throw std::invalid_argument("z_traj entry has dimension " + std::to_string(z.size()) +
                                        ", trajectory model expects " + std::to_string(traj_model->config().latent));
}

Composition compose(const ComposedPlan& plan) {
    plan.validate();
    const PointModel& point = *plan.point_model;
    const TrajModel& traj = *plan.traj_model;
    const auto pos = point.schema().indices_with_role(ChannelRole::Position);
    const std::vector<double> zero(traj.config().latent, 0.0);

    Composition out;
    out.endpoints = point.decode(plan.z_point, plan.m_count);
    for (std::size_t m = 0; m < out.endpoints.size(); ++m) {
        const auto& e = out.endpoints[m];
        Sample end_offset = e.end;
        for (std::size_t c : pos) end_offset[c] = e.end[c] - e.start[c];
        const std::vector<double>& z = plan.z_traj.empty() ? zero : plan.z_traj[plan.z_traj.size() == 1 ? 0 : m];
        DecodedStroke d = traj.decode(z, end_offset);
        Trajectory stroke = ingest::add_start(d.trajectory, e.start);
        double err = 0.0;
        for (std::size_t c : pos) err += std::pow(stroke.at(stroke.size() - 1, c) - e.end[c], 2);
        out.end_errors.push_back(std::sqrt(err));
        out.trajectory.strokes.push_back(std::move(stroke));
    }
    return out;
}

ComposedPlan swap_models(const ComposedPlan& plan, std::shared_ptr<const TrajModel> traj_model) {
    if (!traj_model) throw std::invalid_argument("swap needs a trajectory model");
    if (!plan.point_model) throw std::invalid_argument("plan has no point model");
    check_compatible(*plan.point_model, *traj_model);
    ComposedPlan next = plan;
    next.traj_model = std::move(traj_model);
    return next;
}

// ---------------------------------------------------------------------------
// Resampling

NaturalSpline::NaturalSpline(std::vector<double> values, double spacing) : y_(std::move(values)), h_(spacing) {
    const std::size_t n = y_.size();
    if (n < 2) throw std::invalid_argument("spline needs at least two knots");
    if (!(h_ > 0.0)) throw std::invalid_argument("spline spacing must be positive");
    m_.assign(n, 0.0);
    if (n < 3) return;
    // Interior rows: m[i-1] + 4 m[i] + m[i+1] = 6 (y[i+1] - 2 y[i] + y[i-1]) / h^2,
    // natural ends m[0] = m[n-1] = 0. Thomas algorithm.
    const std::size_t k = n - 2;
    std::vector<double> cp(k), dp(k);
    const double s = 6.0 / (h_ * h_);
    for (std::size_t i = 0; i < k; ++i) {
        const double rhs = s * (y_[i + 2] - 2.0 * y_[i + 1] + y_[i]);
        const double denom = 4.0 - (i > 0 ? cp[i - 1] : 0.0);
        cp[i] = 1.0 / denom;
        dp[i] = (rhs - (i > 0 ? dp[i - 1] : 0.0)) / denom;
    }
    m_[k] = dp[k - 1];
    for (std::size_t i = k - 1; i-- > 0;) m_[i + 1] = dp[i] - cp[i] * m_[i + 2];
}

double NaturalSpline::value(std::size_t i, double u) const {
    if (u == 0.0) return y_[i];
    const double b = (y_[i + 1] - y_[i]) / h_ - h_ * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    const double c = 0.5 * m_[i];
    const double d = (m_[i + 1] - m_[i]) / (6.0 * h_);
    return y_[i] + u * (b + u * (c + u * d));
}

double NaturalSpline::derivative(std::size_t i, double u) const {
    const double b = (y_[i + 1] - y_[i]) / h_ - h_ * (2.0 * m_[i] + m_[i + 1]) / 6.0;
    const double c = 0.5 * m_[i];
    const double d = (m_[i + 1] - m_[i]) / (6.0 * h_);
    return b + u * (2.0 * c + 3.0 * d * u);
}

std::size_t resampled_count(std::size_t n, double source_period, double target_period) {
    if (n < 2) throw std::invalid_argument("a stroke needs at least 2 samples to resample");
    if (!(source_period > 0.0) || !(target_period > 0.0)) throw std::invalid_argument("sample periods must be positive");
    const double span = static_cast<double>(n - 1) * source_period / target_period;
    return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
}

namespace {

// Interval index and local offset of target sample j. When the period ratio
// is an integer the knots are hit exactly (u == 0).
struct GridMap {
    double source;
    double target;
    std::size_t ratio = 0;  // nonzero when source / target is integral

    GridMap(double src, double tgt) : source(src), target(tgt) {
        const double r = src / tgt;
        const double rr = std::round(r);
        if (rr >= 1.0 && std::abs(r - rr) < 1e-9) ratio = static_cast<std::size_t>(rr);
    }

    std::pair<std::size_t, double> locate(std::size_t j, std::size_t knots) const {
        std::size_t i;
        double u;
        if (ratio != 0) {
            i = j / ratio;
            u = static_cast<double>(j % ratio) * target;
        } else {
            const double t = static_cast<double>(j) * target;
            i = static_cast<std::size_t>(std::floor(t / source + 1e-12));
            u = t - static_cast<double>(i) * source;
            if (u < 0.0) u = 0.0;
        }
        if (i == knots - 1 && u == 0.0) return {i, u};  // the last knot itself
        if (i >= knots - 1) {
            // Past the last interval start: evaluate from the final interval.
            const std::size_t last = knots - 2;
            u += static_cast<double>(i - last) * source;
            i = last;
        }
        return {i, u};
    }
};

}  // namespace

Resampled resample_spline(const MultiStrokeTrajectory& traj, const ResampleOptions& options) {
    if (!(options.target_period > 0.0)) throw std::invalid_argument("target period must be positive");
    Resampled result;
    result.trajectory.config = traj.config;
    for (std::size_t s = 0; s < traj.strokes.size(); ++s) {
        const Trajectory& src = traj.strokes[s];
        const double period = src.sample_period();
        if (!(period > options.target_period))
            throw std::invalid_argument("source period must exceed the target period");
        const ChannelSchema& schema = src.schema();
        const std::size_t n = src.size(), C = src.channels();
        const std::size_t count = resampled_count(n, period, options.target_period);

        std::vector<Channel> channels = schema.channels();
        std::optional<std::size_t> ix = schema.index_of("x"), iy = schema.index_of("y");
        std::optional<std::size_t> ivx = schema.index_of("v_x"), ivy = schema.index_of("v_y");
        const bool velocity = options.add_velocity && ix && iy;
        if (velocity && !ivx) {
            ivx = channels.size();
            channels.push_back({"v_x", "m/s", ChannelRole::Velocity});
        }
        if (velocity && !ivy) {
            ivy = channels.size();
            channels.push_back({"v_y", "m/s", ChannelRole::Velocity});
        }
        const std::size_t W = channels.size();

        const bool linear = n < 4;
        if (linear)
            result.warnings.push_back("stroke " + std::to_string(s + 1) + " has " + std::to_string(n) +
                                      " samples; using linear interpolation");
        std::vector<NaturalSpline> splines;
        if (!linear)
            for (std::size_t c = 0; c < C; ++c) splines.emplace_back(src.channel(c), period);

        const GridMap grid(period, options.target_period);
        std::vector<double> data(count * W, 0.0);
        for (std::size_t j = 0; j < count; ++j) {
            auto [i, u] = grid.locate(j, n);
            double* row = data.data() + j * W;
            if (i == n - 1) {
                // Last knot: copy it, and take the velocity at the end of the final interval.
                for (std::size_t c = 0; c < C; ++c) row[c] = src.at(i, c);
                i = n - 2;
                u = period;
                if (velocity)
                    for (auto [pc, vc] : {std::pair{*ix, *ivx}, std::pair{*iy, *ivy}})
                        row[vc] = linear ? (src.at(i + 1, pc) - src.at(i, pc)) / period : splines[pc].derivative(i, u);
                continue;
            }
            for (std::size_t c = 0; c < C; ++c) {
                if (!linear) {
                    row[c] = splines[c].value(i, u);
                } else {
                    const double a = src.at(i, c), b = src.at(i + 1, c);
                    row[c] = u == 0.0 ? a : a + (b - a) * (u / period);
                }
            }
            if (velocity) {
                for (auto [pc, vc] : {std::pair{*ix, *ivx}, std::pair{*iy, *ivy}}) {
                    row[vc] = linear ? (src.at(i + 1, pc) - src.at(i, pc)) / period : splines[pc].derivative(i, u);
                }
            }
        }
        result.trajectory.strokes.emplace_back(ChannelSchema(std::move(channels), options.target_period),
                                               std::move(data));
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr std::string_view kCsvMagic = "#hvae-trajectory 1";

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

void write_csv(std::ostream& out, const MultiStrokeTrajectory& traj) {
    out << kCsvMagic << '\n';
    std::vector<std::string> names, units, roles, periods;
    if (!traj.strokes.empty()) {
        const ChannelSchema& schema = traj.strokes.front().schema();
        for (const auto& ch : schema.channels()) {
            names.push_back(ch.name);
            units.push_back(ch.unit);
            roles.emplace_back(to_string(ch.role));
        }
        for (const auto& s : traj.strokes) {
            if (!s.schema().same_channels(schema)) throw std::invalid_argument("strokes have different channel sets");
            periods.push_back(format_double(s.sample_period()));
        }
    }
    out << "#channels " << join(names, ',') << '\n';
    out << "#units " << join(units, ',') << '\n';
    out << "#roles " << join(roles, ',') << '\n';
    out << "#stroke_periods " << join(periods, ',') << '\n';
    for (const auto& [k, v] : traj.config) {
        if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
            throw std::invalid_argument("config entry '" + k + "' cannot be written on one line");
        out << "#config " << k << '=' << v << '\n';
    }
    out << "stroke";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (std::size_t s = 0; s < traj.strokes.size(); ++s) {
        const Trajectory& t = traj.strokes[s];
        for (std::size_t n = 0; n < t.size(); ++n) {
            out << (s + 1);
            for (double v : t.row(n)) out << ',' << format_double(v);
            out << '\n';
        }
    }
}

MultiStrokeTrajectory read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvMagic)
        throw std::runtime_error("not a trajectory CSV (missing '" + std::string(kCsvMagic) + "' header)");
    std::vector<std::string> names, units, roles;
    std::vector<double> periods;
    MultiStrokeTrajectory out;
    auto list = [](std::string_view rest) {
        std::vector<std::string> v;
        rest = trim(rest);
        if (rest.empty()) return v;
        for (auto p : split(rest, ',')) v.emplace_back(trim(p));
        return v;
    };
    bool header_row = false;
    std::vector<std::vector<double>> rows;
    std::vector<long long> stroke_ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view l = trim(line);
        if (l.empty()) continue;
        if (l.starts_with("#channels")) names = list(l.substr(9));
        else if (l.starts_with("#units")) units = list(l.substr(6));
        else if (l.starts_with("#roles")) roles = list(l.substr(6));
        else if (l.starts_with("#stroke_periods")) {
            for (const auto& p : list(l.substr(15))) periods.push_back(parse_double(p));
        } else if (l.starts_with("#config ")) {
            auto kv = l.substr(8);
            auto eq = kv.find('=');
            if (eq == std::string_view::npos) throw std::runtime_error("line " + std::to_string(line_no) + ": bad #config");
            out.config.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
        } else if (l.starts_with("#")) {
            continue;
        } else if (!header_row) {
            header_row = true;
        } else {
            auto cells = split(l, ',');
            if (cells.size() != names.size() + 1)
                throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(names.size() + 1) + " fields");
            stroke_ids.push_back(parse_int(trim(cells[0])));
            std::vector<double> r;
            for (std::size_t i = 1; i < cells.size(); ++i) r.push_back(parse_double(trim(cells[i])));
            rows.push_back(std::move(r));
        }
    }
    if (names.empty()) {
        if (!rows.empty()) throw std::runtime_error("trajectory CSV has rows but no channels");
        return out;
    }
    if (units.size() != names.size() || roles.size() != names.size())
        throw std::runtime_error("trajectory CSV channel, unit and role lists differ in length");
    std::vector<Channel> channels;
    for (std::size_t i = 0; i < names.size(); ++i) channels.push_back({names[i], units[i], parse_channel_role(roles[i])});

    std::size_t r = 0;
    for (std::size_t s = 0; s < periods.size(); ++s) {
        std::vector<double> data;
        while (r < rows.size() && stroke_ids[r] == static_cast<long long>(s + 1)) {
            data.insert(data.end(), rows[r].begin(), rows[r].end());
            ++r;
        }
        out.strokes.emplace_back(ChannelSchema(channels, periods[s]), std::move(data));
    }
    if (r != rows.size()) throw std::runtime_error("trajectory CSV stroke column is not 1..M in order");
    return out;
}

void save_csv(const std::string& path, const MultiStrokeTrajectory& traj) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(f, traj);
    if (!f) throw std::runtime_error("error writing '" + path + "'");
}

MultiStrokeTrajectory load_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read '" + path + "'");
    return read_csv(f);
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string fixed3(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    std::string s(buf, r.ptr);
    return s == "-0.000" ? "0.000" : s;
}

}  // namespace

namespace {

std::string xml_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg(std::ostream& out, const MultiStrokeTrajectory& traj, const SvgOptions& options) {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    bool any = false;
    std::vector<double> mean_force;
    for (const auto& s : traj.strokes) {
        const std::size_t ix = s.schema().require("x"), iy = s.schema().require("y");
        for (std::size_t n = 0; n < s.size(); ++n) {
            const double x = s.at(n, ix), y = s.at(n, iy);
            if (!any) {
                xmin = xmax = x;
                ymin = ymax = y;
                any = true;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        const auto force = s.schema().indices_with_role(ChannelRole::Force);
        double f = 0.0;
        if (!force.empty()) {
            for (std::size_t n = 0; n < s.size(); ++n) f += s.at(n, force.front());
            f /= static_cast<double>(s.size());
        }
        mean_force.push_back(f);
    }
    const double k = options.pixels_per_meter, m = options.margin;
    const double width = 2.0 * m + (xmax - xmin) * k, height = 2.0 * m + (ymax - ymin) * k;
    const double fmax = mean_force.empty() ? 0.0 : *std::max_element(mean_force.begin(), mean_force.end());

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed3(width) << "\" height=\"" << fixed3(height)
        << "\" viewBox=\"0 0 " << fixed3(width) << ' ' << fixed3(height) << "\">\n";
    if (!traj.config.empty()) {
        out << "  <metadata id=\"hvae-config\">\n";
        for (const auto& [key, value] : traj.config) out << "    " << xml_escape(key + "=" + value) << '\n';
        out << "  </metadata>\n";
    }
    for (std::size_t si = 0; si < traj.strokes.size(); ++si) {
        const auto& s = traj.strokes[si];
        const std::size_t ix = s.schema().require("x"), iy = s.schema().require("y");
        const double w = fmax > 0.0 ? options.min_width + (options.max_width - options.min_width) * mean_force[si] / fmax
                                    : options.min_width;
        out << "  <polyline id=\"stroke-" << (si + 1) << "\" fill=\"none\" stroke=\"black\" stroke-linecap=\"round\" "
            << "stroke-linejoin=\"round\" stroke-width=\"" << fixed3(w) << "\" points=\"";
        for (std::size_t n = 0; n < s.size(); ++n) {
            if (n) out << ' ';
            out << fixed3(m + (s.at(n, ix) - xmin) * k) << ',' << fixed3(m + (ymax - s.at(n, iy)) * k);
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

void save_svg(const std::string& path, const MultiStrokeTrajectory& traj, const SvgOptions& options) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    write_svg(f, traj, options);
    if (!f) throw std::runtime_error("error writing '" + path + "'");
}

}  // namespace hvae
