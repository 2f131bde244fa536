#include "hvae/core/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace hvae {

std::vector<Trajectory> Dataset::trajectories() const {
    std::vector<Trajectory> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.emplace_back(schema.with_sample_period(rec.sample_period), rec.data);
    return out;
}

Dataset Dataset::from_trajectories(const std::vector<Trajectory>& trajs, const std::vector<std::string>& labels,
                                   ConfigEntries config) {
    if (trajs.empty()) throw std::invalid_argument("dataset needs at least one trajectory");
    if (!labels.empty() && labels.size() != trajs.size())
        throw std::invalid_argument("label count does not match trajectory count");
    Dataset ds{trajs.front().schema(), {}, std::move(config)};
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        if (!trajs[i].schema().same_channels(ds.schema))
            throw std::invalid_argument("trajectories do not share a schema");
        std::string label = labels.empty() ? "rec" + std::to_string(i) : labels[i];
        auto d = trajs[i].data();
        ds.records.push_back({std::move(label), trajs[i].sample_period(), std::vector<double>(d.begin(), d.end())});
    }
    return ds;
}

namespace {

template <typename F>
std::string join(const std::vector<Channel>& chans, F field) {
    std::string out;
    for (std::size_t i = 0; i < chans.size(); ++i) {
        if (i) out += ',';
        out += field(chans[i]);
    }
    return out;
}

std::string_view header_value(std::string_view line, std::string_view key) {
    if (line.substr(0, key.size()) != key) throw std::runtime_error("dataset: expected '" + std::string(key) + "'");
    return trim(line.substr(key.size()));
}

}  // namespace

void write_dataset(std::ostream& os, const Dataset& ds) {
    const auto& ch = ds.schema.channels();
    os << "#hvae-dataset " << kDatasetFormatVersion << '\n';
    os << "#channels " << join(ch, [](const Channel& c) { return c.name; }) << '\n';
    os << "#units " << join(ch, [](const Channel& c) { return c.unit; }) << '\n';
    os << "#roles " << join(ch, [](const Channel& c) { return std::string(to_string(c.role)); }) << '\n';
    os << "#sample_period " << format_double(ds.schema.sample_period()) << '\n';
    for (const auto& [k, v] : ds.config) os << "#config " << k << '=' << v << '\n';
    const std::size_t width = ds.schema.size();
    for (const auto& rec : ds.records) {
        if (rec.data.size() % width != 0) throw std::invalid_argument("record is not a whole number of rows");
        if (rec.label.find_first_of("\r\n") != std::string::npos)
            throw std::invalid_argument("record labels must fit on one line");
        os << "@record rows=" << rec.data.size() / width << " sample_period=" << format_double(rec.sample_period)
           << " label=" << rec.label << '\n';
        for (std::size_t i = 0; i < rec.data.size(); ++i) {
            os << format_double(rec.data[i]) << ((i + 1) % width == 0 ? '\n' : ',');
        }
    }
}

Dataset read_dataset(std::istream& is) {
    std::string line;
    auto next = [&](bool required) {
        while (std::getline(is, line)) {
            if (!trim(line).empty()) return true;
        }
        if (required) throw std::runtime_error("dataset: unexpected end of file");
        return false;
    };

    next(true);
    auto version = parse_int(header_value(line, "#hvae-dataset"));
    if (version != kDatasetFormatVersion)
        throw std::runtime_error("dataset: unsupported format version " + std::to_string(version));
    next(true);
    const std::string names_line(header_value(line, "#channels"));
    auto names = split(names_line, ',');
    std::string units_line, roles_line;
    next(true);
    units_line = std::string(header_value(line, "#units"));
    next(true);
    roles_line = std::string(header_value(line, "#roles"));
    auto units = split(units_line, ',');
    auto roles = split(roles_line, ',');
    if (units.size() != names.size() || roles.size() != names.size())
        throw std::runtime_error("dataset: channel header widths disagree");
    std::vector<Channel> channels;
    for (std::size_t i = 0; i < names.size(); ++i)
        channels.push_back({std::string(trim(names[i])), std::string(trim(units[i])), parse_channel_role(trim(roles[i]))});
    next(true);
    double period = parse_double(header_value(line, "#sample_period"));
    Dataset ds{ChannelSchema(std::move(channels), period), {}, {}};
    const std::size_t width = ds.schema.size();

    bool have = next(false);
    while (have && line.rfind("#config ", 0) == 0) {
        auto kv = std::string_view(line).substr(8);
        auto eq = kv.find('=');
        if (eq == std::string_view::npos) throw std::runtime_error("dataset: malformed #config line");
        ds.config.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
        have = next(false);
    }
    while (have) {
        if (line.rfind("@record", 0) != 0) throw std::runtime_error("dataset: expected @record, got '" + line + "'");
        DatasetRecord rec;
        long long rows = -1;
        rec.sample_period = period;
        // The label runs to the end of the line and may contain spaces.
        std::string_view head = std::string_view(line).substr(7);
        if (auto at = head.find(" label="); at != std::string_view::npos) {
            rec.label = std::string(head.substr(at + 7));
            head = head.substr(0, at);
        }
        for (auto tok : split(trim(head), ' ')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            auto eq = tok.find('=');
            if (eq == std::string_view::npos) throw std::runtime_error("dataset: malformed record header");
            auto key = tok.substr(0, eq);
            auto val = tok.substr(eq + 1);
            if (key == "rows") rows = parse_int(val);
            else if (key == "sample_period") rec.sample_period = parse_double(val);
        }
        if (rows < 0) throw std::runtime_error("dataset: record without row count");
        rec.data.reserve(static_cast<std::size_t>(rows) * width);
        for (long long r = 0; r < rows; ++r) {
            next(true);
            auto fields = split(trim(line), ',');
            if (fields.size() != width)
                throw std::runtime_error("dataset: row has " + std::to_string(fields.size()) + " values, expected " +
                                         std::to_string(width));
            for (auto f : fields) rec.data.push_back(parse_double(f));
        }
        ds.records.push_back(std::move(rec));
        have = next(false);
    }
    return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_dataset(os, ds);
    if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open dataset '" + path.string() + "'");
    return read_dataset(is);
}

}  // namespace hvae
