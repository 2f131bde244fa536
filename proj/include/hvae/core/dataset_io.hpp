#pragma once

// Plain-text dataset container.
//
//   #hvae-dataset 1
//   #channels x,y,f_z
//   #units m,m,N
//   #roles position,position,force
//   #sample_period 0.008
//   #config key=value            (zero or more, provenance)
//   @record rows=<n> sample_period=<s> label=<text to end of line>
//   <v>,<v>,<v>                  (n rows, one value per channel)
//   ...
//
// Values use the shortest round-trip decimal form, so writing is
// byte-deterministic and reading restores every double exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hvae/core/text.hpp"
#include "hvae/core/trajectory.hpp"

namespace hvae {

inline constexpr int kDatasetFormatVersion = 1;

struct DatasetRecord {
    std::string label;
    double sample_period = 0.0;
    std::vector<double> data;  // rows * width, row-major
};

struct Dataset {
    ChannelSchema schema;
    std::vector<DatasetRecord> records;
    ConfigEntries config;

    std::size_t rows(std::size_t record) const { return records[record].data.size() / schema.size(); }

    /// Each record as a Trajectory (records need >= 2 rows).
    std::vector<Trajectory> trajectories() const;
    static Dataset from_trajectories(const std::vector<Trajectory>& trajs, const std::vector<std::string>& labels,
                                     ConfigEntries config = {});
};

void write_dataset(std::ostream& os, const Dataset& ds);
Dataset read_dataset(std::istream& is);

void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace hvae
