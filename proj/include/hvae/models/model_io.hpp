#pragma once

// Model files: one JSON document holding the format tag and version, the
// model kind, channel schema, normalization stats, hyperparameters, the run
// config that produced it, and every parameter block in declaration order.
// Keys are written in a fixed order and doubles in shortest round-trip form,
// so identical models give identical bytes.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hvae/models/point_model.hpp"
#include "hvae/models/traj_model.hpp"

namespace hvae {

inline constexpr int kModelFormatVersion = 1;

enum class ModelKind { Point, Traj };

void write_model(std::ostream& out, const PointModel& model);
void write_model(std::ostream& out, const TrajModel& model);

/// Throws std::runtime_error on a malformed file, a version or kind
/// mismatch, or parameter blocks that disagree with the rebuilt layout.
PointModel read_point_model(std::istream& in);
TrajModel read_traj_model(std::istream& in);

void save_model(const std::filesystem::path& path, const PointModel& model);
void save_model(const std::filesystem::path& path, const TrajModel& model);
PointModel load_point_model(const std::filesystem::path& path);
TrajModel load_traj_model(const std::filesystem::path& path);

/// Reads only the header to tell the two kinds apart.
ModelKind peek_model_kind(const std::filesystem::path& path);

}  // namespace hvae
