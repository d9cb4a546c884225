#pragma once

#include <filesystem>
#include <span>

#include <json.hpp>

#include "ccnls/grid.hpp"

namespace ccnls {

// Flat binary container: a fixed header followed by little-endian complex64
// pairs in row-major (t, x1, ..., xd, component) order.  A JSON sidecar
// <path>.json carries the same header plus free-form metadata.
struct ContainerHeader {
  int d = 1;
  double L = 0.0;
  int M = 0;
  int Q = 1;
  double dt = 0.0;
  int ncomp = 1;
};

struct ContainerData {
  ContainerHeader header;
  // values[c][q * M^d + x]
  std::vector<cvec> values;
};

void write_container(const std::filesystem::path& path, const ContainerData& data,
                     const nlohmann::json& metadata = nlohmann::json::object());
ContainerData read_container(const std::filesystem::path& path);

ContainerData to_container(const Field& f);
ContainerData to_container(const SpaceTimeSample& s);
// Bundles are stored as 3d components in the order u, v, w.
ContainerData to_container(std::span<const StateBundle> frames, double dt);

Field field_from_container(const ContainerData& c, int q = 0);
SpaceTimeSample sample_from_container(const ContainerData& c);
std::vector<StateBundle> bundles_from_container(const ContainerData& c);

}  // namespace ccnls
