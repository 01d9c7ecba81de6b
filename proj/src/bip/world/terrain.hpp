#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "bip/common/rng.hpp"

namespace bip {

enum class TerrainKind { kFlat, kSlope, kStairs, kRough };

TerrainKind terrain_kind_from_string(const std::string& s);
std::string terrain_kind_name(TerrainKind k);

struct TerrainConfig {
  double spacing = 0.05;       // m between grid points
  double x_min = -16.0;        // m
  double x_max = 16.0;         // m
  double extent = 6.0;         // challenge region is [0, extent]
  int max_level = 5;
  double max_slope_deg = 25.0;
  double max_stair_rise = 0.10;  // m
  int stair_steps = 3;
  double stair_tread = 0.30;   // m
  double max_rough_height = 0.04;  // m
  double rough_block = 0.25;   // m, width of one random profile
  double friction = 1.0;
};

// Uniform 1D heightfield with linear interpolation between grid points.
struct TerrainMap {
  TerrainKind kind = TerrainKind::kFlat;
  int level = 0;
  double x0 = 0.0;      // world x of heights[0]
  double spacing = 0.05;
  double extent = 6.0;
  double friction = 1.0;
  std::vector<double> heights;

  double height_at(double x) const;
  double slope_at(double x) const;           // dh/dx of the local segment
  Eigen::Vector2d normal_at(double x) const; // unit surface normal

  void to_csv(const std::string& path) const;
};

// Difficulty scales linearly with level up to the configured maxima
// (25 deg slope, 3-step 0.10 m stairs, 0.04 m random profiles at max level).
// Deterministic in seed.
TerrainMap generate_terrain(TerrainKind kind, int level, uint64_t seed,
                            const TerrainConfig& cfg);

}  // namespace bip
