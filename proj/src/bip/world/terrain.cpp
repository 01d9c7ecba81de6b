#include "bip/world/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace bip {

TerrainKind terrain_kind_from_string(const std::string& s) {
  if (s == "flat") return TerrainKind::kFlat;
  if (s == "slope") return TerrainKind::kSlope;
  if (s == "stairs") return TerrainKind::kStairs;
  if (s == "rough_profiles" || s == "rough") return TerrainKind::kRough;
  throw std::invalid_argument("unknown terrain kind: " + s);
}

std::string terrain_kind_name(TerrainKind k) {
  switch (k) {
    case TerrainKind::kFlat: return "flat";
    case TerrainKind::kSlope: return "slope";
    case TerrainKind::kStairs: return "stairs";
    case TerrainKind::kRough: return "rough_profiles";
  }
  return "?";
}

double TerrainMap::height_at(double x) const {
  const int n = static_cast<int>(heights.size());
  const double u = (x - x0) / spacing;
  if (u <= 0.0) return heights.front();
  if (u >= n - 1) return heights.back();
  const int i = static_cast<int>(u);
  const double f = u - i;
  return heights[i] * (1.0 - f) + heights[i + 1] * f;
}

double TerrainMap::slope_at(double x) const {
  const int n = static_cast<int>(heights.size());
  const double u = (x - x0) / spacing;
  if (u <= 0.0 || u >= n - 1) return 0.0;
  const int i = static_cast<int>(u);
  return (heights[i + 1] - heights[i]) / spacing;
}

Eigen::Vector2d TerrainMap::normal_at(double x) const {
  const double s = slope_at(x);
  Eigen::Vector2d n(-s, 1.0);
  return n / n.norm();
}

void TerrainMap::to_csv(const std::string& path) const {
  std::ofstream out(path);
  out << "x,height\n";
  for (size_t i = 0; i < heights.size(); ++i)
    out << x0 + spacing * static_cast<double>(i) << "," << heights[i] << "\n";
}

TerrainMap generate_terrain(TerrainKind kind, int level, uint64_t seed,
                            const TerrainConfig& cfg) {
  if (level < 0 || level > cfg.max_level)
    throw std::invalid_argument("terrain level out of range");
  TerrainMap map;
  map.kind = kind;
  map.level = level;
  map.x0 = cfg.x_min;
  map.spacing = cfg.spacing;
  map.extent = cfg.extent;
  map.friction = cfg.friction;
  const int n =
      static_cast<int>(std::round((cfg.x_max - cfg.x_min) / cfg.spacing)) + 1;
  map.heights.assign(n, 0.0);

  const double difficulty =
      cfg.max_level > 0 ? static_cast<double>(level) / cfg.max_level : 0.0;
  Rng rng(seed);
  auto xs = [&](int i) { return cfg.x_min + cfg.spacing * i; };

  switch (kind) {
    case TerrainKind::kFlat:
      break;
    case TerrainKind::kSlope: {
      // Up-ramp over the first half of the challenge region, down the second.
      const double grade =
          std::tan(difficulty * cfg.max_slope_deg * M_PI / 180.0);
      const double half = cfg.extent / 2.0;
      for (int i = 0; i < n; ++i) {
        const double x = xs(i);
        if (x <= 0.0 || x >= cfg.extent) continue;
        map.heights[i] = x <= half ? grade * x : grade * (cfg.extent - x);
      }
      break;
    }
    case TerrainKind::kStairs: {
      // stair_steps up, a landing, stair_steps down; piecewise-constant treads.
      const double rise = difficulty * cfg.max_stair_rise;
      const double landing = 1.0;
      for (int i = 0; i < n; ++i) {
        const double x = xs(i);
        if (x < cfg.stair_tread || x >= cfg.extent) continue;
        const double up_end = cfg.stair_tread * (1 + cfg.stair_steps);
        const double down_start = up_end + landing;
        if (x < up_end) {
          const int step = static_cast<int>((x - cfg.stair_tread) / cfg.stair_tread) + 1;
          map.heights[i] = rise * std::min(step, cfg.stair_steps);
        } else if (x < down_start) {
          map.heights[i] = rise * cfg.stair_steps;
        } else {
          const int down = static_cast<int>((x - down_start) / cfg.stair_tread) + 1;
          map.heights[i] = rise * std::max(cfg.stair_steps - down, 0);
        }
      }
      break;
    }
    case TerrainKind::kRough: {
      // Random rectangular profiles across the challenge region.
      const double amp = difficulty * cfg.max_rough_height;
      const int cells_per_block =
          std::max(1, static_cast<int>(std::round(cfg.rough_block / cfg.spacing)));
      double h = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = xs(i);
        const int cell = static_cast<int>((x - cfg.x_min) / cfg.spacing);
        if (cell % cells_per_block == 0) h = rng.uniform(0.0, amp);
        if (x <= 0.0 || x >= cfg.extent) continue;
        map.heights[i] = h;
      }
      break;
    }
  }
  return map;
}

}  // namespace bip
