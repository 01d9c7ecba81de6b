#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace bip {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Versioned binary container: magic, format version, a JSON header (network
// widths, normalization constants, comparison-group tag, rng seed, ...)
// and a little-endian float64 parameter payload.
struct Checkpoint {
  nlohmann::json header;
  Eigen::VectorXd params;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace bip
