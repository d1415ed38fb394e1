#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "efgcl/rl/mlp.hpp"

namespace efgcl::harness {

inline constexpr int kCheckpointVersion = 1;

/// Named networks, named vectors and string metadata. Teachers and students
/// share this container and its on-disk format: a versioned text header
/// followed by shortest round-trip decimal values, so save/load is exact.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::map<std::string, rl::Mlp> nets;
  std::map<std::string, Eigen::VectorXd> vectors;

  const rl::Mlp& net(const std::string& name) const;
  const Eigen::VectorXd& vector(const std::string& name) const;
  const std::string& get(const std::string& key) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
/// Throws ConfigError on a missing or unsupported version header or malformed body.
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace efgcl::harness
