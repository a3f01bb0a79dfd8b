#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mpsaw {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Thrown for malformed meshes or failed grid generation.
struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a local or global discretization step cannot be completed.
struct DiscretizationError : std::runtime_error {
  explicit DiscretizationError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by linear solvers (singular factorization, divergence, bad input).
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown for invalid scenario configurations.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mpsaw
