#ifndef VANS_TYPES_HPP
#define VANS_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace vans
{
  using Vec3 = Eigen::Vector3d;
  using Mat3 = Eigen::Matrix3d;
  using Vector = Eigen::VectorXd;

  // Error taxonomy. Configuration problems (bad degree, unknown model name,
  // unachievable packing target) are ConfigError; out-of-domain queries are
  // DomainError; calling an object before it is ready is StateError; solver
  // breakdowns (NaN residual, singular matrix, iteration cap) are SolverError;
  // filesystem trouble is IoError.
  struct ConfigError : std::invalid_argument
  {
    explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
  };

  struct DomainError : std::domain_error
  {
    explicit DomainError(const std::string &what) : std::domain_error(what) {}
  };

  struct StateError : std::logic_error
  {
    explicit StateError(const std::string &what) : std::logic_error(what) {}
  };

  struct SolverError : std::runtime_error
  {
    explicit SolverError(const std::string &what) : std::runtime_error(what) {}
  };

  struct IoError : std::runtime_error
  {
    explicit IoError(const std::string &what) : std::runtime_error(what) {}
  };
} // namespace vans

#endif
