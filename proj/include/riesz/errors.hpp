#pragma once

#include <stdexcept>
#include <string>

namespace riesz {

// Bad argument values (negative radii, too few nodes, malformed config values).
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Ambient dimension mismatch or an unsupported dimension.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Evaluation at a kernel singularity (coincident points, inversion center).
class SingularityError : public std::domain_error {
 public:
  explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace riesz
