#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tacter {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or degenerate cross-section input (acos out of domain, sliver segments, ...).
struct GeometryError : Error {
  using Error::Error;
};

// Malformed parameter documents, schedules, or measurement files.
struct ConfigError : Error {
  using Error::Error;
};

// Non-finite derivative or state encountered while integrating; carries the arc length.
struct IntegrationError : Error {
  IntegrationError(const std::string& msg, double arc_length)
      : Error(msg + " (s = " + std::to_string(arc_length) + " mm)"), s(arc_length) {}
  double s;
};

// Near-singular local system; the model has no valid derivative at this state.
struct DegeneracyError : Error {
  DegeneracyError(const std::string& msg, double arc_length)
      : Error(msg + " (s = " + std::to_string(arc_length) + " mm)"), s(arc_length) {}
  double s;
};

inline const Vec3 kE3{0.0, 0.0, 1.0};

}  // namespace tacter
