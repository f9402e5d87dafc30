#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "thermalign/transform.hpp"

namespace thermalign {

/// Outcome of one registration stage.
struct RegistrationReport {
  RigidTransform transform;
  double fitness = 0.0;
  double rmse = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
  bool converged = false;
  /// One entry per iteration.
  std::vector<double> trace;
};

}  // namespace thermalign
