#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "protogauss/gaussian.hpp"

namespace protogauss {

struct CalibrationResult {
  double lambda = 1.0;
  double lambda_max = 1.0;
  // achieved smoothed objective (s+1)*log(lambda) + sum log(1 - lambda*p_i)
  double objective = 0.0;
  // negatives were given but every one had zero averaged density
  bool all_densities_zero = false;
};

// Membership-probability scale for one concept. positive_count is the
// number of known training instances s; negatives are the vectors of
// training individuals not known to belong. p_i is the sample-averaged
// density of negative i under `samples`. Maximizes the smoothed objective
//   f(lambda) = (s+1) * log(lambda) + sum_i log(1 - lambda * p_i)
// over (0, lambda_max], where lambda_max = min(1, 1/max_i p_i, 1/p_peak)
// and p_peak is the sample-averaged peak density, which bounds p anywhere.
// f is concave, so the maximum is either at lambda_max or at the root of
// f'; the root is found by bisection to relative tolerance `tol`.
CalibrationResult estimate_lambda(std::size_t positive_count,
                                  std::span<const std::vector<double>> negatives,
                                  std::span<const DiagGaussian> samples,
                                  double tol = 1e-9);

// Sample-averaged log density of v: log((1/N) * sum_t N(v; sample_t)).
double average_log_density(std::span<const DiagGaussian> samples,
                           std::span<const double> v);

// Same bound with every sample at its own mode (the density's global peak).
double average_peak_log_density(std::span<const DiagGaussian> samples);

}  // namespace protogauss
