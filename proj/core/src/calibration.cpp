#include "protogauss/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "protogauss/errors.hpp"

namespace protogauss {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// f'(lambda) * lambda = (s+1) - sum_i t_i / (1 - t_i) with t_i = lambda*p_i;
// same sign as f', defined on (0, lambda_max)
double scaled_slope(double s_plus_one, double log_lambda,
                    std::span<const double> log_densities) {
  double total = s_plus_one;
  for (const double lp : log_densities) {
    const double t = std::exp(log_lambda + lp);
    if (t >= 1.0) return -std::numeric_limits<double>::infinity();
    total -= t / (1.0 - t);
  }
  return total;
}

double objective(double s_plus_one, double log_lambda,
                 std::span<const double> log_densities) {
  double total = s_plus_one * log_lambda;
  for (const double lp : log_densities) {
    const double t = std::exp(log_lambda + lp);
    total += std::log1p(-t);
  }
  return total;
}

}  // namespace

double average_log_density(std::span<const DiagGaussian> samples,
                           std::span<const double> v) {
  std::vector<double> per_sample(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t)
    per_sample[t] = log_density(samples[t], v);
  return log_sum_exp(per_sample) - std::log(static_cast<double>(samples.size()));
}

double average_peak_log_density(std::span<const DiagGaussian> samples) {
  std::vector<double> per_sample(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t) {
    double peak = 0.0;
    for (const double var : samples[t].var)
      peak -= 0.5 * (kLog2Pi + std::log(var));
    per_sample[t] = peak;
  }
  return log_sum_exp(per_sample) - std::log(static_cast<double>(samples.size()));
}

CalibrationResult estimate_lambda(std::size_t positive_count,
                                  std::span<const std::vector<double>> negatives,
                                  std::span<const DiagGaussian> samples,
                                  double tol) {
  if (samples.empty())
    throw ValidationError("estimate_lambda: no posterior samples");

  std::vector<double> log_densities;
  log_densities.reserve(negatives.size());
  double max_log_density = -std::numeric_limits<double>::infinity();
  for (const auto& v : negatives) {
    const double lp = average_log_density(samples, v);
    log_densities.push_back(lp);
    max_log_density = std::max(max_log_density, lp);
  }
  const double peak = average_peak_log_density(samples);

  CalibrationResult out;
  out.lambda_max = std::min(1.0, std::exp(-std::max(max_log_density, peak)));
  const double s_plus_one = static_cast<double>(positive_count) + 1.0;

  const bool no_signal =
      log_densities.empty() ||
      std::all_of(log_densities.begin(), log_densities.end(),
                  [](double lp) { return std::exp(lp) == 0.0; });
  if (no_signal) {
    out.lambda = out.lambda_max;
    out.all_densities_zero = !log_densities.empty();
    out.objective = s_plus_one * std::log(out.lambda);
    return out;
  }

  const double log_max = std::log(out.lambda_max);
  if (scaled_slope(s_plus_one, log_max, log_densities) >= 0.0) {
    out.lambda = out.lambda_max;
    out.objective = objective(s_plus_one, log_max, log_densities);
    return out;
  }

  // f is concave with f' > 0 as lambda -> 0+, f'(lambda_max) < 0: bisect
  double lo = 0.0;
  double hi = out.lambda_max;
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (scaled_slope(s_plus_one, std::log(mid), log_densities) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  out.lambda = 0.5 * (lo + hi);
  out.objective = objective(s_plus_one, std::log(out.lambda), log_densities);
  return out;
}

}  // namespace protogauss
