#include "protogauss/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "protogauss/errors.hpp"

namespace protogauss {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void check_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ValidationError(std::string(what) + ": dimension mismatch");
}

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw NumericError(std::string(what) + ": non-finite value");
}

}  // namespace

double log_density_1d(double mean, double var, double x) {
  if (!(var > 0.0)) throw NumericError("log_density: variance must be positive");
  const double d = x - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

double log_density(const DiagGaussian& g, std::span<const double> v) {
  check_same_dim(g.dim(), v.size(), "log_density");
  if (g.var.size() != g.mean.size())
    throw ValidationError("log_density: malformed Gaussian");
  double total = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    total += log_density_1d(g.mean[j], g.var[j], v[j]);
  return total;
}

MeanPosterior posterior_mean_stats(double prior_mean, double prior_var,
                                   double known_var, std::size_t n,
                                   double data_sum) {
  if (!(prior_var > 0.0) || !(known_var > 0.0))
    throw NumericError("posterior_mean: variances must be positive");
  check_finite(prior_mean, "posterior_mean");
  check_finite(data_sum, "posterior_mean");
  const double nd = static_cast<double>(n);
  MeanPosterior out;
  out.var = prior_var * known_var / (nd * prior_var + known_var);
  out.mean = out.var * (prior_mean / prior_var + data_sum / known_var);
  return out;
}

MeanPosterior posterior_mean_params(double prior_mean, double prior_var,
                                    double known_var,
                                    std::span<const double> data) {
  double sum = 0.0;
  for (double x : data) {
    check_finite(x, "posterior_mean");
    sum += x;
  }
  return posterior_mean_stats(prior_mean, prior_var, known_var, data.size(), sum);
}

ScaledInvChiSq posterior_var_stats(const ScaledInvChiSq& prior,
                                   double known_mean, std::size_t n,
                                   double data_mean, double data_m2) {
  if (!(prior.nu > 0.0) || !(prior.scale > 0.0))
    throw NumericError("posterior_var: prior nu and scale must be positive");
  check_finite(known_mean, "posterior_var");
  const double nd = static_cast<double>(n);
  // sum((x - known_mean)^2) from the centered second moment
  const double shift = data_mean - known_mean;
  const double ss = data_m2 + nd * shift * shift;
  ScaledInvChiSq out;
  out.nu = prior.nu + nd;
  out.scale = (prior.nu * prior.scale + ss) / out.nu;
  return out;
}

ScaledInvChiSq posterior_var_params(const ScaledInvChiSq& prior,
                                    double known_mean,
                                    std::span<const double> data) {
  if (!(prior.nu > 0.0) || !(prior.scale > 0.0))
    throw NumericError("posterior_var: prior nu and scale must be positive");
  check_finite(known_mean, "posterior_var");
  double ss = 0.0;
  for (double x : data) {
    check_finite(x, "posterior_var");
    const double d = x - known_mean;
    ss += d * d;
  }
  ScaledInvChiSq out;
  out.nu = prior.nu + static_cast<double>(data.size());
  out.scale = (prior.nu * prior.scale + ss) / out.nu;
  return out;
}

double sample_mean(RngStream& rng, double mean, double var) {
  if (var < 0.0) throw NumericError("sample_mean: negative variance");
  return mean + std::sqrt(var) * rng.next_normal();
}

double sample_var(RngStream& rng, const ScaledInvChiSq& dist, double floor) {
  if (!(dist.nu > 0.0) || !(dist.scale > 0.0))
    throw NumericError("sample_var: nu and scale must be positive");
  const double draw = dist.nu * dist.scale / rng.next_chi2(dist.nu);
  return std::max(draw, floor);
}

DiagGaussian product_gaussians(std::span<const DiagGaussian> gs, double floor) {
  if (gs.empty()) throw ValidationError("product_gaussians: empty list");
  const std::size_t dim = gs.front().dim();
  DiagGaussian out;
  out.mean.assign(dim, 0.0);
  out.var.assign(dim, 0.0);
  std::vector<double> precision(dim, 0.0);
  for (const DiagGaussian& g : gs) {
    check_same_dim(g.dim(), dim, "product_gaussians");
    for (std::size_t j = 0; j < dim; ++j) {
      if (!(g.var[j] > 0.0))
        throw NumericError("product_gaussians: variance must be positive");
      const double p = 1.0 / g.var[j];
      precision[j] += p;
      out.mean[j] += p * g.mean[j];
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    out.mean[j] /= precision[j];
    out.var[j] = std::max(1.0 / precision[j], floor);
  }
  return out;
}

DiagGaussian mixture_moments(std::span<const DiagGaussian> gs, double floor) {
  if (gs.empty()) throw ValidationError("mixture_moments: empty list");
  const std::size_t dim = gs.front().dim();
  const double k = static_cast<double>(gs.size());
  DiagGaussian out;
  out.mean.assign(dim, 0.0);
  out.var.assign(dim, 0.0);
  for (const DiagGaussian& g : gs) {
    check_same_dim(g.dim(), dim, "mixture_moments");
    for (std::size_t j = 0; j < dim; ++j) out.mean[j] += g.mean[j] / k;
  }
  for (const DiagGaussian& g : gs) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = g.mean[j] - out.mean[j];
      out.var[j] += (g.var[j] + d * d) / k;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) out.var[j] = std::max(out.var[j], floor);
  return out;
}

DiagGaussian difference_gaussian(const DiagGaussian& d, const DiagGaussian& r,
                                 double floor) {
  check_same_dim(d.dim(), r.dim(), "difference_gaussian");
  DiagGaussian out;
  const std::size_t dim = d.dim();
  out.mean.resize(dim);
  out.var.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    out.mean[j] = d.mean[j] - r.mean[j];
    out.var[j] = std::max(d.var[j] + r.var[j], floor);
  }
  return out;
}

DiagGaussian empirical_fit(std::span<const std::vector<double>> vectors,
                           double floor) {
  if (vectors.size() < 2)
    throw ValidationError("empirical_fit: need at least two vectors");
  const std::size_t dim = vectors.front().size();
  const double k = static_cast<double>(vectors.size());
  DiagGaussian out;
  out.mean.assign(dim, 0.0);
  out.var.assign(dim, 0.0);
  for (const auto& v : vectors) {
    check_same_dim(v.size(), dim, "empirical_fit");
    for (std::size_t j = 0; j < dim; ++j) {
      check_finite(v[j], "empirical_fit");
      out.mean[j] += v[j] / k;
    }
  }
  for (const auto& v : vectors) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = v[j] - out.mean[j];
      out.var[j] += d * d / (k - 1.0);
    }
  }
  for (std::size_t j = 0; j < dim; ++j) out.var[j] = std::max(out.var[j], floor);
  return out;
}

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

}  // namespace protogauss
