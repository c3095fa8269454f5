#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "protogauss/rng.hpp"

namespace protogauss {

// Lower bound applied to every derived variance so densities stay finite.
inline constexpr double kVarianceFloor = 1e-6;

// Diagonal-covariance Gaussian over R^dim.
struct DiagGaussian {
  std::vector<double> mean;
  std::vector<double> var;

  std::size_t dim() const { return mean.size(); }
};

// Scaled inverse chi-squared distribution: nu degrees of freedom around a
// variance estimate `scale`. Conjugate prior for a Gaussian variance with
// known mean.
struct ScaledInvChiSq {
  double nu = 0.0;
  double scale = 0.0;
};

struct MeanPosterior {
  double mean = 0.0;
  double var = 0.0;
};

// log N(v; g) for a diagonal Gaussian; -inf only if a coordinate sits
// infinitely far out. Dimensions must match.
double log_density(const DiagGaussian& g, std::span<const double> v);
double log_density_1d(double mean, double var, double x);

// Posterior over a Gaussian mean with known variance `known_var`, prior
// N(prior_mean, prior_var), given observations `data`:
//   var  = prior_var*known_var / (n*prior_var + known_var)
//   mean = var * (prior_mean/prior_var + sum(data)/known_var)
MeanPosterior posterior_mean_params(double prior_mean, double prior_var,
                                    double known_var,
                                    std::span<const double> data);
// Same update from sufficient statistics (n, sum of observations).
MeanPosterior posterior_mean_stats(double prior_mean, double prior_var,
                                   double known_var, std::size_t n,
                                   double data_sum);

// Posterior over a Gaussian variance with known mean, scaled inverse
// chi-squared prior:
//   nu    = prior.nu + n
//   scale = (prior.nu*prior.scale + sum((x - mean)^2)) / nu
ScaledInvChiSq posterior_var_params(const ScaledInvChiSq& prior,
                                    double known_mean,
                                    std::span<const double> data);
// Same update from sufficient statistics: n, data mean, and the centered
// second moment m2 = sum((x - data_mean)^2).
ScaledInvChiSq posterior_var_stats(const ScaledInvChiSq& prior,
                                   double known_mean, std::size_t n,
                                   double data_mean, double data_m2);

double sample_mean(RngStream& rng, double mean, double var);
// Draw nu*scale / chi2_nu, floored.
double sample_var(RngStream& rng, const ScaledInvChiSq& dist,
                  double floor = kVarianceFloor);

// Normalized product of Gaussian densities: precisions add,
// precision-weighted means add. Errors on an empty list.
DiagGaussian product_gaussians(std::span<const DiagGaussian> gs,
                               double floor = kVarianceFloor);
// Moment-matched uniform mixture: mean of means, within- plus
// between-component variance. Errors on an empty list.
DiagGaussian mixture_moments(std::span<const DiagGaussian> gs,
                             double floor = kVarianceFloor);
// Distribution of x - y for independent x ~ d, y ~ r: means subtract,
// variances add.
DiagGaussian difference_gaussian(const DiagGaussian& d, const DiagGaussian& r,
                                 double floor = kVarianceFloor);
// Per-dimension sample mean and unbiased (1/(k-1)) variance; needs k >= 2.
DiagGaussian empirical_fit(std::span<const std::vector<double>> vectors,
                           double floor = kVarianceFloor);

// max + log(sum(exp(x - max))); -inf on an empty or all -inf input.
double log_sum_exp(std::span<const double> xs);

}  // namespace protogauss
