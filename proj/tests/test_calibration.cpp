#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "protogauss/calibration.hpp"
#include "protogauss/gaussian.hpp"

using namespace protogauss;

namespace {

constexpr double kPi = 3.14159265358979323846;

// variance making a 1-D Gaussian's mode density equal `peak`
double var_for_peak(double peak) { return 1.0 / (2.0 * kPi * peak * peak); }

double smoothed_objective(double lambda, std::size_t s,
                          const std::vector<double>& densities) {
  double f = (static_cast<double>(s) + 1.0) * std::log(lambda);
  for (const double p : densities) f += std::log1p(-lambda * p);
  return f;
}

// dense grid argmax, an independent check of the bisection
double grid_argmax(std::size_t s, const std::vector<double>& densities,
                   double lambda_max) {
  double best_lambda = lambda_max;
  double best = smoothed_objective(lambda_max, s, densities);
  const int points = 2000000;
  for (int i = 1; i < points; ++i) {
    const double lambda =
        lambda_max * static_cast<double>(i) / static_cast<double>(points);
    const double f = smoothed_objective(lambda, s, densities);
    if (f > best) {
      best = f;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

struct CalGen {
  std::uint64_t state;

  explicit CalGen(std::uint64_t seed) : state(seed) {}

  double unit() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(unit() * static_cast<double>(n)) % n;
  }
};

}  // namespace

TEST_CASE("no negatives pushes lambda to the peak-density bound") {
  // one posterior sample with mode density 4 -> lambda_max = 1/4
  const std::vector<DiagGaussian> samples{
      DiagGaussian{{0.0}, {var_for_peak(4.0)}}};
  const CalibrationResult r = estimate_lambda(5, {}, samples);
  CHECK(r.lambda_max == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.lambda == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(r.all_densities_zero);
}

TEST_CASE("interior stationary point: one negative with density one") {
  // mode density 1 at the negative itself: f' = 1/l - 1/(1-l), root 0.5
  const std::vector<DiagGaussian> samples{
      DiagGaussian{{0.0}, {var_for_peak(1.0)}}};
  const std::vector<std::vector<double>> negatives{{0.0}};
  const CalibrationResult r = estimate_lambda(0, negatives, samples);
  CHECK(r.lambda_max == doctest::Approx(1.0));
  CHECK(r.lambda == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("stationary point beyond the bound clamps to the boundary") {
  // s = 1 smoothed to 2; negative density 0.5 gives the root 4/3 > 1
  const std::vector<DiagGaussian> samples{
      DiagGaussian{{0.0}, {var_for_peak(0.5)}}};
  const std::vector<std::vector<double>> negatives{{0.0}};
  const CalibrationResult r = estimate_lambda(1, negatives, samples);
  CHECK(r.lambda_max == doctest::Approx(1.0));
  CHECK(r.lambda == doctest::Approx(1.0));
}

TEST_CASE("all-zero densities flag the degenerate boundary") {
  const std::vector<DiagGaussian> samples{
      DiagGaussian{{0.0}, {var_for_peak(2.0)}}};
  // negatives so far out that the density underflows to zero
  const std::vector<std::vector<double>> negatives{{1e6}, {-1e6}};
  const CalibrationResult r = estimate_lambda(3, negatives, samples);
  CHECK(r.all_densities_zero);
  CHECK(r.lambda == doctest::Approx(r.lambda_max));
  CHECK(r.lambda_max == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("average log density averages over samples") {
  const std::vector<DiagGaussian> samples{DiagGaussian{{0.0}, {1.0}},
                                          DiagGaussian{{2.0}, {1.0}}};
  const std::vector<double> at{1.0};
  const double d0 = std::exp(log_density(samples[0], at));
  const double d1 = std::exp(log_density(samples[1], at));
  CHECK(average_log_density(samples, at) ==
        doctest::Approx(std::log((d0 + d1) / 2.0)).epsilon(1e-12));

  const double p0 = 1.0 / std::sqrt(2.0 * kPi);
  CHECK(average_peak_log_density(samples) ==
        doctest::Approx(std::log(p0)).epsilon(1e-12));
}

TEST_CASE("returned lambda maximizes the smoothed objective") {
  CalGen gen(112233);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t s = gen.below(40);
    const std::size_t n_neg = gen.below(12);
    const double spread = gen.uniform(0.5, 4.0);

    std::vector<DiagGaussian> samples;
    const std::size_t n_samples = 1 + gen.below(6);
    for (std::size_t t = 0; t < n_samples; ++t)
      samples.push_back(DiagGaussian{{gen.uniform(-1.0, 1.0)},
                                     {gen.uniform(0.05, 2.0)}});
    std::vector<std::vector<double>> negatives;
    for (std::size_t i = 0; i < n_neg; ++i)
      negatives.push_back({gen.uniform(-spread, spread)});

    const CalibrationResult r = estimate_lambda(s, negatives, samples);

    std::vector<double> densities;
    double max_density = 0.0;
    for (const auto& v : negatives) {
      const double p = std::exp(average_log_density(samples, v));
      densities.push_back(p);
      max_density = std::max(max_density, p);
    }
    const double peak = std::exp(average_peak_log_density(samples));

    // bound respected, including the peak-density cap
    CHECK(r.lambda > 0.0);
    CHECK(r.lambda <= r.lambda_max + 1e-15);
    CHECK(r.lambda_max <= 1.0 + 1e-15);
    CHECK(r.lambda_max <= 1.0 / peak + 1e-9);
    if (max_density > 0.0) CHECK(r.lambda_max <= 1.0 / max_density + 1e-9);

    // every calibrated membership probability stays in [0, 1]
    for (const double p : densities) {
      CHECK(r.lambda * p >= 0.0);
      CHECK(r.lambda * p <= 1.0 + 1e-12);
    }

    // no interior lambda does better than the returned one
    const double achieved = smoothed_objective(r.lambda, s, densities);
    CHECK(r.objective == doctest::Approx(achieved).epsilon(1e-9));
    for (const double frac : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      const double probe = frac * r.lambda_max;
      CHECK(smoothed_objective(probe, s, densities) <= achieved + 1e-7);
    }
  }
}

TEST_CASE("bisection agrees with a dense grid search") {
  CalGen gen(445566);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<DiagGaussian> samples{
        DiagGaussian{{gen.uniform(-0.5, 0.5)}, {gen.uniform(0.2, 1.5)}},
        DiagGaussian{{gen.uniform(-0.5, 0.5)}, {gen.uniform(0.2, 1.5)}}};
    std::vector<std::vector<double>> negatives;
    const std::size_t n_neg = 1 + gen.below(6);
    for (std::size_t i = 0; i < n_neg; ++i)
      negatives.push_back({gen.uniform(-1.5, 1.5)});
    const std::size_t s = gen.below(5);

    const CalibrationResult r = estimate_lambda(s, negatives, samples);

    std::vector<double> densities;
    for (const auto& v : negatives)
      densities.push_back(std::exp(average_log_density(samples, v)));
    const double grid = grid_argmax(s, densities, r.lambda_max);
    CHECK(std::abs(r.lambda - grid) < 2e-6 * r.lambda_max + 1e-12);
  }
}

TEST_CASE("adding a negative example never raises lambda") {
  CalGen gen(778899);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<DiagGaussian> samples{
        DiagGaussian{{0.0}, {gen.uniform(0.2, 2.0)}}};
    std::vector<std::vector<double>> negatives;
    const std::size_t base = gen.below(8);
    for (std::size_t i = 0; i < base; ++i)
      negatives.push_back({gen.uniform(-2.0, 2.0)});
    const std::size_t s = gen.below(10);

    const CalibrationResult before = estimate_lambda(s, negatives, samples);
    negatives.push_back({gen.uniform(-2.0, 2.0)});
    const CalibrationResult after = estimate_lambda(s, negatives, samples);
    CHECK(after.lambda <= before.lambda + 1e-12);
  }
}
