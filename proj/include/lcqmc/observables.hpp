#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lcqmc/errors.hpp"
#include "lcqmc/model.hpp"

namespace lcqmc {

// Time-ordered per-sweep samples of one observable, plus run metadata.
struct SeriesMeta {
  std::string mode;
  double gamma = 0.0;
  double beta = 0.0;
  int ell = 0;
  std::uint64_t seed = 0;
};

struct MeasurementSeries {
  std::vector<double> values;
  SeriesMeta meta;
};

// Binning analysis over bins of size 2^l. converged_stderr is the estimate at
// the first level where the next level changes it by less than the threshold;
// if that never happens the largest level is reported and converged is false.
struct BinnedError {
  struct Level {
    long bin_size = 1;
    double stderr_estimate = 0.0;
  };
  std::vector<Level> levels;
  double converged_stderr = 0.0;
  int converged_level = 0;
  bool converged = true;
};

inline constexpr double kBinningConvergenceThreshold = 0.05;

// M_AFM = (1/N) sum_i (-1)^(x_i+y_i) s_i.
double staggered_magnetization(const SpinConfig& config,
                               const std::vector<std::array<int, 2>>& coords);

// g = 1 - <m^4> / (3 <m^2>^2).
double binder_cumulant(std::span<const double> m_samples);

BinnedError binning_errors(std::span<const double> series,
                           double threshold = kBinningConvergenceThreshold);

// Binning analysis for a ratio estimator sum(num)/sum(den): bins the two
// series jointly and takes the spread of per-bin ratios. Used for
// logical-sample averages whose per-sweep sample count fluctuates.
struct RatioEstimate {
  double value = 0.0;
  double stderr_estimate = 0.0;
  int converged_level = 0;
  bool converged = true;
};
RatioEstimate ratio_binned_error(std::span<const double> numerator,
                                 std::span<const double> denominator,
                                 double threshold = kBinningConvergenceThreshold);

struct Histogram {
  std::vector<double> centers;
  std::vector<double> probabilities;
  std::vector<double> errors;
};
Histogram histogram(std::span<const double> samples, int bin_count);

}  // namespace lcqmc
