#include "lcqmc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lcqmc {

namespace {

// Standard error of the mean over the complete bins of size bin_size.
double bin_level_stderr(std::span<const double> series, long bin_size) {
  const long num_bins = static_cast<long>(series.size()) / bin_size;
  double mean = 0.0;
  std::vector<double> bins(num_bins);
  for (long b = 0; b < num_bins; ++b) {
    double sum = 0.0;
    for (long t = b * bin_size; t < (b + 1) * bin_size; ++t) sum += series[t];
    bins[b] = sum / bin_size;
    mean += bins[b];
  }
  mean /= num_bins;
  double var = 0.0;
  for (double x : bins) var += (x - mean) * (x - mean);
  return std::sqrt(var / (static_cast<double>(num_bins) * (num_bins - 1)));
}

}  // namespace

double staggered_magnetization(const SpinConfig& config,
                               const std::vector<std::array<int, 2>>& coords) {
  if (config.size() != coords.size())
    throw std::invalid_argument("staggered_magnetization: config/coords size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const int parity = (coords[i][0] + coords[i][1]) & 1;
    m += parity ? -config[i] : config[i];
  }
  return m / static_cast<double>(config.size());
}

double binder_cumulant(std::span<const double> m_samples) {
  if (m_samples.empty()) throw InsufficientDataError("binder_cumulant: empty series");
  double m2 = 0.0, m4 = 0.0;
  for (double m : m_samples) {
    m2 += m * m;
    m4 += m * m * m * m;
  }
  m2 /= static_cast<double>(m_samples.size());
  m4 /= static_cast<double>(m_samples.size());
  if (m2 == 0.0) throw InsufficientDataError("binder_cumulant: all samples zero");
  return 1.0 - m4 / (3.0 * m2 * m2);
}

BinnedError binning_errors(std::span<const double> series, double threshold) {
  if (series.size() < 64)
    throw InsufficientDataError("binning_errors: need at least 64 samples");
  BinnedError out;
  for (long bin_size = 1; static_cast<long>(series.size()) / bin_size >= 32; bin_size *= 2)
    out.levels.push_back({bin_size, bin_level_stderr(series, bin_size)});

  out.converged = false;
  out.converged_level = static_cast<int>(out.levels.size()) - 1;
  for (std::size_t l = 0; l + 1 < out.levels.size(); ++l) {
    const double cur = out.levels[l].stderr_estimate;
    const double next = out.levels[l + 1].stderr_estimate;
    if (cur == 0.0 || std::abs(next - cur) < threshold * cur) {
      out.converged_level = static_cast<int>(l);
      out.converged = true;
      break;
    }
  }
  out.converged_stderr = out.levels[out.converged_level].stderr_estimate;
  return out;
}

RatioEstimate ratio_binned_error(std::span<const double> numerator,
                                 std::span<const double> denominator, double threshold) {
  if (numerator.size() != denominator.size())
    throw std::invalid_argument("ratio_binned_error: series length mismatch");
  if (numerator.size() < 64)
    throw InsufficientDataError("ratio_binned_error: need at least 64 samples");
  double num_total = 0.0, den_total = 0.0;
  for (std::size_t t = 0; t < numerator.size(); ++t) {
    num_total += numerator[t];
    den_total += denominator[t];
  }
  if (den_total <= 0.0)
    throw InsufficientDataError("ratio_binned_error: denominator sums to zero");

  RatioEstimate out;
  out.value = num_total / den_total;

  std::vector<double> stderrs;
  for (long bin_size = 1; static_cast<long>(numerator.size()) / bin_size >= 32; bin_size *= 2) {
    const long num_bins = static_cast<long>(numerator.size()) / bin_size;
    std::vector<double> ratios;
    ratios.reserve(num_bins);
    for (long b = 0; b < num_bins; ++b) {
      double s = 0.0, c = 0.0;
      for (long t = b * bin_size; t < (b + 1) * bin_size; ++t) {
        s += numerator[t];
        c += denominator[t];
      }
      if (c > 0.0) ratios.push_back(s / c);
    }
    if (ratios.size() < 2) break;
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    stderrs.push_back(
        std::sqrt(var / (static_cast<double>(ratios.size()) * (ratios.size() - 1))));
  }
  if (stderrs.empty())
    throw InsufficientDataError("ratio_binned_error: too few non-empty bins");

  out.converged = false;
  out.converged_level = static_cast<int>(stderrs.size()) - 1;
  for (std::size_t l = 0; l + 1 < stderrs.size(); ++l) {
    if (stderrs[l] == 0.0 || std::abs(stderrs[l + 1] - stderrs[l]) < threshold * stderrs[l]) {
      out.converged_level = static_cast<int>(l);
      out.converged = true;
      break;
    }
  }
  out.stderr_estimate = stderrs[out.converged_level];
  return out;
}

Histogram histogram(std::span<const double> samples, int bin_count) {
  if (bin_count < 2) throw std::invalid_argument("histogram: need at least 2 bins");
  if (samples.empty()) throw InsufficientDataError("histogram: empty series");
  double lo = *std::min_element(samples.begin(), samples.end());
  double hi = *std::max_element(samples.begin(), samples.end());
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double width = (hi - lo) / bin_count;
  Histogram h;
  h.centers.resize(bin_count);
  h.probabilities.assign(bin_count, 0.0);
  h.errors.assign(bin_count, 0.0);
  for (int b = 0; b < bin_count; ++b) h.centers[b] = lo + (b + 0.5) * width;

  std::vector<int> bin_of(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t) {
    int b = static_cast<int>((samples[t] - lo) / width);
    b = std::clamp(b, 0, bin_count - 1);
    bin_of[t] = b;
    h.probabilities[b] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  for (double& p : h.probabilities) p /= n;

  // Per-bin uncertainty from a binning analysis of the indicator series.
  std::vector<double> indicator(samples.size());
  for (int b = 0; b < bin_count; ++b) {
    for (std::size_t t = 0; t < samples.size(); ++t)
      indicator[t] = (bin_of[t] == b) ? 1.0 : 0.0;
    if (samples.size() >= 64) {
      h.errors[b] = binning_errors(indicator).converged_stderr;
    } else {
      const double p = h.probabilities[b];
      h.errors[b] = std::sqrt(p * (1.0 - p) / n);
    }
  }
  return h;
}

}  // namespace lcqmc
