#include "lcqmc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace lcqmc {

namespace {

// Summed squared residual of the best shared line g = a + b x over mapped
// points, by ordinary least squares.
double collapse_residual(std::span<const BinderCurve> curves, double gamma_c, double nu,
                         const Window& window) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  long n = 0;
  for (const BinderCurve& curve : curves) {
    const double scale = std::pow(static_cast<double>(curve.side), 1.0 / nu);
    for (const BinderPoint& p : curve.points) {
      if (p.gamma < window.lo || p.gamma > window.hi) continue;
      const double x = scale * (p.gamma - gamma_c);
      sx += x;
      sy += p.g;
      sxx += x * x;
      sxy += x * p.g;
      syy += p.g * p.g;
      ++n;
    }
  }
  if (n < 3) return std::numeric_limits<double>::infinity();
  const double det = n * sxx - sx * sx;
  if (det <= 0.0) return std::numeric_limits<double>::infinity();
  const double b = (n * sxy - sx * sy) / det;
  const double a = (sy - b * sx) / n;
  return syy - 2.0 * a * sy - 2.0 * b * sxy + n * a * a + 2.0 * a * b * sx + b * b * sxx;
}

double median_spacing(const std::vector<double>& sorted_gammas) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < sorted_gammas.size(); ++i) {
    const double d = sorted_gammas[i] - sorted_gammas[i - 1];
    if (d > 0.0) gaps.push_back(d);
  }
  if (gaps.empty()) return 0.0;
  std::sort(gaps.begin(), gaps.end());
  return gaps[gaps.size() / 2];
}

}  // namespace

CollapseResult data_collapse(std::span<const BinderCurve> curves,
                             std::span<const double> gamma_grid, std::span<const double> nu_grid,
                             Window window) {
  if (window.hi <= window.lo) throw std::invalid_argument("data_collapse: empty window");
  if (curves.size() < 2) throw std::invalid_argument("data_collapse: need at least 2 curves");
  for (const BinderCurve& curve : curves) {
    int in_window = 0;
    for (const BinderPoint& p : curve.points)
      if (p.gamma >= window.lo && p.gamma <= window.hi) ++in_window;
    if (in_window < 3)
      throw std::invalid_argument("data_collapse: a curve has fewer than 3 in-window points");
  }
  CollapseResult best;
  best.residual = std::numeric_limits<double>::infinity();
  best.window = window;
  for (double nu : nu_grid) {
    if (nu <= 0.0) continue;
    for (double gamma_c : gamma_grid) {
      const double r = collapse_residual(curves, gamma_c, nu, window);
      if (r < best.residual) {
        best.residual = r;
        best.gamma_c = gamma_c;
        best.nu = nu;
      }
    }
  }
  if (!std::isfinite(best.residual))
    throw std::invalid_argument("data_collapse: no admissible grid point");
  return best;
}

Window select_collapse_window(std::span<const BinderCurve> curves, double spread_threshold,
                              int min_points) {
  // Common Gamma values across curves and the cross-curve spread of g there.
  std::set<double> gamma_set;
  for (const BinderCurve& c : curves)
    for (const BinderPoint& p : c.points) gamma_set.insert(p.gamma);
  std::vector<double> gammas(gamma_set.begin(), gamma_set.end());

  const auto g_at = [](const BinderCurve& c, double gamma, double* out) {
    for (const BinderPoint& p : c.points)
      if (p.gamma == gamma) {
        *out = p.g;
        return true;
      }
    return false;
  };

  std::vector<double> in_band;
  for (double gamma : gammas) {
    double g_min = std::numeric_limits<double>::infinity(), g_max = -g_min;
    bool all = true;
    for (const BinderCurve& c : curves) {
      double g;
      if (!g_at(c, gamma, &g)) {
        all = false;
        break;
      }
      g_min = std::min(g_min, g);
      g_max = std::max(g_max, g);
    }
    if (all && g_max - g_min < spread_threshold) in_band.push_back(gamma);
  }

  Window w;
  if (!in_band.empty()) {
    w.lo = in_band.front();
    w.hi = in_band.back();
  } else if (!gammas.empty()) {
    w.lo = w.hi = gammas[gammas.size() / 2];
  }
  // Widen symmetrically until every curve has at least min_points inside.
  const double step = std::max(median_spacing(gammas), 1e-12);
  const auto coverage_ok = [&]() {
    for (const BinderCurve& c : curves) {
      int n = 0;
      for (const BinderPoint& p : c.points)
        if (p.gamma >= w.lo - 1e-12 && p.gamma <= w.hi + 1e-12) ++n;
      if (n < min_points) return false;
    }
    return true;
  };
  while (!coverage_ok() && (w.lo > gammas.front() || w.hi < gammas.back())) {
    w.lo = std::max(gammas.front(), w.lo - step);
    w.hi = std::min(gammas.back(), w.hi + step);
  }
  w.lo -= 1e-12;
  w.hi += 1e-12;
  return w;
}

std::vector<double> default_gamma_grid(std::span<const BinderCurve> curves, Window window) {
  std::set<double> gamma_set;
  for (const BinderCurve& c : curves)
    for (const BinderPoint& p : c.points) gamma_set.insert(p.gamma);
  std::vector<double> gammas(gamma_set.begin(), gamma_set.end());
  const double step = std::max(median_spacing(gammas) / 4.0, 1e-6);
  std::vector<double> grid;
  for (double gamma = window.lo; gamma <= window.hi + 1e-12; gamma += step) grid.push_back(gamma);
  return grid;
}

std::vector<double> default_nu_grid() {
  std::vector<double> grid;
  for (double nu = 0.5; nu <= 2.0 + 1e-12; nu += 0.01) grid.push_back(nu);
  return grid;
}

BinderCurve realization_average(std::span<const BinderCurve> realizations) {
  if (realizations.size() < 2)
    throw std::invalid_argument("realization_average: need at least 2 realizations");
  const BinderCurve& first = realizations.front();
  for (const BinderCurve& c : realizations) {
    if (c.points.size() != first.points.size())
      throw std::invalid_argument("realization_average: mismatched Gamma grids");
    for (std::size_t i = 0; i < c.points.size(); ++i)
      if (c.points[i].gamma != first.points[i].gamma)
        throw std::invalid_argument("realization_average: mismatched Gamma grids");
  }
  BinderCurve avg;
  avg.side = first.side;
  const double r = static_cast<double>(realizations.size());
  for (std::size_t i = 0; i < first.points.size(); ++i) {
    double mean = 0.0;
    for (const BinderCurve& c : realizations) mean += c.points[i].g;
    mean /= r;
    double var = 0.0;
    for (const BinderCurve& c : realizations)
      var += (c.points[i].g - mean) * (c.points[i].g - mean);
    avg.points.push_back({first.points[i].gamma, mean, std::sqrt(var / (r * (r - 1.0)))});
  }
  return avg;
}

LineFit critical_shift_fit(std::span<const std::pair<double, double>> k_gamma_points) {
  if (k_gamma_points.size() < 2)
    throw std::invalid_argument("critical_shift_fit: need at least 2 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(k_gamma_points.size());
  for (const auto& [x, y] : k_gamma_points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = n * sxx - sx * sx;
  if (det <= 1e-300) throw FitFailureError("critical_shift_fit: degenerate abscissae");
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  for (const auto& [x, y] : k_gamma_points) {
    const double r = y - fit.intercept - fit.slope * x;
    fit.residual += r * r;
  }
  return fit;
}

Ecdf::Ecdf(std::span<const double> samples) : sorted_(samples.begin(), samples.end()) {
  if (sorted_.empty()) throw InsufficientDataError("ecdf: need at least one sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double cdf_fit_loss(const std::vector<double>& sorted, double mu, double sigma) {
  const double m = static_cast<double>(sorted.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f_emp = static_cast<double>(i + 1) / m;
    const double d = f_emp - normal_cdf((sorted[i] - mu) / sigma);
    loss += d * d;
  }
  return loss;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

NormalFit normal_cdf_fit(std::span<const double> samples) {
  if (samples.size() < 3) throw std::invalid_argument("normal_cdf_fit: need at least 3 samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size() - 1);
  if (var <= 0.0) throw FitFailureError("normal_cdf_fit: zero-variance samples");
  const double sd = std::sqrt(var);

  // Fit in standardized coordinates, so the result is exactly affine
  // equivariant.
  std::vector<double> z(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) z[i] = (samples[i] - mean) / sd;
  std::sort(z.begin(), z.end());

  double best_mu = 0.0, best_sigma = 1.0;
  double best = cdf_fit_loss(z, best_mu, best_sigma);
  for (double mu = -1.0; mu <= 1.0 + 1e-12; mu += 0.1) {
    for (double sigma = 0.3; sigma <= 2.0 + 1e-12; sigma += 0.1) {
      const double l = cdf_fit_loss(z, mu, sigma);
      if (l < best) {
        best = l;
        best_mu = mu;
        best_sigma = sigma;
      }
    }
  }
  for (int round = 0; round < 4; ++round) {
    best_mu = golden_min([&](double mu) { return cdf_fit_loss(z, mu, best_sigma); },
                         best_mu - 0.15, best_mu + 0.15, 1e-7);
    best_sigma = golden_min([&](double s) { return cdf_fit_loss(z, best_mu, s); },
                            std::max(1e-6, best_sigma - 0.15), best_sigma + 0.15, 1e-7);
  }
  NormalFit fit;
  fit.mu = mean + sd * best_mu;
  fit.sigma = sd * best_sigma;
  fit.loss = cdf_fit_loss(z, best_mu, best_sigma);
  return fit;
}

std::pair<double, double> bootstrap_ci(std::span<const double> samples,
                                       const std::function<double(std::span<const double>)>& stat,
                                       double level, int resamples, Rng& rng) {
  if (samples.size() < 2) throw std::invalid_argument("bootstrap_ci: need at least 2 samples");
  if (level <= 0.0 || level >= 1.0) throw std::invalid_argument("bootstrap_ci: bad level");
  std::vector<double> resample(samples.size());
  std::vector<double> stats(resamples);
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      resample[i] = samples[rng.uniform_int(samples.size())];
    stats[r] = stat(resample);
  }
  std::sort(stats.begin(), stats.end());
  const double alpha = (1.0 - level) / 2.0;
  const auto pick = [&](double q) {
    const long idx = std::clamp(static_cast<long>(q * resamples), 0L, static_cast<long>(resamples - 1));
    return stats[idx];
  };
  return {pick(alpha), pick(1.0 - alpha)};
}

}  // namespace lcqmc
