#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lcqmc/errors.hpp"
#include "lcqmc/rng.hpp"

namespace lcqmc {

struct BinderPoint {
  double gamma = 0.0;
  double g = 0.0;
  double g_err = 0.0;
};

struct BinderCurve {
  int side = 0;  // L
  std::vector<BinderPoint> points;
};

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

struct CollapseResult {
  double gamma_c = 0.0;
  double nu = 1.0;
  double residual = 0.0;
  Window window;
};

// Least-squares scan of the scaling Ansatz g = G(L^(1/nu) (Gamma - Gamma_c))
// with linear G: maps in-window points of every curve to the scaling variable,
// fits one shared line, and returns the (gamma_c, nu) grid point with the
// smallest summed squared residual.
CollapseResult data_collapse(std::span<const BinderCurve> curves,
                             std::span<const double> gamma_grid, std::span<const double> nu_grid,
                             Window window);

// Defaults built from the data: the Gamma interval where the cross-curve
// spread of g falls below the threshold, widened to keep at least min_points
// per curve; gamma_c scanned at a quarter of the data resolution, nu over
// [0.5, 2.0] step 0.01.
Window select_collapse_window(std::span<const BinderCurve> curves, double spread_threshold = 0.08,
                              int min_points = 4);
std::vector<double> default_gamma_grid(std::span<const BinderCurve> curves, Window window);
std::vector<double> default_nu_grid();

// Pointwise mean and standard error over embedding realizations. All curves
// must share the same Gamma grid.
BinderCurve realization_average(std::span<const BinderCurve> realizations);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};
LineFit critical_shift_fit(std::span<const std::pair<double, double>> k_gamma_points);

// Right-continuous empirical CDF, F(x) = M^-1 sum_m theta(x - x_m).
class Ecdf {
 public:
  explicit Ecdf(std::span<const double> samples);
  double operator()(double x) const;
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

struct NormalFit {
  double mu = 0.0;
  double sigma = 1.0;
  double loss = 0.0;
};

// (mu, sigma) minimizing the squared distance between the empirical CDF at
// the sample points and the normal CDF.
NormalFit normal_cdf_fit(std::span<const double> samples);

// Percentile bootstrap confidence interval.
std::pair<double, double> bootstrap_ci(std::span<const double> samples,
                                       const std::function<double(std::span<const double>)>& stat,
                                       double level, int resamples, Rng& rng);

}  // namespace lcqmc
