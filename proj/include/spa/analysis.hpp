#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spa/errors.hpp"
#include "spa/geometry.hpp"
#include "spa/graph.hpp"
#include "spa/model.hpp"

namespace spa {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Jump-length thresholds and critical times

/// Largest admissible exponent phi in lambda = n^{-phi} for the scenario A
/// short-jump bound: A1(1-A1) / ((A1+2) d).
inline double phi_bound(double A1, int d) {
  if (!(A1 > 0.0 && A1 < 1.0) || d < 1) throw InputError("phi_bound: need 0 < A1 < 1 and d >= 1");
  return A1 * (1.0 - A1) / ((A1 + 2.0) * d);
}

/// Exponent above which the modified model a.a.s. has edges longer than
/// mu n^{-theta}: 1 - A1/(4A1+2).
inline double theta_bound(double A1) {
  if (!(A1 > 0.0 && A1 < 1.0)) throw InputError("theta_bound: need 0 < A1 < 1");
  return 1.0 - A1 / (4.0 * A1 + 2.0);
}

/// Birth time after which newborn spheres have radius below lambda:
/// m = A2 / |B(lambda)|.
inline double critical_time_m(double lambda, double A2, const MetricConfig& metric) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InputError("critical_time_m: lambda must lie in (0,1)");
  return A2 / ball_volume(lambda, metric);
}

/// Per-vertex critical time m_i = (A2 / (i |B(lambda)|))^{1/(1-A1)}. For
/// i = 1 this is exactly when v_1's sphere radius falls to lambda.
inline double critical_time_m_i(double i, double lambda, double A1, double A2, const MetricConfig& metric) {
  if (!(i >= 1.0)) throw InputError("critical_time_m_i: i must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InputError("critical_time_m_i: lambda must lie in (0,1)");
  return std::pow(A2 / (i * ball_volume(lambda, metric)), 1.0 / (1.0 - A1));
}

/// Union-bound estimate of P(the scenario A potential infection graph has an
/// edge longer than lambda = n^{-phi}):
///   2 (1 - exp(-gamma / ((A2/A1)((n/m_1)^{A1} - 1)))) A2 m_1^2.
inline double long_edge_prob_bound(double n, double A1, double A2, double gamma, const MetricConfig& metric,
                                   double phi) {
  if (!(n >= 1.0)) throw InputError("long_edge_prob_bound: n must be >= 1");
  if (!(phi > 0.0)) throw InputError("long_edge_prob_bound: phi must be > 0");
  const double lambda = std::pow(n, -phi);
  const double m1 = critical_time_m_i(1.0, lambda, A1, A2, metric);
  const double expected = (A2 / A1) * (std::pow(n / m1, A1) - 1.0);
  return 2.0 * -std::expm1(-gamma / expected) * A2 * m1 * m1;
}

// ---------------------------------------------------------------------------
// Regression

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // points dropped for non-positive coordinates
};

/// Ordinary least squares of y on x.
inline RegressionResult ols(std::span<const std::pair<double, double>> points) {
  const std::size_t m = points.size();
  if (m < 2) throw FitError("ols: need at least two points");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw FitError("ols: all x values are equal");
  RegressionResult r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.used = m;
  if (syy == 0.0) {
    r.r2 = 1.0;
  } else {
    double ss_res = 0;
    for (const auto& [x, y] : points) {
      const double e = y - (r.intercept + r.slope * x);
      ss_res += e * e;
    }
    r.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return r;
}

/// OLS on (ln x, ln y). Points with a non-positive coordinate (zero-length
/// jumps) are skipped and counted in `excluded`.
inline RegressionResult loglog_regression(std::span<const std::pair<double, double>> points) {
  std::vector<std::pair<double, double>> logs;
  logs.reserve(points.size());
  for (const auto& [x, y] : points)
    if (x > 0.0 && y > 0.0) logs.emplace_back(std::log(x), std::log(y));
  if (logs.size() < 3)
    throw FitError("loglog_regression: need >= 3 positive points, got " + std::to_string(logs.size()));
  auto r = ols(logs);
  r.excluded = points.size() - logs.size();
  return r;
}

// ---------------------------------------------------------------------------
// Degree distribution

struct PowerLawFit {
  double exponent = 0.0;  // c_k ~ k^{-exponent}
  double k_min = 1.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

enum class PowerLawMethod {
  LogLogOls,  // slope of ln c_k against ln k
  Hill,       // continuous tail MLE, for comparison
};

/// k' = ln(n)^2, the threshold above which the cumulative in-degree
/// distribution of the modified model is a power law.
inline double degree_threshold(double n) {
  const double l = std::log(n);
  return l * l;
}

/// Fits c_k ~ k^{-exponent} to given (k, c_k) points with k > k_min.
inline PowerLawFit fit_power_law_cumulative(std::span<const std::pair<double, double>> points, double k_min,
                                            std::size_t min_points = 10) {
  std::vector<std::pair<double, double>> tail;
  for (const auto& [k, c] : points)
    if (k > k_min && c > 0.0) tail.emplace_back(k, c);
  if (tail.size() < min_points)
    throw FitError("fit_power_law: need >= " + std::to_string(min_points) + " points above k_min, got " +
                   std::to_string(tail.size()));
  const auto r = loglog_regression(tail);
  return PowerLawFit{-r.slope, std::max(1.0, k_min), r.r2, r.used};
}

/// Cumulative in-degree distribution c_k = #{v : deg(v) > k} / n, sampled
/// once per plateau of the step function at its right end: k = D - 1 for
/// every distinct positive degree D. Sampling at k = D instead puts each
/// point on the lower corner of the step and steepens the top tail.
inline std::vector<std::pair<double, double>> cumulative_degree_distribution(std::span<const std::uint32_t> degrees) {
  std::vector<std::uint32_t> sorted(degrees.begin(), degrees.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (sorted[i] > 0) out.emplace_back(static_cast<double>(sorted[i]) - 1.0, static_cast<double>(sorted.size() - i) / n);
    i = j;
  }
  return out;
}

/// Power-law exponent of the cumulative in-degree distribution above k_min.
inline PowerLawFit fit_power_law(std::span<const std::uint32_t> degrees, double k_min,
                                 PowerLawMethod method = PowerLawMethod::LogLogOls) {
  const auto cdf = cumulative_degree_distribution(degrees);
  std::size_t distinct = 0;
  for (const auto& [k, c] : cdf)
    if (k + 1.0 > k_min) ++distinct;
  if (distinct < 10)
    throw FitError("fit_power_law: need >= 10 distinct degrees above k_min, got " + std::to_string(distinct));
  if (method == PowerLawMethod::LogLogOls) return fit_power_law_cumulative(cdf, k_min, 3);
  const double lo = std::max(1.0, k_min);
  double sum_log = 0.0;
  std::size_t count = 0;
  for (std::uint32_t k : degrees)
    if (k > k_min) {
      sum_log += std::log(k / lo);
      ++count;
    }
  return PowerLawFit{count / sum_log, lo, 0.0, count};
}

inline PowerLawFit fit_power_law(const SpaGraph& graph, double k_min,
                                 PowerLawMethod method = PowerLawMethod::LogLogOls) {
  return fit_power_law(std::span<const std::uint32_t>(graph.in_degrees()), k_min, method);
}

}  // namespace spa
