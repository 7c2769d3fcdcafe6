#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spa/errors.hpp"
#include "spa/random.hpp"

namespace spa {

/// Dimension and L_p norm of the unit torus [0,1)^d.
///
/// `p` is any real >= 1, or +infinity for the max norm. The torus distance is
/// the p-norm of the per-coordinate wrap-around differences.
struct MetricConfig {
  int dim = 1;
  double p = std::numeric_limits<double>::infinity();

  bool is_max_norm() const { return std::isinf(p); }

  void validate() const {
    if (dim < 1) throw InputError("metric dimension must be >= 1, got " + std::to_string(dim));
    if (!(p >= 1.0)) throw InputError("metric norm p must be >= 1 or inf");
  }

  friend bool operator==(const MetricConfig&, const MetricConfig&) = default;
};

/// A position in the unit torus. Coordinates are raw values in [0,1); all
/// periodic reasoning happens in torus_distance.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {
    for (double c : coords_)
      if (!(c >= 0.0 && c < 1.0)) throw InputError("point coordinate outside [0,1): " + std::to_string(c));
  }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t k) const { return coords_[k]; }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

namespace detail {

inline double wrap_delta(double a, double b) {
  double delta = std::fabs(a - b);
  return std::fmin(delta, 1.0 - delta);
}

}  // namespace detail

/// Torus distance between two coordinate vectors of equal length. No
/// validation; this is the hot path of the generator.
inline double torus_distance_unchecked(std::span<const double> x, std::span<const double> y, double p) {
  const std::size_t d = x.size();
  if (d == 1) return detail::wrap_delta(x[0], y[0]);
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k < d; ++k) m = std::fmax(m, detail::wrap_delta(x[k], y[k]));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += detail::wrap_delta(x[k], y[k]);
    return s;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double w = detail::wrap_delta(x[k], y[k]);
      s += w * w;
    }
    return std::sqrt(s);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += std::pow(detail::wrap_delta(x[k], y[k]), p);
  return std::pow(s, 1.0 / p);
}

inline double torus_distance(std::span<const double> x, std::span<const double> y, const MetricConfig& cfg) {
  if (x.size() != static_cast<std::size_t>(cfg.dim) || y.size() != static_cast<std::size_t>(cfg.dim))
    throw InputError("torus_distance: dimension mismatch (" + std::to_string(x.size()) + ", " +
                     std::to_string(y.size()) + " vs d=" + std::to_string(cfg.dim) + ")");
  return torus_distance_unchecked(x, y, cfg.p);
}

inline double torus_distance(const Point& x, const Point& y, const MetricConfig& cfg) {
  return torus_distance(x.coords(), y.coords(), cfg);
}

/// Volume of the unit L_p ball in dimension d:
///   c_p = (2 Gamma(1 + 1/p))^d / Gamma(1 + d/p),
/// which gives 2 for d = 1, 2^d for p = inf and pi^{d/2}/Gamma(d/2+1) for p = 2.
inline double unit_ball_volume(const MetricConfig& cfg) {
  const double d = cfg.dim;
  if (cfg.dim == 1 || cfg.is_max_norm()) return std::pow(2.0, d);
  return std::pow(2.0 * std::tgamma(1.0 + 1.0 / cfg.p), d) / std::tgamma(1.0 + d / cfg.p);
}

/// c_p * r^d. Only a torus volume while the ball does not wrap onto itself;
/// callers clamp at 1.
inline double ball_volume(double r, const MetricConfig& cfg) {
  if (!(r >= 0.0)) throw InputError("ball_volume: radius must be >= 0");
  if (cfg.dim == 1) return 2.0 * r;
  return unit_ball_volume(cfg) * std::pow(r, cfg.dim);
}

inline double radius_for_volume(double v, const MetricConfig& cfg) {
  if (!(v >= 0.0)) throw InputError("radius_for_volume: volume must be >= 0");
  if (cfg.dim == 1) return v / 2.0;
  if (cfg.dim == 2) return std::sqrt(v / unit_ball_volume(cfg));
  return std::pow(v / unit_ball_volume(cfg), 1.0 / cfg.dim);
}

/// Largest torus distance attainable: (1/2) d^{1/p}.
inline double torus_diameter(const MetricConfig& cfg) {
  if (cfg.is_max_norm()) return 0.5;
  return 0.5 * std::pow(static_cast<double>(cfg.dim), 1.0 / cfg.p);
}

template <class Rng>
void sample_uniform_into(Rng& rng, std::span<double> out) {
  for (double& c : out) c = uniform01(rng);
}

template <class Rng>
Point sample_uniform(Rng& rng, const MetricConfig& cfg) {
  std::vector<double> coords(static_cast<std::size_t>(cfg.dim));
  sample_uniform_into(rng, coords);
  return Point(std::move(coords));
}

}  // namespace spa
