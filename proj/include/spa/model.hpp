#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "spa/errors.hpp"
#include "spa/geometry.hpp"

namespace spa {

/// Vertices are identified by birth time, 1..n.
using VertexId = std::uint32_t;

enum class Variant {
  Original,  // sphere volume from realized in-degree
  Modified,  // sphere volume from birth time only
};

inline std::string_view to_string(Variant v) { return v == Variant::Original ? "original" : "modified"; }

inline Variant parse_variant(std::string_view s) {
  if (s == "original") return Variant::Original;
  if (s == "modified") return Variant::Modified;
  throw InputError("unknown variant '" + std::string(s) + "' (expected original|modified)");
}

struct SpaParams {
  double A1 = 0.5;
  double A2 = 1.0;
  std::uint32_t n = 1000;
  MetricConfig metric{};
  Variant variant = Variant::Modified;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(A1 > 0.0 && A1 < 1.0)) throw InputError("A1 must lie in (0,1)");
    if (!(A2 >= 0.0) || std::isinf(A2)) throw InputError("A2 must be finite and >= 0");
    if (n < 1) throw InputError("n must be >= 1");
    metric.validate();
  }

  friend bool operator==(const SpaParams&, const SpaParams&) = default;
};

/// min{(A1 deg + A2) / t, 1}
inline double sphere_volume_original(double in_deg, double t, double A1, double A2) {
  return std::fmin((A1 * in_deg + A2) / t, 1.0);
}

/// min{A2 / (t^{1-A1} i^{A1}), 1}
inline double sphere_volume_modified(double i, double t, double A1, double A2) {
  return std::fmin(A2 / (std::pow(t, 1.0 - A1) * std::pow(i, A1)), 1.0);
}

/// Radius of a sphere of influence of the given volume. A clamped volume
/// (>= 1) covers the whole torus and is reported as +inf.
inline double sphere_radius(double volume, const MetricConfig& metric) {
  if (volume >= 1.0) return std::numeric_limits<double>::infinity();
  return radius_for_volume(volume, metric);
}

/// Expected in-degree of v_i in the modified model at size n: the finite sum
/// of its sphere volumes over arrivals k = i+1..n.
inline double expected_in_degree_exact(std::uint32_t i, std::uint32_t n, double A1, double A2) {
  if (i < 1 || i > n) throw InputError("expected_in_degree_exact: need 1 <= i <= n");
  double sum = 0.0;
  for (std::uint64_t k = i + 1ULL; k <= n; ++k) sum += sphere_volume_modified(i, static_cast<double>(k), A1, A2);
  return sum;
}

/// Same sums for every i at once, in O(n). Entry i-1 holds vertex i.
///
/// Term k of vertex i is clamped to 1 iff k <= (A2 / i^{A1})^{1/(1-A1)}; the
/// unclamped tail is A2 i^{-A1} times a suffix sum of k^{A1-1}.
inline std::vector<double> expected_in_degrees_exact(std::uint32_t n, double A1, double A2) {
  std::vector<double> suffix(n + 2ULL, 0.0);  // suffix[k] = sum_{j=k}^{n} j^{A1-1}
  for (std::uint64_t k = n; k >= 1; --k) suffix[k] = suffix[k + 1] + std::pow(static_cast<double>(k), A1 - 1.0);
  std::vector<double> out(n, 0.0);
  for (std::uint32_t i = 1; i <= n; ++i) {
    const double scale = A2 / std::pow(static_cast<double>(i), A1);
    // first k > i whose term is unclamped
    auto clamped_at = [&](std::uint64_t k) { return scale * std::pow(static_cast<double>(k), A1 - 1.0) >= 1.0; };
    const double cut = std::pow(scale, 1.0 / (1.0 - A1));
    std::uint64_t k0 = i + 1ULL;
    if (cut > static_cast<double>(k0)) k0 = static_cast<std::uint64_t>(std::fmin(cut, static_cast<double>(n) + 1.0));
    while (k0 > i + 1ULL && !clamped_at(k0 - 1)) --k0;
    while (k0 <= n && clamped_at(k0)) ++k0;
    const double clamped = static_cast<double>(k0 - (i + 1ULL));
    out[i - 1] = clamped + (k0 <= n ? scale * suffix[k0] : 0.0);
  }
  return out;
}

/// (A2/A1) ((n/i)^{A1} - 1). Differs from the exact sum by less than A2/A1
/// whenever no summed term is clamped.
inline double expected_in_degree_closed(double i, double n, double A1, double A2) {
  if (!(i >= 1.0 && i <= n)) throw InputError("expected_in_degree_closed: need 1 <= i <= n");
  return (A2 / A1) * (std::pow(n / i, A1) - 1.0);
}

}  // namespace spa
