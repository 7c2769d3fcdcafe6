#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "spa/analysis.hpp"
#include "spa/contagion.hpp"
#include "spa/generator.hpp"
#include "spa/geometry.hpp"
#include "spa/graph.hpp"
#include "spa/random.hpp"
#include "spa/sir.hpp"

// Invariant checks behind `spa verify`. Each returns a CheckResult whose
// detail names the seed (and edge, vertex, ...) needed to replay a failure.

namespace spa {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

enum class VerifyLevel { Fast, Full };

/// Edges (j -> i) whose tail lies outside S(v_i, j). In-degrees are replayed
/// in edge order for the original variant.
inline std::vector<Edge> sphere_violations(const SpaGraph& g) {
  std::vector<Edge> bad;
  std::vector<std::uint32_t> deg(g.size() + 1ULL, 0);
  const auto& edges = g.edges();
  for (std::size_t k = 0; k < edges.size();) {
    // edges of one arrival share a tail; degrees from before that arrival
    std::size_t end = k;
    while (end < edges.size() && edges[end].tail == edges[k].tail) ++end;
    for (std::size_t e = k; e < end; ++e) {
      const Edge& edge = edges[e];
      const double r = influence_radius(g.params(), edge.head, edge.tail, deg[edge.head]);
      if (!(g.distance(edge.tail, edge.head) <= r)) bad.push_back(edge);
    }
    for (std::size_t e = k; e < end; ++e) ++deg[edges[e].head];
    k = end;
  }
  return bad;
}

inline CheckResult check_sphere_containment(const SpaGraph& g, const std::string& label) {
  CheckResult r{"sphere containment (" + label + ")", true, {}};
  const auto bad = sphere_violations(g);
  if (!bad.empty()) {
    r.passed = false;
    std::ostringstream os;
    os << bad.size() << " edge(s) outside the sphere of influence, first " << bad[0].tail << " -> " << bad[0].head
       << " (length " << g.distance(bad[0].tail, bad[0].head) << ", seed " << g.params().seed << ")";
    r.detail = os.str();
  }
  return r;
}

/// Probability mass of a sum of independent Bernoulli(p_k), by convolution.
inline std::vector<double> poisson_binomial_pmf(std::span<const double> probs) {
  std::vector<double> pmf{1.0};
  for (double p : probs) {
    pmf.push_back(0.0);
    for (std::size_t k = pmf.size() - 1; k > 0; --k) pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
    pmf[0] *= (1.0 - p);
  }
  return pmf;
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson goodness of fit of integer observations against a pmf. Adjacent
/// outcomes are pooled until every bin expects at least 5 observations.
inline ChiSquareResult chi_square_gof(std::span<const std::uint32_t> observations, std::span<const double> pmf) {
  const double total = static_cast<double>(observations.size());
  std::vector<double> observed(pmf.size(), 0.0);
  for (std::uint32_t x : observations) observed[std::min<std::size_t>(x, pmf.size() - 1)] += 1.0;
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double o = 0.0, e = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    o += observed[k];
    e += pmf[k] * total;
    if (e >= 5.0) {
      bins.emplace_back(o, e);
      o = e = 0.0;
    }
  }
  if (!bins.empty()) {
    bins.back().first += o;
    bins.back().second += e;
  }
  ChiSquareResult r;
  for (const auto& [ob, ex] : bins) r.statistic += (ob - ex) * (ob - ex) / ex;
  r.dof = static_cast<int>(bins.size()) - 1;
  if (r.dof >= 1) {
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  }
  return r;
}

namespace detail {

inline std::string seed_note(std::uint64_t seed) { return "seed " + std::to_string(seed); }

inline CheckResult check_geometry(std::uint64_t seed) {
  CheckResult r{"torus metric: symmetry, triangle inequality, diameter", true, {}};
  Engine rng(seed);
  const double inf = std::numeric_limits<double>::infinity();
  for (int d : {1, 2, 3})
    for (double p : {1.0, 2.0, inf}) {
      MetricConfig m{d, p};
      for (int k = 0; k < 10000; ++k) {
        const Point x = sample_uniform(rng, m), y = sample_uniform(rng, m), z = sample_uniform(rng, m);
        const double xy = torus_distance(x, y, m), yx = torus_distance(y, x, m);
        const double xz = torus_distance(x, z, m), zy = torus_distance(z, y, m);
        if (xy != yx || xy > xz + zy + 1e-12 || xy > torus_diameter(m) + 1e-12) {
          r.passed = false;
          r.detail = "violation at d=" + std::to_string(d) + " p=" + std::to_string(p) + ", " + seed_note(seed);
          return r;
        }
      }
    }
  return r;
}

inline CheckResult check_ball_measure(std::uint64_t seed) {
  CheckResult r{"d=1 ball measure matches ball_volume (Monte-Carlo, 3 SE)", true, {}};
  Engine rng(seed);
  const MetricConfig m{1, 2.0};
  const int samples = 100000;
  for (double radius : {0.01, 0.1, 0.25, 0.4, 0.5}) {
    const Point centre = sample_uniform(rng, m);
    int hits = 0;
    for (int k = 0; k < samples; ++k)
      if (torus_distance(centre, sample_uniform(rng, m), m) <= radius) ++hits;
    const double p = ball_volume(radius, m);
    const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / samples);
    if (std::fabs(hits / double(samples) - p) > 3 * se + 1e-12) {
      r.passed = false;
      r.detail = "radius " + std::to_string(radius) + ": " + std::to_string(hits / double(samples)) + " vs " +
                 std::to_string(p) + ", " + seed_note(seed);
      return r;
    }
  }
  return r;
}

inline CheckResult check_oracle_equivalence(std::uint64_t master, int trials, std::uint32_t n) {
  CheckResult r{"grid generator == brute-force generator", true, {}};
  const double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    SpaParams p;
    p.n = n;
    p.seed = hash_words({master, static_cast<std::uint64_t>(k), tag_word("oracle")});
    p.variant = k % 2 == 0 ? Variant::Modified : Variant::Original;
    p.metric = MetricConfig{1 + (k / 2) % 3, k % 3 == 0 ? inf : (k % 3 == 1 ? 2.0 : 1.0)};
    const auto fast = generate(p);
    const auto slow = generate_brute_force(p);
    if (fast.edges() != slow.edges() || fast.positions() != slow.positions()) {
      r.passed = false;
      r.detail = std::string(to_string(p.variant)) + " d=" + std::to_string(p.metric.dim) + " n=" +
                 std::to_string(n) + " " + seed_note(p.seed) + ": edge sets differ";
      return r;
    }
    auto contained = check_sphere_containment(fast, "oracle trial");
    if (!contained.passed) return contained;
  }
  return r;
}

inline CheckResult check_in_degree_distribution(std::uint64_t master, int graphs) {
  CheckResult r{"modified in-degree of v_5 (n=500) ~ Poisson-binomial (chi-square, alpha 0.01)", true, {}};
  const std::uint32_t n = 500, i = 5;
  std::vector<double> probs;
  for (std::uint32_t k = i + 1; k <= n; ++k) probs.push_back(sphere_volume_modified(i, k, 0.5, 1.0));
  const auto pmf = poisson_binomial_pmf(probs);
  std::vector<std::uint32_t> observed;
  for (int s = 0; s < graphs; ++s) {
    SpaParams p;
    p.n = n;
    p.seed = hash_words({master, static_cast<std::uint64_t>(s), tag_word("poisson-binomial")});
    observed.push_back(generate(p).in_degree(i));
  }
  const auto chi = chi_square_gof(observed, pmf);
  std::ostringstream os;
  os << "chi2=" << chi.statistic << " dof=" << chi.dof << " p=" << chi.p_value << ", master " << master;
  r.detail = os.str();
  r.passed = chi.p_value >= 0.01;
  return r;
}

inline CheckResult check_expected_degree_contract() {
  CheckResult r{"|exact - closed expected in-degree| < A2/A1 when unclamped", true, {}};
  for (double A1 : {0.2, 0.5, 0.8})
    for (double A2 : {0.5, 1.0})
      for (std::uint32_t n : {100u, 2000u}) {
        const auto exact = expected_in_degrees_exact(n, A1, A2);
        for (std::uint32_t i = 1; i <= n; ++i) {
          if (sphere_volume_modified(i, i + 1.0, A1, A2) >= 1.0) continue;  // clamped terms
          const double diff = std::fabs(exact[i - 1] - expected_in_degree_closed(i, n, A1, A2));
          if (!(diff < A2 / A1)) {
            r.passed = false;
            r.detail = "i=" + std::to_string(i) + " n=" + std::to_string(n) + " diff=" + std::to_string(diff);
            return r;
          }
        }
      }
  return r;
}

inline CheckResult check_contagion(std::uint64_t seed) {
  CheckResult r{"beta in [0,1], scenario B constant, exponential composition", true, {}};
  SpaParams p;
  p.n = 2000;
  p.seed = seed;
  const auto g = generate(p);
  for (double gamma : {0.0, 1.0, 10.0, 100.0}) {
    const auto a = transmission_probabilities(g, ContagionScenario::with_gamma(Scenario::A, gamma));
    const auto b = transmission_probabilities(g, ContagionScenario::with_gamma(Scenario::B, gamma));
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!(a[k] >= 0 && a[k] <= 1 && b[k] >= 0 && b[k] <= 1) || b[k] != b[0]) {
        r.passed = false;
        r.detail = "gamma=" + std::to_string(gamma) + " vertex " + std::to_string(k + 1) + ", " + seed_note(seed);
        return r;
      }
  }
  Engine rng(seed);
  for (int k = 0; k < 1000; ++k) {
    const double tau = uniform01(rng), k1 = 5 * uniform01(rng), k2 = 5 * uniform01(rng);
    const double lhs = beta_from_contacts(tau, k1 + k2);
    const double rhs = 1 - (1 - beta_from_contacts(tau, k1)) * (1 - beta_from_contacts(tau, k2));
    if (std::fabs(lhs - rhs) > 1e-12 * std::max(1e-300, std::fabs(lhs)) && std::fabs(lhs - rhs) > 1e-15) {
      r.passed = false;
      r.detail = "composition identity off by " + std::to_string(lhs - rhs) + ", " + seed_note(seed);
      return r;
    }
  }
  return r;
}

}  // namespace detail

/// Checks the structural invariants of one SIR outcome.
inline std::optional<std::string> outcome_violation(const SpaGraph& g, const InfectionOutcome& o) {
  if (o.time_of(o.origin) != 0u) return "origin not infected at t=0";
  std::uint32_t infected = 0, max_time = 0;
  for (VertexId v = 1; v <= g.size(); ++v) {
    const auto t = o.time_of(v);
    if (!t) continue;
    ++infected;
    max_time = std::max(max_time, *t);
    if (v == o.origin) continue;
    const VertexId parent = o.infector[v - 1];
    if (parent == 0 || o.time_of(parent) != *t - 1) return "vertex " + std::to_string(v) + " has no valid infector";
  }
  if (infected != o.attack_size) return "attack_size mismatch";
  for (const auto& tr : o.transmissions)
    if (!o.time_of(tr.from) || o.time_of(tr.to) != *o.time_of(tr.from) + 1)
      return "transmission " + std::to_string(tr.from) + " -> " + std::to_string(tr.to) + " breaks BFS layering";
  if (!o.truncated && o.duration != max_time + 1) return "duration != last infection time + 1";
  if (o.longest_jump > 2 * o.max_displacement + 1e-12) return "longest_jump > 2 * max_displacement";
  if (o.max_displacement > max_time * o.longest_jump + 1e-12) return "max_displacement exceeds hop bound";
  return std::nullopt;
}

inline CheckResult check_percolation_coupling(std::uint64_t master, int trials, std::uint32_t max_n) {
  CheckResult r{"run_sir layers == BFS layers of the potential infection graph", true, {}};
  for (int k = 0; k < trials; ++k) {
    const std::uint64_t seed = hash_words({master, static_cast<std::uint64_t>(k), tag_word("coupling")});
    Engine rng(seed);
    SpaParams p;
    p.n = 200 + static_cast<std::uint32_t>(uniform01(rng) * (max_n - 200));
    p.seed = seed;
    p.metric.dim = 1 + k % 2;
    const auto g = generate(p);
    const double gammas[] = {1.0, 10.0, 100.0};
    InfectionConfig cfg;
    cfg.scenario = ContagionScenario::with_gamma(k % 2 == 0 ? Scenario::A : Scenario::B, gammas[k % 3]);
    cfg.origin = OriginPolicy::uniform_random();
    cfg.seed = seed;
    const auto outcome = run_sir(g, cfg);
    const auto beta = infection_probabilities(g, cfg);
    const auto pg = build_potential_graph(g, beta, cfg.seed);
    const auto ig = infection_graph_at(pg, outcome.origin, g.size());

    bool same = ig.hop == outcome.infection_time;
    if (same) {
      std::vector<std::pair<VertexId, VertexId>> a(ig.edges), b;
      for (const auto& tr : outcome.transmissions) b.emplace_back(tr.from, tr.to);
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      same = a == b;
    }
    if (!same) {
      r.passed = false;
      r.detail = "trial " + std::to_string(k) + " n=" + std::to_string(p.n) + ", " + detail::seed_note(seed);
      return r;
    }
    if (auto bad = outcome_violation(g, outcome)) {
      r.passed = false;
      r.detail = *bad + " (trial " + std::to_string(k) + ", " + detail::seed_note(seed) + ")";
      return r;
    }
  }
  return r;
}

inline CheckResult check_bounds() {
  CheckResult r{"critical-time consistency and long-edge bound decay", true, {}};
  Engine rng(20240601);
  for (int k = 0; k < 20; ++k) {
    const double A1 = 0.05 + 0.9 * uniform01(rng), A2 = 0.1 + 3 * uniform01(rng);
    const double lambda = 0.001 + 0.4 * uniform01(rng);
    const MetricConfig m{1 + k % 3, k % 2 ? 2.0 : std::numeric_limits<double>::infinity()};
    const double lhs = critical_time_m(lambda, A2, m);
    const double rhs = std::pow(critical_time_m_i(1, lambda, A1, A2, m), 1 - A1);
    if (std::fabs(lhs - rhs) > 1e-9 * lhs) {
      r.passed = false;
      r.detail = "m != m_1^{1-A1} at point " + std::to_string(k);
      return r;
    }
  }
  const MetricConfig m{1, std::numeric_limits<double>::infinity()};
  for (double phi : {0.01, 0.03, 0.05, 0.07, 0.09}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double e = 6; e <= 12; e += 0.5) {
      const double b = long_edge_prob_bound(std::pow(10.0, e), 0.5, 1.0, 10.0, m, phi);
      if (!(b < prev)) {
        r.passed = false;
        r.detail = "bound not decreasing at phi=" + std::to_string(phi) + ", n=1e" + std::to_string(e);
        return r;
      }
      prev = b;
    }
  }
  return r;
}

inline CheckResult check_large_graph(std::uint64_t seed) {
  CheckResult r{"n=1e5: mean in-degree in [1.9,2.1], power-law exponent in [1.7,2.3]", true, {}};
  SpaParams p;
  p.n = 100000;
  p.seed = seed;
  const auto g = generate(p);
  const auto fit = fit_power_law(g, std::ceil(degree_threshold(p.n)));
  std::ostringstream os;
  os << "mean " << g.mean_in_degree() << ", exponent " << fit.exponent << ", " << detail::seed_note(seed);
  r.detail = os.str();
  r.passed = g.mean_in_degree() >= 1.9 && g.mean_in_degree() <= 2.1 && fit.exponent >= 1.7 && fit.exponent <= 2.3;
  if (r.passed) {
    auto contained = check_sphere_containment(g, "n=1e5");
    if (!contained.passed) return contained;
  }
  return r;
}

/// Runs the invariant suite. Fast caps generated graphs at n = 2000; full
/// adds the n = 1e5 checks.
inline std::vector<CheckResult> run_verify(VerifyLevel level, std::uint64_t master,
                                           const std::function<void(const CheckResult&)>& on_result = {}) {
  std::vector<CheckResult> out;
  auto add = [&](CheckResult r) {
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  };
  add(detail::check_geometry(hash_words({master, 1})));
  add(detail::check_ball_measure(hash_words({master, 2})));
  add(detail::check_oracle_equivalence(master, 20, 2000));
  add(detail::check_in_degree_distribution(master, 500));
  add(detail::check_expected_degree_contract());
  add(detail::check_contagion(hash_words({master, 3})));
  add(check_percolation_coupling(master, 100, 2000));
  add(check_bounds());
  if (level == VerifyLevel::Full) add(check_large_graph(hash_words({master, 4})));
  return out;
}

}  // namespace spa
