#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "spa/errors.hpp"
#include "spa/graph.hpp"
#include "spa/model.hpp"

namespace spa {

enum class Scenario {
  A,  // T contacts per step spread over all neighbours
  B,  // contacts proportional to degree; equal per-neighbour rate
};

inline std::string_view to_string(Scenario s) { return s == Scenario::A ? "A" : "B"; }

inline Scenario parse_scenario(std::string_view s) {
  if (s == "A" || s == "a") return Scenario::A;
  if (s == "B" || s == "b") return Scenario::B;
  throw InputError("unknown scenario '" + std::string(s) + "' (expected A|B)");
}

struct ContagionScenario {
  Scenario kind = Scenario::A;
  double tau = 1.0;       // transmission probability per contact
  double contacts = 0.0;  // T, average contacts per time step

  double gamma() const { return tau * contacts; }

  static ContagionScenario with_gamma(Scenario kind, double gamma) { return {kind, 1.0, gamma}; }

  void validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("tau must lie in [0,1]");
    if (!(contacts >= 0.0) || std::isinf(contacts)) throw InputError("contacts T must be finite and >= 0");
  }
};

struct ContagionOptions {
  // Scenario A returns beta = 1 once the expected degree is at or below this
  // floor (the tau*T/E -> inf limit).
  double expected_degree_floor = 1e-9;
  // Scenario A: exact finite-sum expected degree instead of the closed form.
  bool exact_expected_degree = false;
  // Scenario B: graph's empirical mean in-degree instead of A2/(1-A1).
  bool empirical_mean_degree = false;
};

/// beta = 1 - exp(-tau kappa)
inline double beta_from_contacts(double tau, double kappa) { return -std::expm1(-tau * kappa); }

namespace detail {

inline double beta_for_expected_degree(double expected, const ContagionScenario& sc, const ContagionOptions& opts) {
  if (sc.gamma() == 0.0) return 0.0;
  if (expected <= opts.expected_degree_floor) return 1.0;
  return beta_from_contacts(sc.tau, sc.contacts / expected);
}

}  // namespace detail

/// Scenario A probability that v_i infects a given neighbour in one step:
/// kappa = T / E(deg^-(v_i)).
inline double beta_A(VertexId i, const SpaGraph& graph, const ContagionScenario& sc,
                     const ContagionOptions& opts = {}) {
  if (sc.kind != Scenario::A) throw InputError("beta_A called with a scenario B configuration");
  const auto& p = graph.params();
  if (i < 1 || i > p.n) throw InputError("beta_A: vertex out of range");
  const double expected = opts.exact_expected_degree ? expected_in_degree_exact(i, p.n, p.A1, p.A2)
                                                     : expected_in_degree_closed(i, p.n, p.A1, p.A2);
  return detail::beta_for_expected_degree(expected, sc, opts);
}

/// Scenario B probability, identical for every vertex:
/// kappa = T / <deg^-> with <deg^-> = A2 / (1 - A1).
inline double beta_B(const ContagionScenario& sc, double A1, double A2) {
  if (!(A2 > 0.0)) throw InputError("beta_B: A2 must be > 0 (mean degree undefined)");
  return beta_from_contacts(sc.tau, sc.contacts * (1.0 - A1) / A2);
}

/// Per-vertex transmission probabilities; entry i-1 belongs to vertex i.
inline std::vector<double> transmission_probabilities(const SpaGraph& graph, const ContagionScenario& sc,
                                                      const ContagionOptions& opts = {}) {
  sc.validate();
  const auto& p = graph.params();
  std::vector<double> beta(p.n);
  if (sc.kind == Scenario::B) {
    double value;
    if (opts.empirical_mean_degree) {
      const double mean = graph.mean_in_degree();
      value = mean > 0.0 ? beta_from_contacts(sc.tau, sc.contacts / mean) : (sc.gamma() == 0.0 ? 0.0 : 1.0);
    } else {
      value = beta_B(sc, p.A1, p.A2);
    }
    beta.assign(p.n, value);
    return beta;
  }
  if (opts.exact_expected_degree) {
    const auto expected = expected_in_degrees_exact(p.n, p.A1, p.A2);
    for (VertexId i = 1; i <= p.n; ++i) beta[i - 1] = detail::beta_for_expected_degree(expected[i - 1], sc, opts);
  } else {
    for (VertexId i = 1; i <= p.n; ++i)
      beta[i - 1] = detail::beta_for_expected_degree(expected_in_degree_closed(i, p.n, p.A1, p.A2), sc, opts);
  }
  return beta;
}

}  // namespace spa
