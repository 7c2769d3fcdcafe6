#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spa/contagion.hpp"
#include "spa/errors.hpp"
#include "spa/graph.hpp"
#include "spa/random.hpp"

namespace spa {

struct OriginPolicy {
  enum class Kind { Oldest, UniformRandom, Index };
  Kind kind = Kind::Oldest;
  VertexId index = 1;  // used by Kind::Index

  static OriginPolicy oldest() { return {Kind::Oldest, 1}; }
  static OriginPolicy uniform_random() { return {Kind::UniformRandom, 1}; }
  static OriginPolicy at(VertexId v) { return {Kind::Index, v}; }
};

struct InfectionConfig {
  OriginPolicy origin = OriginPolicy::oldest();
  ContagionScenario scenario{};
  std::uint64_t seed = 0;
  std::optional<std::uint32_t> max_steps;
  ContagionOptions contagion{};
  // Test hook: use this probability for every vertex instead of the scenario.
  std::optional<double> beta_override;
};

/// An infection event u -> v with the torus length of the edge taken.
struct Transmission {
  VertexId from;
  VertexId to;
  double length;
  bool tree;  // the recorded infector of `to`
};

struct InfectionOutcome {
  VertexId origin = 1;
  std::vector<std::optional<std::uint32_t>> infection_time;  // entry v-1
  std::vector<VertexId> infector;                            // entry v-1; 0 for origin / uninfected
  std::vector<Transmission> transmissions;  // every successful attempt, tree and non-tree
  std::uint32_t duration = 0;               // steps until no vertex is infected
  std::uint32_t attack_size = 0;
  double longest_jump = 0.0;
  double max_displacement = 0.0;
  bool truncated = false;

  std::optional<std::uint32_t> time_of(VertexId v) const { return infection_time[v - 1]; }
};

inline VertexId resolve_origin(const OriginPolicy& policy, std::uint32_t n, std::uint64_t seed) {
  switch (policy.kind) {
    case OriginPolicy::Kind::Oldest:
      return 1;
    case OriginPolicy::Kind::Index:
      if (policy.index < 1 || policy.index > n)
        throw InputError("origin index " + std::to_string(policy.index) + " outside 1.." + std::to_string(n));
      return policy.index;
    case OriginPolicy::Kind::UniformRandom:
      break;
  }
  const double u = to_unit(hash_words({seed, tag_word("origin")}));
  return static_cast<VertexId>(std::min<std::uint64_t>(n, 1 + static_cast<std::uint64_t>(u * n)));
}

/// The draw deciding whether `from` would infect `to` at their one possible
/// meeting. Keyed by the ordered pair, so every consumer sees the same value.
inline double pair_draw(std::uint64_t seed, VertexId from, VertexId to) { return keyed_uniform(seed, from, to); }

inline std::vector<double> infection_probabilities(const SpaGraph& graph, const InfectionConfig& cfg) {
  if (cfg.beta_override) {
    const double b = *cfg.beta_override;
    if (!(b >= 0.0 && b <= 1.0)) throw InputError("beta override must lie in [0,1]");
    return std::vector<double>(graph.size(), b);
  }
  return transmission_probabilities(graph, cfg.scenario, cfg.contagion);
}

/// Discrete-time SIR on the undirected view of the graph. Each infected
/// vertex is infectious for exactly one step and attempts every susceptible
/// neighbour independently with its own beta; all infected then recover.
/// When several infectors succeed on one vertex in the same step, the oldest
/// (smallest id) becomes its recorded infector and every success is kept in
/// `transmissions`.
inline InfectionOutcome run_sir(const SpaGraph& graph, const InfectionConfig& cfg) {
  cfg.scenario.validate();
  const std::uint32_t n = graph.size();
  const auto beta = infection_probabilities(graph, cfg);

  InfectionOutcome out;
  out.origin = resolve_origin(cfg.origin, n, cfg.seed);
  out.infection_time.assign(n, std::nullopt);
  out.infector.assign(n, 0);
  out.infection_time[out.origin - 1] = 0;
  out.attack_size = 1;

  std::vector<VertexId> frontier{out.origin};
  std::vector<VertexId> next;
  std::uint32_t t = 0;
  while (!frontier.empty()) {
    if (cfg.max_steps && t >= *cfg.max_steps) {
      out.truncated = true;
      break;
    }
    std::sort(frontier.begin(), frontier.end());
    next.clear();
    for (VertexId u : frontier) {
      const double b = beta[u - 1];
      if (b <= 0.0) continue;
      for (VertexId v : graph.neighbours(u)) {
        auto& tv = out.infection_time[v - 1];
        // susceptible at the start of this step
        if (tv && *tv != t + 1) continue;
        if (!(pair_draw(cfg.seed, u, v) < b)) continue;
        const bool first = !tv;
        if (first) {
          tv = t + 1;
          out.infector[v - 1] = u;
          next.push_back(v);
          ++out.attack_size;
        }
        const double len = graph.distance(u, v);
        out.transmissions.push_back(Transmission{u, v, len, first});
        out.longest_jump = std::max(out.longest_jump, len);
      }
    }
    std::swap(frontier, next);
    ++t;
  }
  out.duration = t;

  for (VertexId v = 1; v <= n; ++v)
    if (out.infection_time[v - 1]) out.max_displacement = std::max(out.max_displacement, graph.distance(out.origin, v));
  return out;
}

/// Each undirected edge {u,v} of the base graph contributes the ordered pair
/// (u,v) with probability beta(u) and (v,u) with probability beta(v).
class PotentialInfectionGraph {
 public:
  PotentialInfectionGraph(const SpaGraph& base, std::vector<std::pair<VertexId, VertexId>> occupied)
      : base_(&base), occupied_(std::move(occupied)) {
    const std::uint32_t n = base.size();
    offsets_.assign(n + 1ULL, 0);
    for (const auto& [u, v] : occupied_) ++offsets_[u];
    for (std::size_t k = 1; k <= n; ++k) offsets_[k] += offsets_[k - 1];
    // offsets_[u] now ends u's block
    targets_.resize(occupied_.size());
    std::vector<std::size_t> fill(n + 1ULL, 0);
    for (std::size_t k = 1; k <= n; ++k) fill[k] = offsets_[k - 1];
    for (const auto& [u, v] : occupied_) targets_[fill[u]++] = v;
  }

  const SpaGraph& base() const { return *base_; }
  const std::vector<std::pair<VertexId, VertexId>>& occupied() const { return occupied_; }

  std::span<const VertexId> out_neighbours(VertexId u) const {
    return std::span<const VertexId>(targets_).subspan(offsets_[u - 1], offsets_[u] - offsets_[u - 1]);
  }

 private:
  const SpaGraph* base_;
  std::vector<std::pair<VertexId, VertexId>> occupied_;
  std::vector<std::size_t> offsets_;  // offsets_[u-1]..offsets_[u] is u's block
  std::vector<VertexId> targets_;
};

/// Occupies ordered pairs with the same keyed draws run_sir consumes, in
/// canonical order: per edge in insertion order, (min,max) then (max,min).
inline PotentialInfectionGraph build_potential_graph(const SpaGraph& graph, std::span<const double> beta,
                                                     std::uint64_t seed) {
  if (beta.size() != graph.size()) throw InputError("build_potential_graph: one beta per vertex required");
  std::vector<std::pair<VertexId, VertexId>> occupied;
  for (const Edge& e : graph.edges()) {
    const VertexId lo = e.head, hi = e.tail;
    if (pair_draw(seed, lo, hi) < beta[lo - 1]) occupied.emplace_back(lo, hi);
    if (pair_draw(seed, hi, lo) < beta[hi - 1]) occupied.emplace_back(hi, lo);
  }
  return PotentialInfectionGraph(graph, std::move(occupied));
}

inline PotentialInfectionGraph build_potential_graph(const SpaGraph& graph, const ContagionScenario& sc,
                                                     std::uint64_t seed, const ContagionOptions& opts = {}) {
  const auto beta = transmission_probabilities(graph, sc, opts);
  return build_potential_graph(graph, beta, seed);
}

struct InfectionGraph {
  std::vector<std::optional<std::uint32_t>> hop;       // entry v-1; directed hop distance if <= t
  std::vector<VertexId> vertices;                      // ascending
  std::vector<std::pair<VertexId, VertexId>> edges;    // (u,v) occupied with hop[v] = hop[u] + 1
};

/// The t-th out-neighbourhood of `origin` in the potential infection graph,
/// with every occupied edge that realises a first arrival.
inline InfectionGraph infection_graph_at(const PotentialInfectionGraph& pg, VertexId origin, std::uint32_t t) {
  const std::uint32_t n = pg.base().size();
  if (origin < 1 || origin > n) throw InputError("infection_graph_at: origin out of range");
  InfectionGraph out;
  out.hop.assign(n, std::nullopt);
  out.hop[origin - 1] = 0;
  std::vector<VertexId> layer{origin};
  std::vector<VertexId> next;
  for (std::uint32_t h = 0; h < t && !layer.empty(); ++h) {
    next.clear();
    for (VertexId u : layer) {
      for (VertexId v : pg.out_neighbours(u)) {
        auto& hv = out.hop[v - 1];
        if (hv && *hv != h + 1) continue;
        if (!hv) {
          hv = h + 1;
          next.push_back(v);
        }
        out.edges.emplace_back(u, v);
      }
    }
    std::swap(layer, next);
  }
  for (VertexId v = 1; v <= n; ++v)
    if (out.hop[v - 1]) out.vertices.push_back(v);
  return out;
}

inline double longest_edge(const PotentialInfectionGraph& pg) {
  double m = 0.0;
  for (const auto& [u, v] : pg.occupied()) m = std::max(m, pg.base().distance(u, v));
  return m;
}

inline double longest_edge(const InfectionOutcome& outcome) {
  double m = 0.0;
  for (const auto& tr : outcome.transmissions) m = std::max(m, tr.length);
  return m;
}

}  // namespace spa
