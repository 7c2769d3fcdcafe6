#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spa/errors.hpp"
#include "spa/geometry.hpp"
#include "spa/model.hpp"

namespace spa {

/// Directed edge from the younger vertex `tail` to the older vertex `head`.
struct Edge {
  VertexId tail;
  VertexId head;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// An SPA graph: positions by birth time and younger->older edges. Immutable
/// once constructed; the constructor checks the structural invariants
/// (ranges, orientation, no duplicates) but not sphere containment, which is
/// a property of how the graph was generated (see verify.hpp).
class SpaGraph {
 public:
  SpaGraph(SpaParams params, std::vector<double> positions, std::vector<Edge> edges)
      : params_(params), positions_(std::move(positions)), edges_(std::move(edges)) {
    params_.validate();
    const std::size_t n = params_.n;
    const auto d = static_cast<std::size_t>(params_.metric.dim);
    if (positions_.size() != n * d)
      throw InputError("graph: expected " + std::to_string(n * d) + " coordinates, got " +
                       std::to_string(positions_.size()));
    for (double c : positions_)
      if (!(c >= 0.0 && c < 1.0)) throw InputError("graph: coordinate outside [0,1)");

    in_degree_.assign(n, 0);
    std::vector<std::uint32_t> degree(n + 1, 0);
    for (const Edge& e : edges_) {
      if (e.head < 1 || e.tail <= e.head || e.tail > n)
        throw InputError("graph: invalid edge " + std::to_string(e.tail) + " -> " + std::to_string(e.head));
      ++in_degree_[e.head - 1];
      ++degree[e.tail];
      ++degree[e.head];
    }
    {
      std::vector<Edge> sorted = edges_;
      std::sort(sorted.begin(), sorted.end());
      auto dup = std::adjacent_find(sorted.begin(), sorted.end());
      if (dup != sorted.end())
        throw InputError("graph: duplicate edge " + std::to_string(dup->tail) + " -> " + std::to_string(dup->head));
    }

    // undirected adjacency in CSR form, neighbours in edge-insertion order
    offsets_.assign(n + 1, 0);
    for (std::size_t v = 1; v <= n; ++v) offsets_[v] = offsets_[v - 1] + degree[v];
    neighbours_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges_) {
      neighbours_[fill[e.tail - 1]++] = e.head;
      neighbours_[fill[e.head - 1]++] = e.tail;
    }
  }

  const SpaParams& params() const { return params_; }
  const MetricConfig& metric() const { return params_.metric; }
  std::uint32_t size() const { return params_.n; }
  std::size_t dim() const { return static_cast<std::size_t>(params_.metric.dim); }

  std::span<const double> position(VertexId v) const {
    return std::span<const double>(positions_).subspan((v - 1) * dim(), dim());
  }
  const std::vector<double>& positions() const { return positions_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::uint32_t in_degree(VertexId v) const { return in_degree_[v - 1]; }
  const std::vector<std::uint32_t>& in_degrees() const { return in_degree_; }

  /// Neighbours of v ignoring edge orientation.
  std::span<const VertexId> neighbours(VertexId v) const {
    return std::span<const VertexId>(neighbours_).subspan(offsets_[v - 1], offsets_[v] - offsets_[v - 1]);
  }

  double distance(VertexId a, VertexId b) const {
    return torus_distance_unchecked(position(a), position(b), params_.metric.p);
  }

  double mean_in_degree() const { return static_cast<double>(edges_.size()) / params_.n; }

 private:
  SpaParams params_;
  std::vector<double> positions_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> in_degree_;
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> neighbours_;
};

/// Radius of v_i's sphere of influence when vertex t arrives, given its
/// in-degree just before that arrival (ignored by the modified variant).
inline double influence_radius(const SpaParams& params, VertexId i, std::uint64_t t, std::uint32_t in_deg) {
  const double volume = params.variant == Variant::Modified
                            ? sphere_volume_modified(i, static_cast<double>(t), params.A1, params.A2)
                            : sphere_volume_original(in_deg, static_cast<double>(t), params.A1, params.A2);
  return sphere_radius(volume, params.metric);
}

}  // namespace spa
