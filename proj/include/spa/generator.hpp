#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "spa/geometry.hpp"
#include "spa/graph.hpp"
#include "spa/model.hpp"
#include "spa/random.hpp"

namespace spa {

namespace detail {

// Relative slack between a layer's radius bound and its cell width; keeps
// floor() rounding at cell borders from dropping a true neighbour.
inline constexpr double kCellSlack = 1e-9;

// One periodic uniform grid over the members of a layer. Every member's
// sphere radius is at most `bound` (at the current time), and the cell width
// 1/cells_per_dim is >= bound, so any vertex whose sphere contains a query
// point lies in the query cell or one of its 3^d neighbours.
class LayerGrid {
 public:
  struct Slot {
    std::uint32_t cell = 0;
    std::uint32_t index = 0;
  };

  std::size_t members() const { return members_; }
  std::uint32_t cells_per_dim() const { return cells_per_dim_; }

  // Cells per dimension worth using for the given radius bound, capped so
  // the grid holds O(members) cells.
  static std::uint32_t desired_cells(double bound, std::size_t members, int dim) {
    if (!std::isfinite(bound)) return 1;
    const double raw = bound > 0.0 ? std::floor(1.0 / (bound * (1.0 + kCellSlack))) : 1e18;
    const double cap_total = std::fmax(64.0, 4.0 * static_cast<double>(members));
    const double cap_dim = std::floor(std::pow(cap_total, 1.0 / dim) + 1e-9);
    const double cells = std::fmin(raw, cap_dim);
    return cells < 3.0 ? 1U : static_cast<std::uint32_t>(cells);
  }

  bool wants_rebuild(double bound, int dim) const {
    const std::uint32_t want = desired_cells(bound, members_, dim);
    if (cells_per_dim_ == 1) return want >= 3;
    return want >= 2 * cells_per_dim_;
  }

  template <class PositionOf>
  void rebuild(double bound, int dim, std::span<Slot> slots, PositionOf&& position_of) {
    std::vector<VertexId> all;
    all.reserve(members_);
    for (const auto& cell : cells_) all.insert(all.end(), cell.begin(), cell.end());
    cells_per_dim_ = desired_cells(bound, members_, dim);
    std::size_t total = 1;
    for (int k = 0; k < dim; ++k) total *= cells_per_dim_;
    cells_.assign(total, {});
    members_ = 0;
    for (VertexId v : all) insert(v, position_of(v), slots);
  }

  void insert(VertexId v, std::span<const double> pos, std::span<Slot> slots) {
    if (cells_.empty()) cells_.resize(1);
    const std::uint32_t c = cell_of(pos);
    slots[v] = Slot{c, static_cast<std::uint32_t>(cells_[c].size())};
    cells_[c].push_back(v);
    ++members_;
  }

  void erase(VertexId v, std::span<Slot> slots) {
    auto& cell = cells_[slots[v].cell];
    const VertexId moved = cell.back();
    cell[slots[v].index] = moved;
    slots[moved].index = slots[v].index;
    cell.pop_back();
    --members_;
  }

  // Appends every member in the 3^d block of cells around `pos`.
  void collect(std::span<const double> pos, std::vector<VertexId>& out) const {
    if (members_ == 0) return;
    if (cells_per_dim_ == 1) {
      out.insert(out.end(), cells_[0].begin(), cells_[0].end());
      return;
    }
    const auto dim = pos.size();
    std::uint32_t base[16];
    std::uint32_t* coords = dim <= 16 ? base : nullptr;
    std::vector<std::uint32_t> heap;
    if (!coords) {
      heap.resize(dim);
      coords = heap.data();
    }
    for (std::size_t k = 0; k < dim; ++k) coords[k] = coord_of(pos[k]);
    // odometer over offsets {-1,0,1}^d; cells_per_dim >= 3 so all distinct
    std::vector<int> offset(dim, -1);
    while (true) {
      std::size_t idx = 0;
      std::size_t stride = 1;
      for (std::size_t k = 0; k < dim; ++k) {
        const std::int64_t c = (static_cast<std::int64_t>(coords[k]) + offset[k] + cells_per_dim_) % cells_per_dim_;
        idx += static_cast<std::size_t>(c) * stride;
        stride *= cells_per_dim_;
      }
      const auto& cell = cells_[idx];
      out.insert(out.end(), cell.begin(), cell.end());
      std::size_t k = 0;
      while (k < dim && offset[k] == 1) offset[k++] = -1;
      if (k == dim) break;
      ++offset[k];
    }
  }

 private:
  std::uint32_t coord_of(double x) const {
    const auto c = static_cast<std::uint32_t>(x * cells_per_dim_);
    return std::min(c, cells_per_dim_ - 1);
  }

  std::uint32_t cell_of(std::span<const double> pos) const {
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (double x : pos) {
      idx += coord_of(x) * stride;
      stride *= cells_per_dim_;
    }
    return static_cast<std::uint32_t>(idx);
  }

  std::uint32_t cells_per_dim_ = 1;
  std::size_t members_ = 0;
  std::vector<std::vector<VertexId>> cells_;
};

inline int floor_log2(std::uint64_t x) {
  int k = -1;
  while (x) {
    x >>= 1;
    ++k;
  }
  return k;
}

}  // namespace detail

/// Generates an SPA graph by sequential arrival.
///
/// At step t vertex v_t is placed uniformly at random (the only draw of the
/// step), then links to every older v_i with torus_distance(v_t, v_i) at most
/// the radius of S(v_i, t). Candidates come from per-layer periodic grids:
/// layers group vertices whose radii are within a factor two of each other
/// (by birth time for the modified variant, by A1*deg + A2 for the original
/// one), so each grid's cell width tracks its own members' radii.
inline SpaGraph generate(const SpaParams& params) {
  params.validate();
  const std::uint32_t n = params.n;
  const int dim = params.metric.dim;
  const auto d = static_cast<std::size_t>(dim);
  const bool modified = params.variant == Variant::Modified;

  Engine rng(params.seed);
  std::vector<double> positions(static_cast<std::size_t>(n) * d);
  std::vector<Edge> edges;
  std::vector<std::uint32_t> in_deg(n + 1ULL, 0);
  auto position_of = [&](VertexId v) { return std::span<const double>(positions).subspan((v - 1) * d, d); };

  // With A2 = 0 every sphere has zero volume and stays that way.
  const bool any_edges = params.A2 > 0.0;

  std::vector<detail::LayerGrid> layers;
  std::vector<detail::LayerGrid::Slot> slots(n + 1ULL);
  std::vector<int> layer_of(n + 1ULL, 0);

  auto weight_layer = [&](std::uint32_t deg) {
    // largest k with A1*deg + A2 >= A2 * 2^k
    const double w = params.A1 * deg + params.A2;
    int k = 0;
    while (w >= params.A2 * std::ldexp(1.0, k + 1)) ++k;
    return k;
  };
  auto layer_bound = [&](int k, std::uint64_t t) {
    const double tt = static_cast<double>(t);
    const double volume = modified ? sphere_volume_modified(std::ldexp(1.0, k), tt, params.A1, params.A2)
                                   : std::fmin(params.A2 * std::ldexp(1.0, k + 1) / tt, 1.0);
    return sphere_radius(volume, params.metric);
  };

  std::vector<VertexId> candidates;
  std::vector<VertexId> heads;
  for (std::uint64_t t = 1; t <= n; ++t) {
    const auto v = static_cast<VertexId>(t);
    auto pos = std::span<double>(positions).subspan((t - 1) * d, d);
    sample_uniform_into(rng, pos);
    if (!any_edges) continue;

    candidates.clear();
    for (std::size_t k = 0; k < layers.size(); ++k) {
      auto& layer = layers[k];
      if (layer.members() == 0) continue;
      const double bound = layer_bound(static_cast<int>(k), t);
      if (layer.wants_rebuild(bound, dim)) layer.rebuild(bound, dim, slots, position_of);
      layer.collect(pos, candidates);
    }

    heads.clear();
    for (VertexId i : candidates) {
      const double r = influence_radius(params, i, t, in_deg[i]);
      if (torus_distance_unchecked(pos, position_of(i), params.metric.p) <= r) heads.push_back(i);
    }
    std::sort(heads.begin(), heads.end());
    for (VertexId i : heads) {
      edges.push_back(Edge{v, i});
      ++in_deg[i];
      if (!modified) {
        const int k = weight_layer(in_deg[i]);
        if (k != layer_of[i]) {
          layers[layer_of[i]].erase(i, slots);
          if (static_cast<std::size_t>(k) >= layers.size()) layers.resize(k + 1);
          layer_of[i] = k;
          layers[k].insert(i, position_of(i), slots);
        }
      }
    }

    const int k = modified ? detail::floor_log2(t) : 0;
    if (static_cast<std::size_t>(k) >= layers.size()) layers.resize(k + 1);
    layer_of[v] = k;
    layers[k].insert(v, pos, slots);
  }

  return SpaGraph(params, std::move(positions), std::move(edges));
}

/// O(n^2) reference generator: same draws, every older vertex tested.
inline SpaGraph generate_brute_force(const SpaParams& params) {
  params.validate();
  const std::uint32_t n = params.n;
  const auto d = static_cast<std::size_t>(params.metric.dim);
  Engine rng(params.seed);
  std::vector<double> positions(static_cast<std::size_t>(n) * d);
  std::vector<Edge> edges;
  std::vector<std::uint32_t> in_deg(n + 1ULL, 0);
  std::vector<VertexId> heads;
  for (std::uint64_t t = 1; t <= n; ++t) {
    auto pos = std::span<double>(positions).subspan((t - 1) * d, d);
    sample_uniform_into(rng, pos);
    heads.clear();
    for (VertexId i = 1; i < t; ++i) {
      const auto other = std::span<const double>(positions).subspan((i - 1) * d, d);
      if (torus_distance_unchecked(pos, other, params.metric.p) <= influence_radius(params, i, t, in_deg[i]))
        heads.push_back(i);
    }
    for (VertexId i : heads) {
      edges.push_back(Edge{static_cast<VertexId>(t), i});
      ++in_deg[i];
    }
  }
  return SpaGraph(params, std::move(positions), std::move(edges));
}

}  // namespace spa
