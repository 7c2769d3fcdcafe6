#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include <gtest/gtest.h>

#include "spa/generator.hpp"
#include "spa/sir.hpp"
#include "spa/verify.hpp"

namespace spa {
namespace {

SpaGraph handmade(std::uint32_t n, std::vector<Edge> edges) {
  SpaParams p;
  p.n = n;
  std::vector<double> pos(n);
  for (std::uint32_t k = 0; k < n; ++k) pos[k] = k / double(n);
  return SpaGraph(p, pos, std::move(edges));
}

SpaGraph random_graph(std::uint32_t n, std::uint64_t seed, int d = 1) {
  SpaParams p;
  p.n = n;
  p.seed = seed;
  p.metric.dim = d;
  return generate(p);
}

// Oracle: hop distances from `origin` over the undirected graph.
std::vector<std::optional<std::uint32_t>> bfs(const SpaGraph& g, VertexId origin) {
  std::vector<std::vector<VertexId>> adj(g.size() + 1);
  for (const Edge& e : g.edges()) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::vector<std::optional<std::uint32_t>> dist(g.size());
  std::deque<VertexId> q{origin};
  dist[origin - 1] = 0;
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop_front();
    for (VertexId v : adj[u])
      if (!dist[v - 1]) {
        dist[v - 1] = *dist[u - 1] + 1;
        q.push_back(v);
      }
  }
  return dist;
}

InfectionConfig with_beta(double beta, std::uint64_t seed = 0, OriginPolicy origin = OriginPolicy::oldest()) {
  InfectionConfig c;
  c.beta_override = beta;
  c.seed = seed;
  c.origin = origin;
  return c;
}

TEST(RunSir, IsolatedOriginRecoversAfterOneStep) {
  const auto g = handmade(3, {});
  const auto o = run_sir(g, with_beta(1.0));
  EXPECT_EQ(o.attack_size, 1u);
  EXPECT_EQ(o.duration, 1u);
  EXPECT_EQ(o.longest_jump, 0.0);
  EXPECT_EQ(o.max_displacement, 0.0);
}

TEST(RunSir, ZeroBetaInfectsOnlyOrigin) {
  const auto g = random_graph(500, 3);
  const auto o = run_sir(g, with_beta(0.0));
  EXPECT_EQ(o.attack_size, 1u);
  EXPECT_EQ(o.duration, 1u);
  EXPECT_TRUE(o.transmissions.empty());
}

TEST(RunSir, CertainTransmissionFollowsGraphDistance) {
  const auto g = random_graph(3000, 5, 2);
  for (VertexId origin : {1u, 17u, 2999u}) {
    const auto o = run_sir(g, with_beta(1.0, 9, OriginPolicy::at(origin)));
    const auto dist = bfs(g, origin);
    EXPECT_EQ(o.infection_time, dist);
    std::uint32_t reached = 0, far = 0;
    for (const auto& t : dist)
      if (t) {
        ++reached;
        far = std::max(far, *t);
      }
    EXPECT_EQ(o.attack_size, reached);
    EXPECT_EQ(o.duration, far + 1);
  }
}

TEST(RunSir, OldestSimultaneousInfectorIsRecorded) {
  // 1-2, 1-3, 2-4, 3-4: vertex 4 is hit by 2 and 3 at t = 2
  const auto g = handmade(4, {{2, 1}, {3, 1}, {4, 2}, {4, 3}});
  const auto o = run_sir(g, with_beta(1.0));
  EXPECT_EQ(o.time_of(4), 2u);
  EXPECT_EQ(o.infector[3], 2u);
  int into_four = 0, tree = 0;
  for (const auto& tr : o.transmissions)
    if (tr.to == 4) {
      ++into_four;
      tree += tr.tree;
    }
  EXPECT_EQ(into_four, 2);
  EXPECT_EQ(tree, 1);
  EXPECT_EQ(o.duration, 3u);
}

TEST(RunSir, TwoVertexTransmissionFrequencyMatchesBeta) {
  const auto g = handmade(2, {{2, 1}});
  for (double beta : {0.1, 0.5, 0.93}) {
    const int runs = 40000;
    int hits = 0;
    for (int s = 0; s < runs; ++s) hits += run_sir(g, with_beta(beta, hash_words({7, std::uint64_t(s)}))).attack_size == 2;
    const double se = std::sqrt(beta * (1 - beta) / runs);
    EXPECT_NEAR(hits / double(runs), beta, 3 * se) << "beta " << beta;
  }
}

TEST(RunSir, DeterministicForSeed) {
  const auto g = random_graph(2000, 8);
  InfectionConfig c;
  c.scenario = ContagionScenario::with_gamma(Scenario::B, 10.0);
  c.seed = 1234;
  c.origin = OriginPolicy::uniform_random();
  const auto a = run_sir(g, c), b = run_sir(g, c);
  EXPECT_EQ(a.origin, b.origin);
  EXPECT_EQ(a.infection_time, b.infection_time);
  EXPECT_EQ(a.longest_jump, b.longest_jump);
}

TEST(RunSir, MaxStepsTruncates) {
  const auto g = handmade(5, {{2, 1}, {3, 2}, {4, 3}, {5, 4}});
  auto c = with_beta(1.0);
  c.max_steps = 2;
  const auto o = run_sir(g, c);
  EXPECT_TRUE(o.truncated);
  EXPECT_EQ(o.attack_size, 3u);
  EXPECT_EQ(o.duration, 2u);
  EXPECT_FALSE(o.time_of(4));
}

TEST(RunSir, OutcomeInvariantsOverRandomRuns) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto g = random_graph(300 + 40 * s, s, 1 + s % 2);
    InfectionConfig c;
    c.scenario = ContagionScenario::with_gamma(s % 2 ? Scenario::A : Scenario::B, s % 3 == 0 ? 1.0 : 10.0 * (s % 3));
    c.seed = s * 101;
    c.origin = s % 4 == 0 ? OriginPolicy::uniform_random() : OriginPolicy::oldest();
    const auto o = run_sir(g, c);
    const auto bad = outcome_violation(g, o);
    EXPECT_FALSE(bad) << *bad << " seed " << s;
    EXPECT_EQ(o.longest_jump, longest_edge(o));
    std::uint32_t infected = 0;
    for (const auto& t : o.infection_time) infected += t.has_value();
    EXPECT_EQ(o.attack_size, infected);
  }
}

TEST(RunSir, RandomOriginIsInRangeAndSpread) {
  std::vector<int> counts(10, 0);
  for (std::uint64_t s = 0; s < 5000; ++s) {
    const VertexId v = resolve_origin(OriginPolicy::uniform_random(), 10, s);
    ASSERT_GE(v, 1u);
    ASSERT_LE(v, 10u);
    ++counts[v - 1];
  }
  for (int c : counts) EXPECT_GT(c, 350);
  EXPECT_THROW(resolve_origin(OriginPolicy::at(11), 10, 0), InputError);
}

TEST(PotentialGraph, BfsLayersMatchSirExactly) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto g = random_graph(1500, 50 + s, 1 + s % 2);
    InfectionConfig c;
    c.scenario = ContagionScenario::with_gamma(s % 2 ? Scenario::A : Scenario::B, 10.0);
    c.seed = s;
    const auto o = run_sir(g, c);
    const auto pg = build_potential_graph(g, c.scenario, c.seed);
    const auto ig = infection_graph_at(pg, o.origin, g.size());
    ASSERT_EQ(ig.hop, o.infection_time) << "seed " << s;
    std::vector<std::pair<VertexId, VertexId>> tx;
    for (const auto& tr : o.transmissions) tx.emplace_back(tr.from, tr.to);
    auto edges = ig.edges;
    std::sort(tx.begin(), tx.end());
    std::sort(edges.begin(), edges.end());
    ASSERT_EQ(edges, tx);
  }
}

TEST(PotentialGraph, PartialNeighbourhoodIsAPrefix) {
  const auto g = random_graph(2000, 4);
  const auto pg = build_potential_graph(g, ContagionScenario::with_gamma(Scenario::B, 100.0), 11);
  std::size_t prev = 0;
  for (std::uint32_t t = 0; t < 8; ++t) {
    const auto ig = infection_graph_at(pg, 1, t);
    for (VertexId v : ig.vertices) ASSERT_LE(*ig.hop[v - 1], t);
    ASSERT_GE(ig.vertices.size(), prev);
    prev = ig.vertices.size();
  }
  EXPECT_EQ(infection_graph_at(pg, 1, 0).vertices, std::vector<VertexId>{1});
}

TEST(PotentialGraph, OccupationFrequencyMatchesBeta) {
  const auto g = handmade(2, {{2, 1}});
  const std::vector<double> beta{0.3, 0.8};
  const int trials = 40000;
  int forward = 0, backward = 0;
  for (int s = 0; s < trials; ++s) {
    const auto pg = build_potential_graph(g, beta, hash_words({99, std::uint64_t(s)}));
    forward += !pg.out_neighbours(1).empty();
    backward += !pg.out_neighbours(2).empty();
  }
  EXPECT_NEAR(forward / double(trials), 0.3, 3 * std::sqrt(0.21 / trials));
  EXPECT_NEAR(backward / double(trials), 0.8, 3 * std::sqrt(0.16 / trials));
}

TEST(GammaMonotonicity, SharedDrawsGiveNestedOutbreaks) {
  // beta is nondecreasing in gamma and the pair draws are shared, so every
  // occupied pair stays occupied and the reachable set can only grow.
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = random_graph(2000, 300 + s);
    for (Scenario sc : {Scenario::A, Scenario::B}) {
      std::vector<bool> prev_reached(g.size(), false);
      std::uint32_t prev_attack = 0;
      std::size_t prev_occupied = 0;
      for (double gamma : {1.0, 10.0, 100.0}) {
        InfectionConfig c;
        c.scenario = ContagionScenario::with_gamma(sc, gamma);
        c.seed = s;
        const auto o = run_sir(g, c);
        const auto pg = build_potential_graph(g, c.scenario, c.seed);
        ASSERT_GE(o.attack_size, prev_attack);
        ASSERT_GE(pg.occupied().size(), prev_occupied);
        for (VertexId v = 1; v <= g.size(); ++v)
          if (prev_reached[v - 1]) {
            ASSERT_TRUE(o.time_of(v)) << "vertex " << v << " lost at gamma " << gamma;
          }
        for (VertexId v = 1; v <= g.size(); ++v) prev_reached[v - 1] = o.time_of(v).has_value();
        prev_attack = o.attack_size;
        prev_occupied = pg.occupied().size();
      }
    }
  }
}

TEST(GammaMonotonicity, LongestOccupiedEdgeIsNondecreasing) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = random_graph(2000, 700 + s);
    double prev = 0.0;
    for (double gamma : {1.0, 10.0, 100.0}) {
      const auto pg = build_potential_graph(g, ContagionScenario::with_gamma(Scenario::A, gamma), s);
      const double cur = longest_edge(pg);
      ASSERT_GE(cur, prev);
      prev = cur;
    }
  }
}

}  // namespace
}  // namespace spa
