#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "spa/experiment.hpp"

namespace spa {
namespace {

ExperimentConfig small_grid() {
  ExperimentConfig c;
  c.n = {300, 600};
  c.gamma = {1.0, 10.0};
  c.runs = 3;
  c.seed = 42;
  c.threads = 1;
  return c;
}

TEST(KeyValueConfig, ParsesCommentsAndOverrides) {
  KeyValueConfig kv;
  std::istringstream is("# grid\nspa.n = 100, 200  # two sizes\n\n infection.gamma=1\n");
  kv.parse(is);
  EXPECT_EQ(kv.get("spa.n"), "100, 200");
  EXPECT_EQ(kv.get("infection.gamma"), "1");
  kv.set("infection.gamma", "5");
  EXPECT_EQ(kv.get("infection.gamma"), "5");
  std::istringstream bad("spa.n 100\n");
  EXPECT_THROW(kv.parse(bad), ConfigError);
}

TEST(ExperimentConfig, AppliesKeysAndRanges) {
  KeyValueConfig kv;
  kv.set("spa.n", "1000:3000:1000, 5000");
  kv.set("spa.variant", "original,modified");
  kv.set("spa.p", "2, inf");
  kv.set("infection.scenario", "B");
  kv.set("infection.origin", "random");
  kv.set("infection.exact_expected_degree", "true");
  kv.set("run.seed", "99");
  ExperimentConfig c;
  c.apply(kv);
  EXPECT_EQ(c.n, (std::vector<std::uint32_t>{1000, 2000, 3000, 5000}));
  EXPECT_EQ(c.variant.size(), 2u);
  EXPECT_EQ(c.p.size(), 2u);
  EXPECT_EQ(c.scenario, std::vector<Scenario>{Scenario::B});
  EXPECT_EQ(c.origin.kind, OriginPolicy::Kind::UniformRandom);
  EXPECT_TRUE(c.contagion.exact_expected_degree);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.rows(), 4u * 2u * 2u * 1u * 3u * 50u);
}

void expect_config_error(const std::string& key, const std::string& value) {
  KeyValueConfig kv;
  kv.set(key, value);
  ExperimentConfig c;
  try {
    c.apply(kv);
    c.validate();
    FAIL() << key << " = " << value << " accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
  }
}

TEST(ExperimentConfig, InvalidValuesNameTheKey) {
  expect_config_error("spa.A1", "1.5");
  expect_config_error("spa.A2", "-1");
  expect_config_error("spa.n", "0");
  expect_config_error("spa.n", "10:5");
  expect_config_error("spa.d", "0");
  expect_config_error("spa.p", "0.5");
  expect_config_error("spa.variant", "spa");
  expect_config_error("infection.gamma", "-2");
  expect_config_error("infection.tau", "0");
  expect_config_error("infection.runs", "0");
  expect_config_error("infection.origin", "5000");
  expect_config_error("spa.colour", "blue");
}

TEST(ExperimentConfig, ScenarioBNeedsPositiveA2) {
  ExperimentConfig c;
  c.A2 = {0.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c.scenario = {Scenario::A};
  EXPECT_NO_THROW(c.validate());
}

TEST(ExperimentConfig, ReferenceProtocolGrid) {
  const auto c = ExperimentConfig::standard_protocol();
  EXPECT_EQ(c.n.size(), 10u);
  EXPECT_EQ(c.n.front(), 1000u);
  EXPECT_EQ(c.n.back(), 10000u);
  EXPECT_EQ(c.rows(), 10u * 2u * 3u * 50u);
}

TEST(Records, FormatParseRoundTrip) {
  ExperimentRecord r{1000, Variant::Modified, 0.5, 1.0, 1, std::numeric_limits<double>::infinity(), Scenario::B,
                     10.0, 7, 123456789012345ULL, 1, 431, 9, 0.0123, 0.37};
  const auto line = format_record(r);
  EXPECT_EQ(line, "1000,modified,0.5,1,1,inf,B,10,7,123456789012345,1,431,9,0.0123,0.37");
  EXPECT_EQ(parse_record(line), r);
  EXPECT_THROW(parse_record("1,2,3"), InputError);
}

TEST(Seeds, DerivationIsStableAndDistinct) {
  EXPECT_EQ(graph_seed(1, 0, 0), hash_words({1, 0, 0, tag_word("graph")}));
  EXPECT_EQ(infection_seed(1, 2, 3), hash_words({1, 2, 3, tag_word("infect")}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t cell = 0; cell < 30; ++cell)
    for (std::uint32_t run = 0; run < 50; ++run) seen.insert(infection_seed(7, cell, run));
  EXPECT_EQ(seen.size(), 1500u);
  static_assert(hash_words({}) == 0);
  EXPECT_EQ(tag_word(""), 0xcbf29ce484222325ULL);
}

TEST(RunExperiment, WritesOneRowPerRunInGridOrder) {
  const auto c = small_grid();
  std::ostringstream os;
  EXPECT_EQ(run_experiment(c, os), c.rows());
  std::istringstream is(os.str());
  const auto rows = read_experiments(is);
  ASSERT_EQ(rows.size(), c.rows());
  // n outermost, then scenario, gamma, run
  EXPECT_EQ(rows.front().n, 300u);
  EXPECT_EQ(rows.back().n, 600u);
  EXPECT_EQ(rows[0].scenario, Scenario::A);
  EXPECT_EQ(rows[6].scenario, Scenario::B);
  EXPECT_EQ(rows[3].gamma, 10.0);
  EXPECT_EQ(rows[2].run, 2u);
  for (const auto& r : rows) {
    EXPECT_GE(r.attack_size, 1u);
    EXPECT_LE(r.attack_size, r.n);
    EXPECT_GE(r.duration, 1u);
    EXPECT_LE(r.longest_jump, 2 * r.max_displacement + 1e-12);
  }
}

TEST(RunExperiment, OutputIndependentOfThreadCount) {
  auto c = small_grid();
  std::ostringstream one, four;
  run_experiment(c, one);
  c.threads = 4;
  run_experiment(c, four);
  EXPECT_EQ(one.str(), four.str());
}

TEST(RunExperiment, RowsReplayFromRecordedSeeds) {
  const auto c = small_grid();
  std::ostringstream os;
  run_experiment(c, os);
  std::istringstream is(os.str());
  const auto rows = read_experiments(is);
  const auto gcells = enumerate_graph_cells(c);
  const auto g = generate(params_for(gcells[1], graph_seed(c.seed, 1, 0)));
  const auto& r = rows[c.rows() / 2 + 4];  // second graph cell, scenario A, gamma 10, run 1
  InfectionConfig ic;
  ic.scenario = ContagionScenario::with_gamma(r.scenario, r.gamma);
  ic.seed = r.seed;
  const auto o = run_sir(g, ic);
  EXPECT_EQ(o.attack_size, r.attack_size);
  EXPECT_EQ(o.duration, r.duration);
  EXPECT_EQ(o.longest_jump, r.longest_jump);
}

TEST(Bounds, RowFieldsAndGuarantee) {
  const MetricConfig m{1, std::numeric_limits<double>::infinity()};
  const auto row = bound_row(1e6, 0.5, 1.0, 10.0, m, 0.05);
  EXPECT_DOUBLE_EQ(row.phi_bound, 0.1);
  EXPECT_DOUBLE_EQ(row.theta_bound, 0.875);
  EXPECT_NEAR(row.lambda, std::pow(1e6, -0.05), 1e-15);
  EXPECT_TRUE(row.guaranteed);
  EXPECT_FALSE(bound_row(1e6, 0.5, 1.0, 10.0, m, 0.2).guaranteed);
  EXPECT_EQ(bound_row(1e6, 0.5, 1.0, 0.0, m, 0.05).bound, 0.0);
  const auto line = format_bound_row(row);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), std::count(kBoundsHeader.begin(), kBoundsHeader.end(), ','));
}

}  // namespace
}  // namespace spa
