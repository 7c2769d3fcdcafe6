#include <filesystem>
#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "spa/generator.hpp"
#include "spa/graph_io.hpp"

namespace spa {
namespace {

SpaGraph sample_graph(Variant v = Variant::Modified, int d = 2, double p = 2.0) {
  SpaParams params;
  params.n = 800;
  params.seed = 31;
  params.variant = v;
  params.metric = MetricConfig{d, p};
  params.A1 = 0.3;
  params.A2 = 1.7;
  return generate(params);
}

TEST(GraphIo, RoundTripIsBitExact) {
  for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    const auto g = sample_graph(Variant::Original, 3, p);
    std::stringstream ss;
    write_graph(ss, g);
    const auto back = read_graph(ss);
    EXPECT_EQ(back.params(), g.params());
    EXPECT_EQ(back.positions(), g.positions());
    EXPECT_EQ(back.edges(), g.edges());
  }
}

TEST(GraphIo, WriteIsDeterministic) {
  std::stringstream a, b;
  write_graph(a, sample_graph());
  write_graph(b, sample_graph());
  EXPECT_EQ(a.str(), b.str());
}

TEST(GraphIo, HeaderLayout) {
  std::stringstream ss;
  write_graph(ss, sample_graph(Variant::Modified, 1, std::numeric_limits<double>::infinity()));
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "spa v1 modified 0.3 1.7 1 inf 800 31");
  std::string first;
  std::getline(ss, first);
  EXPECT_EQ(first.rfind("1 ", 0), 0u);
}

TEST(GraphIo, SingleVertexGraph) {
  std::stringstream ss("spa v1 original 0.5 1 2 2 1 0\n1 0.25 0.5\n");
  const auto g = read_graph(ss);
  EXPECT_EQ(g.size(), 1u);
  EXPECT_TRUE(g.edges().empty());
  EXPECT_EQ(g.position(1)[1], 0.5);
}

void expect_error_mentioning(const std::string& text, const std::string& needle) {
  std::stringstream ss(text);
  try {
    read_graph(ss);
    FAIL() << "expected InputError for: " << text;
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(GraphIo, MalformedInputsNameTheLine) {
  expect_error_mentioning("", "empty");
  expect_error_mentioning("graph v1\n", "line 1");
  expect_error_mentioning("spa v1 modified 0.5 1 1 inf 2 0\n1 0.1\n", "line 2: unexpected end");
  expect_error_mentioning("spa v1 modified 0.5 1 1 inf 2 0\n1 0.1\n3 0.2\n", "line 3");
  expect_error_mentioning("spa v1 modified 0.5 1 1 inf 2 0\n1 0.1\n2 x\n", "not a number");
  expect_error_mentioning("spa v1 modified 0.5 1 1 inf 2 0\n1 0.1\n2 0.2\n2\n", "line 4");
  expect_error_mentioning("spa v1 modified 1.5 1 1 inf 2 0\n", "line 1");
  expect_error_mentioning("spa v1 hybrid 0.5 1 1 inf 2 0\n", "line 1");
}

TEST(GraphIo, StructuralErrorsAreRejected) {
  std::stringstream backwards("spa v1 modified 0.5 1 1 inf 2 0\n1 0.1\n2 0.2\n1 2\n");
  EXPECT_THROW(read_graph(backwards), InputError);
  std::stringstream dup("spa v1 modified 0.5 1 1 inf 2 0\n1 0.1\n2 0.2\n2 1\n2 1\n");
  EXPECT_THROW(read_graph(dup), InputError);
  std::stringstream outside("spa v1 modified 0.5 1 1 inf 2 0\n1 1.0\n2 0.2\n");
  EXPECT_THROW(read_graph(outside), InputError);
}

TEST(GraphIo, MissingFileIsAnIoError) {
  EXPECT_THROW(load_graph("/nonexistent/dir/graph.txt"), IoError);
  EXPECT_THROW(save_graph("/nonexistent/dir/graph.txt", sample_graph()), IoError);
}

TEST(GraphIo, SaveAndLoadFile) {
  const auto path = std::filesystem::temp_directory_path() / "spa_graph_io_test.txt";
  const auto g = sample_graph();
  save_graph(path.string(), g);
  const auto back = load_graph(path.string());
  EXPECT_EQ(back.edges(), g.edges());
  std::filesystem::remove(path);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(parse_double(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_THROW(parse_double("1.0x"), InputError);
  EXPECT_THROW(parse_int<int>("12a"), InputError);
}

}  // namespace
}  // namespace spa
