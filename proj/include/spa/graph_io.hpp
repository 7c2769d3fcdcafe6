#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "spa/errors.hpp"
#include "spa/graph.hpp"

// Plain-text graph format:
//
//   spa v1 <variant> <A1> <A2> <d> <p> <n> <seed>
//   <i> <c_1> ... <c_d>        (n lines, i = 1..n)
//   <j> <i>                    (one line per edge j -> i)
//
// Reals use the shortest representation that round-trips (std::to_chars),
// so positions reload bit-exactly in any locale. p is written as "inf" for
// the max norm.

namespace spa {

/// Shortest round-trip decimal form of x.
inline std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size()) throw InputError("not a number: '" + std::string(s) + "'");
  return x;
}

template <class Int>
Int parse_int(std::string_view s) {
  Int x{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size()) throw InputError("not an integer: '" + std::string(s) + "'");
  return x;
}

inline void write_graph(std::ostream& os, const SpaGraph& g) {
  const SpaParams& p = g.params();
  os << "spa v1 " << to_string(p.variant) << ' ' << format_double(p.A1) << ' ' << format_double(p.A2) << ' '
     << p.metric.dim << ' ' << format_double(p.metric.p) << ' ' << p.n << ' ' << p.seed << '\n';
  std::string line;
  for (VertexId v = 1; v <= g.size(); ++v) {
    line = std::to_string(v);
    for (double c : g.position(v)) {
      line += ' ';
      line += format_double(c);
    }
    line += '\n';
    os << line;
  }
  for (const Edge& e : g.edges()) os << e.tail << ' ' << e.head << '\n';
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

inline SpaGraph read_graph(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return InputError("graph file line " + std::to_string(line_no) + ": " + what);
  };

  if (!std::getline(is, line)) throw InputError("graph file: empty input");
  ++line_no;
  auto head = detail::split_ws(line);
  if (head.size() != 9 || head[0] != "spa" || head[1] != "v1") throw fail("expected 'spa v1 ...' header");
  SpaParams params;
  try {
    params.variant = parse_variant(head[2]);
    params.A1 = parse_double(head[3]);
    params.A2 = parse_double(head[4]);
    params.metric.dim = parse_int<int>(head[5]);
    params.metric.p = parse_double(head[6]);
    params.n = parse_int<std::uint32_t>(head[7]);
    params.seed = parse_int<std::uint64_t>(head[8]);
    params.validate();
  } catch (const InputError& e) {
    throw fail(e.what());
  }

  const auto d = static_cast<std::size_t>(params.metric.dim);
  std::vector<double> positions(static_cast<std::size_t>(params.n) * d);
  for (VertexId v = 1; v <= params.n; ++v) {
    if (!std::getline(is, line)) throw fail("unexpected end of file in positions");
    ++line_no;
    auto tok = detail::split_ws(line);
    if (tok.size() != d + 1) throw fail("expected vertex id and " + std::to_string(d) + " coordinates");
    VertexId id = 0;
    try {
      id = parse_int<VertexId>(tok[0]);
      for (std::size_t k = 0; k < d; ++k) positions[(v - 1) * d + k] = parse_double(tok[k + 1]);
    } catch (const InputError& e) {
      throw fail(e.what());
    }
    if (id != v) throw fail("vertices must be listed in order 1..n");
  }

  std::vector<Edge> edges;
  while (std::getline(is, line)) {
    ++line_no;
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw fail("expected 'j i' edge line");
    try {
      edges.push_back(Edge{parse_int<VertexId>(tok[0]), parse_int<VertexId>(tok[1])});
    } catch (const InputError& e) {
      throw fail(e.what());
    }
  }
  return SpaGraph(params, std::move(positions), std::move(edges));
}

inline void save_graph(const std::string& path, const SpaGraph& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_graph(os, g);
  if (!os.flush()) throw IoError("write failed for '" + path + "'");
}

inline SpaGraph load_graph(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return read_graph(is);
}

}  // namespace spa
