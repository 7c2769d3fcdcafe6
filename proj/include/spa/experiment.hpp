#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "spa/analysis.hpp"
#include "spa/contagion.hpp"
#include "spa/errors.hpp"
#include "spa/generator.hpp"
#include "spa/graph_io.hpp"
#include "spa/random.hpp"
#include "spa/sir.hpp"

// Experiment orchestration: a flat `section.key = value` configuration, a
// parameter grid, deterministic seeding and the experiments CSV.
//
// Seed derivation (hash_words in random.hpp: h = mix64(h ^ w) over the
// words, starting from h = 0, mix64 = SplitMix64 finalizer; tag_word is
// 64-bit FNV-1a of the ASCII tag):
//   graph seed     = hash_words(master, graph_cell, graph_index, tag_word("graph"))
//   infection seed = hash_words(master, cell, run, tag_word("infect"))
// graph_cell enumerates (n, variant, A1, A2, d, p) in that nesting order
// (n outermost); cell extends it with (scenario, gamma); graph_index =
// run mod graphs_per_cell.

namespace spa {

// ---------------------------------------------------------------------------
// key = value configuration

/// Flat key-value store. Later assignments override earlier ones, so a
/// config file followed by CLI overrides is just two merges.
class KeyValueConfig {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  /// Lines `section.key = value`; '#' starts a comment.
  void parse(std::istream& is, const std::string& source = "config") {
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      const auto key = trim(line.substr(0, eq == std::string::npos ? line.size() : eq));
      if (key.empty() && eq == std::string::npos) continue;
      if (eq == std::string::npos || key.empty())
        throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
      set(key, trim(line.substr(eq + 1)));
    }
  }

  void load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path + "'");
    parse(is, path);
  }

  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
  }

 private:
  std::map<std::string, std::string> values_;
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = KeyValueConfig::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& raw, Parse&& parse) {
  std::vector<T> out;
  try {
    for (const auto& item : split_list(raw)) out.push_back(parse(item));
  } catch (const std::exception& e) {
    throw ConfigError("invalid value for '" + key + "': " + e.what());
  }
  if (out.empty()) throw ConfigError("empty value for '" + key + "'");
  return out;
}

/// Integer list; items may be ranges `start:stop:step` (inclusive).
inline std::vector<std::uint32_t> parse_n_list(const std::string& key, const std::string& raw) {
  std::vector<std::uint32_t> out;
  try {
    for (const auto& item : split_list(raw)) {
      const auto c1 = item.find(':');
      if (c1 == std::string::npos) {
        out.push_back(parse_int<std::uint32_t>(item));
        continue;
      }
      const auto c2 = item.find(':', c1 + 1);
      const auto start = parse_int<std::uint32_t>(item.substr(0, c1));
      const auto stop = parse_int<std::uint32_t>(item.substr(c1 + 1, c2 == std::string::npos ? std::string::npos
                                                                                              : c2 - c1 - 1));
      const auto step = c2 == std::string::npos ? 1U : parse_int<std::uint32_t>(item.substr(c2 + 1));
      if (step == 0 || stop < start) throw InputError("bad range '" + item + "'");
      for (std::uint64_t v = start; v <= stop; v += step) out.push_back(static_cast<std::uint32_t>(v));
    }
  } catch (const std::exception& e) {
    throw ConfigError("invalid value for '" + key + "': " + e.what());
  }
  if (out.empty()) throw ConfigError("empty value for '" + key + "'");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment grid

struct ExperimentConfig {
  std::vector<std::uint32_t> n{1000};
  std::vector<Variant> variant{Variant::Modified};
  std::vector<double> A1{0.5};
  std::vector<double> A2{1.0};
  std::vector<int> d{1};
  std::vector<double> p{std::numeric_limits<double>::infinity()};

  std::vector<Scenario> scenario{Scenario::A, Scenario::B};
  std::vector<double> gamma{1.0, 10.0, 100.0};
  double tau = 1.0;
  OriginPolicy origin = OriginPolicy::oldest();
  std::uint32_t runs = 50;
  std::uint32_t graphs_per_cell = 1;
  ContagionOptions contagion{};

  std::uint64_t seed = 0;
  std::string output = "out";
  unsigned threads = 0;  // 0: hardware concurrency

  /// Standard simulation protocol: modified SPA, A1 = 0.5, A2 = 1, d = 1,
  /// n = 1000..10000 step 1000, scenarios A and B, gamma in {1, 10, 100},
  /// 50 runs per cell on one graph per n, infections from the oldest vertex.
  static ExperimentConfig standard_protocol() {
    ExperimentConfig c;
    c.n = detail::parse_n_list("spa.n", "1000:10000:1000");
    return c;
  }

  std::size_t graph_cells() const { return n.size() * variant.size() * A1.size() * A2.size() * d.size() * p.size(); }
  std::size_t cells() const { return graph_cells() * scenario.size() * gamma.size(); }
  std::size_t rows() const { return cells() * runs; }

  void validate() const {
    auto field = [](const char* key, auto&& check) {
      try {
        check();
      } catch (const InputError& e) {
        throw ConfigError(std::string("invalid value for '") + key + "': " + e.what());
      }
    };
    if (runs < 1) throw ConfigError("invalid value for 'infection.runs': must be >= 1");
    if (graphs_per_cell < 1) throw ConfigError("invalid value for 'infection.graphs_per_cell': must be >= 1");
    for (auto v : n)
      if (v < 1) throw ConfigError("invalid value for 'spa.n': must be >= 1");
    for (double a : A1)
      field("spa.A1", [&] { SpaParams{a, 1.0, 1, {}, Variant::Modified, 0}.validate(); });
    for (double a : A2)
      field("spa.A2", [&] { SpaParams{0.5, a, 1, {}, Variant::Modified, 0}.validate(); });
    for (int dim : d)
      field("spa.d", [&] { MetricConfig{dim, 2.0}.validate(); });
    for (double norm : p)
      field("spa.p", [&] { MetricConfig{1, norm}.validate(); });
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("invalid value for 'infection.tau': must lie in (0,1]");
    for (double g : gamma)
      field("infection.gamma", [&] { ContagionScenario{Scenario::A, tau, g / tau}.validate(); });
    if (std::find(scenario.begin(), scenario.end(), Scenario::B) != scenario.end())
      for (double a : A2)
        if (!(a > 0.0)) throw ConfigError("invalid value for 'spa.A2': scenario B needs A2 > 0");
    if (origin.kind == OriginPolicy::Kind::Index)
      for (auto v : n)
        if (origin.index > v) throw ConfigError("invalid value for 'infection.origin': exceeds n=" + std::to_string(v));
  }

  /// Applies recognised keys; unknown keys are a configuration error.
  void apply(const KeyValueConfig& kv) {
    for (const auto& [key, raw] : kv.values()) {
      auto num = [&](const std::string& s) { return parse_double(s); };
      try {
        if (key == "spa.n") n = detail::parse_n_list(key, raw);
        else if (key == "spa.variant") variant = detail::parse_list<Variant>(key, raw, [](auto& s) { return parse_variant(s); });
        else if (key == "spa.A1") A1 = detail::parse_list<double>(key, raw, num);
        else if (key == "spa.A2") A2 = detail::parse_list<double>(key, raw, num);
        else if (key == "spa.d") d = detail::parse_list<int>(key, raw, [](auto& s) { return parse_int<int>(s); });
        else if (key == "spa.p") p = detail::parse_list<double>(key, raw, num);
        else if (key == "infection.scenario") scenario = detail::parse_list<Scenario>(key, raw, [](auto& s) { return parse_scenario(s); });
        else if (key == "infection.gamma") gamma = detail::parse_list<double>(key, raw, num);
        else if (key == "infection.tau") tau = num(raw);
        else if (key == "infection.origin") origin = parse_origin(raw);
        else if (key == "infection.runs") runs = parse_int<std::uint32_t>(raw);
        else if (key == "infection.graphs_per_cell") graphs_per_cell = parse_int<std::uint32_t>(raw);
        else if (key == "infection.exact_expected_degree") contagion.exact_expected_degree = parse_bool(raw);
        else if (key == "infection.empirical_mean_degree") contagion.empirical_mean_degree = parse_bool(raw);
        else if (key == "infection.degree_floor") contagion.expected_degree_floor = num(raw);
        else if (key == "run.seed") seed = parse_int<std::uint64_t>(raw);
        else if (key == "run.threads") threads = parse_int<unsigned>(raw);
        else if (key == "output.dir") output = raw;
        else if (key.rfind("bounds.", 0) == 0) continue;  // read by the bounds command
        else throw ConfigError("unknown configuration key '" + key + "'");
      } catch (const InputError& e) {
        throw ConfigError("invalid value for '" + key + "': " + e.what());
      }
    }
  }

  static OriginPolicy parse_origin(const std::string& s) {
    if (s == "oldest") return OriginPolicy::oldest();
    if (s == "random") return OriginPolicy::uniform_random();
    return OriginPolicy::at(parse_int<VertexId>(s));
  }

  static bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw InputError("expected true|false, got '" + s + "'");
  }
};

// ---------------------------------------------------------------------------
// Records

inline constexpr std::string_view kExperimentHeader =
    "n,variant,A1,A2,d,p,scenario,gamma,run,seed,origin,attack_size,duration,longest_jump,max_displacement";

struct ExperimentRecord {
  std::uint32_t n = 0;
  Variant variant = Variant::Modified;
  double A1 = 0, A2 = 0;
  int d = 1;
  double p = 0;
  Scenario scenario = Scenario::A;
  double gamma = 0;
  std::uint32_t run = 0;
  std::uint64_t seed = 0;
  VertexId origin = 0;
  std::uint32_t attack_size = 0;
  std::uint32_t duration = 0;
  double longest_jump = 0;
  double max_displacement = 0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

inline std::string format_record(const ExperimentRecord& r) {
  std::string s;
  s += std::to_string(r.n) + ',' + std::string(to_string(r.variant)) + ',' + format_double(r.A1) + ',' +
       format_double(r.A2) + ',' + std::to_string(r.d) + ',' + format_double(r.p) + ',' +
       std::string(to_string(r.scenario)) + ',' + format_double(r.gamma) + ',' + std::to_string(r.run) + ',' +
       std::to_string(r.seed) + ',' + std::to_string(r.origin) + ',' + std::to_string(r.attack_size) + ',' +
       std::to_string(r.duration) + ',' + format_double(r.longest_jump) + ',' + format_double(r.max_displacement);
  return s;
}

inline ExperimentRecord parse_record(std::string_view line) {
  std::vector<std::string_view> f;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (f.size() != 15) throw InputError("experiment row: expected 15 fields, got " + std::to_string(f.size()));
  ExperimentRecord r;
  r.n = parse_int<std::uint32_t>(f[0]);
  r.variant = parse_variant(f[1]);
  r.A1 = parse_double(f[2]);
  r.A2 = parse_double(f[3]);
  r.d = parse_int<int>(f[4]);
  r.p = parse_double(f[5]);
  r.scenario = parse_scenario(f[6]);
  r.gamma = parse_double(f[7]);
  r.run = parse_int<std::uint32_t>(f[8]);
  r.seed = parse_int<std::uint64_t>(f[9]);
  r.origin = parse_int<VertexId>(f[10]);
  r.attack_size = parse_int<std::uint32_t>(f[11]);
  r.duration = parse_int<std::uint32_t>(f[12]);
  r.longest_jump = parse_double(f[13]);
  r.max_displacement = parse_double(f[14]);
  return r;
}

inline std::vector<ExperimentRecord> read_experiments(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kExperimentHeader) throw InputError("experiments CSV: bad or missing header");
  std::vector<ExperimentRecord> out;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(parse_record(line));
  return out;
}

// ---------------------------------------------------------------------------
// Runner

struct GraphCell {
  std::uint32_t n;
  Variant variant;
  double A1, A2;
  int d;
  double p;
};

inline std::vector<GraphCell> enumerate_graph_cells(const ExperimentConfig& c) {
  std::vector<GraphCell> out;
  for (auto n : c.n)
    for (auto v : c.variant)
      for (double a1 : c.A1)
        for (double a2 : c.A2)
          for (int d : c.d)
            for (double p : c.p) out.push_back(GraphCell{n, v, a1, a2, d, p});
  return out;
}

inline std::uint64_t graph_seed(std::uint64_t master, std::size_t graph_cell, std::uint32_t graph_index) {
  return hash_words({master, graph_cell, graph_index, tag_word("graph")});
}

inline std::uint64_t infection_seed(std::uint64_t master, std::size_t cell, std::uint32_t run) {
  return hash_words({master, cell, run, tag_word("infect")});
}

inline SpaParams params_for(const GraphCell& gc, std::uint64_t seed) {
  SpaParams p;
  p.n = gc.n;
  p.variant = gc.variant;
  p.A1 = gc.A1;
  p.A2 = gc.A2;
  p.metric = MetricConfig{gc.d, gc.p};
  p.seed = seed;
  return p;
}

namespace detail {

template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < count;) job(k);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
}

}  // namespace detail

/// Runs the grid and writes the experiments CSV to `os`, one row per run in
/// grid order. Rows are flushed as soon as every earlier row is complete, so
/// an interrupted run keeps a valid prefix. Output is independent of the
/// number of worker threads.
inline std::size_t run_experiment(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  const auto gcells = enumerate_graph_cells(cfg);

  // graphs shared by every (scenario, gamma, run) of a graph cell
  std::vector<std::optional<SpaGraph>> graphs(gcells.size() * cfg.graphs_per_cell);
  detail::parallel_for(graphs.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t cell = k / cfg.graphs_per_cell;
    const auto index = static_cast<std::uint32_t>(k % cfg.graphs_per_cell);
    graphs[k].emplace(generate(params_for(gcells[cell], graph_seed(cfg.seed, cell, index))));
  });

  const std::size_t per_graph_cell = cfg.scenario.size() * cfg.gamma.size() * cfg.runs;
  const std::size_t total = gcells.size() * per_graph_cell;

  std::vector<std::optional<std::string>> rows(total);
  std::mutex mu;
  std::condition_variable ready;
  std::size_t written = 0;

  os << kExperimentHeader << '\n';
  auto flush_prefix = [&] {
    while (written < total && rows[written]) {
      os << *rows[written] << '\n';
      rows[written].reset();
      ++written;
    }
    os.flush();
  };

  detail::parallel_for(total, cfg.threads, [&](std::size_t job) {
    const std::size_t gcell = job / per_graph_cell;
    std::size_t rest = job % per_graph_cell;
    const auto run = static_cast<std::uint32_t>(rest % cfg.runs);
    rest /= cfg.runs;
    const std::size_t gamma_index = rest % cfg.gamma.size();
    const std::size_t scenario_index = rest / cfg.gamma.size();
    const std::size_t cell = job / cfg.runs;

    const SpaGraph& g = *graphs[gcell * cfg.graphs_per_cell + run % cfg.graphs_per_cell];
    InfectionConfig ic;
    ic.origin = cfg.origin;
    ic.scenario = ContagionScenario{cfg.scenario[scenario_index], cfg.tau, cfg.gamma[gamma_index] / cfg.tau};
    ic.seed = infection_seed(cfg.seed, cell, run);
    ic.contagion = cfg.contagion;
    const auto outcome = run_sir(g, ic);

    const GraphCell& gc = gcells[gcell];
    ExperimentRecord r{gc.n,          gc.variant,          gc.A1,        gc.A2,
                       gc.d,          gc.p,                ic.scenario.kind, cfg.gamma[gamma_index],
                       run,           ic.seed,             outcome.origin,   outcome.attack_size,
                       outcome.duration, outcome.longest_jump, outcome.max_displacement};
    std::lock_guard lock(mu);
    rows[job] = format_record(r);
    flush_prefix();
  });
  return written;
}

// ---------------------------------------------------------------------------
// Bound tables

inline constexpr std::string_view kBoundsHeader = "n,phi,bound,phi_bound,theta_bound,lambda,m,m1,gamma,guaranteed";

struct BoundRow {
  double n, phi, bound, phi_bound, theta_bound, lambda, m, m1, gamma;
  bool guaranteed;  // phi < phi_bound, so the bound vanishes as n grows
};

inline BoundRow bound_row(double n, double A1, double A2, double gamma, const MetricConfig& metric, double phi) {
  const double lambda = std::pow(n, -phi);
  const double pb = phi_bound(A1, metric.dim);
  return BoundRow{n,
                  phi,
                  long_edge_prob_bound(n, A1, A2, gamma, metric, phi),
                  pb,
                  theta_bound(A1),
                  lambda,
                  critical_time_m(lambda, A2, metric),
                  critical_time_m_i(1, lambda, A1, A2, metric),
                  gamma,
                  phi < pb};
}

inline std::string format_bound_row(const BoundRow& r) {
  return format_double(r.n) + ',' + format_double(r.phi) + ',' + format_double(r.bound) + ',' +
         format_double(r.phi_bound) + ',' + format_double(r.theta_bound) + ',' + format_double(r.lambda) + ',' +
         format_double(r.m) + ',' + format_double(r.m1) + ',' + format_double(r.gamma) + ',' +
         (r.guaranteed ? "1" : "0");
}

}  // namespace spa
