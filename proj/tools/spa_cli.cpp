// spa: generate SPA graphs, run SIR infections over them, tabulate bounds and
// verify invariants.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 I/O error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spa/experiment.hpp"
#include "spa/generator.hpp"
#include "spa/graph_io.hpp"
#include "spa/sir.hpp"
#include "spa/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

// CLI flag -> config key. Every flag can also be given in a --config file.
struct KeyFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr KeyFlag kSpaFlags[] = {
    {"--n", "spa.n", "vertex count(s); lists and start:stop:step ranges allowed"},
    {"--A1", "spa.A1", "A1 in (0,1)"},
    {"--A2", "spa.A2", "A2 >= 0"},
    {"--d", "spa.d", "torus dimension"},
    {"--p", "spa.p", "L_p norm: 1, 2, ... or inf"},
    {"--variant", "spa.variant", "original | modified"},
};

constexpr KeyFlag kInfectionFlags[] = {
    {"--scenario", "infection.scenario", "A | B (list)"},
    {"--gamma", "infection.gamma", "contagiousness tau*T (list)"},
    {"--tau", "infection.tau", "transmission probability per contact"},
    {"--origin", "infection.origin", "oldest | random | <vertex id>"},
    {"--runs", "infection.runs", "runs per grid cell"},
    {"--graphs-per-cell", "infection.graphs_per_cell", "distinct graphs per (n, variant, ...) cell"},
    {"--threads", "run.threads", "worker threads (0 = all cores)"},
};

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flag_values;
  std::string seed;
  std::string out;
};

void add_key_flags(CLI::App* cmd, Common& c, std::span<const KeyFlag> flags) {
  for (const auto& f : flags) cmd->add_option(f.flag, c.flag_values[f.key], f.help);
}

void add_common(CLI::App* cmd, Common& c, const std::string& out_help) {
  cmd->add_option("--config", c.config_path, "key = value configuration file");
  cmd->add_option("--set", c.sets, "extra key=value override (repeatable)");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--out", c.out, out_help);
}

spa::KeyValueConfig collect(const Common& c) {
  spa::KeyValueConfig kv;
  if (!c.config_path.empty()) kv.load(c.config_path);
  for (const auto& [key, value] : c.flag_values)
    if (!value.empty()) kv.set(key, value);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw spa::ConfigError("--set expects key=value, got '" + s + "'");
    kv.set(spa::KeyValueConfig::trim(s.substr(0, eq)), spa::KeyValueConfig::trim(s.substr(eq + 1)));
  }
  if (!c.seed.empty()) kv.set("run.seed", c.seed);
  if (!c.out.empty()) kv.set("output.dir", c.out);
  return kv;
}

template <class T>
const T& single(const std::vector<T>& v, const char* key) {
  if (v.size() != 1) throw spa::ConfigError("'" + std::string(key) + "' must be a single value here");
  return v.front();
}

spa::SpaParams single_params(const spa::ExperimentConfig& cfg) {
  spa::SpaParams p;
  p.n = single(cfg.n, "spa.n");
  p.variant = single(cfg.variant, "spa.variant");
  p.A1 = single(cfg.A1, "spa.A1");
  p.A2 = single(cfg.A2, "spa.A2");
  p.metric = spa::MetricConfig{single(cfg.d, "spa.d"), single(cfg.p, "spa.p")};
  p.seed = cfg.seed;
  try {
    p.validate();
  } catch (const spa::InputError& e) {
    throw spa::ConfigError(e.what());
  }
  return p;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw spa::IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw spa::IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

int cmd_generate(const Common& c) {
  auto kv = collect(c);
  kv.set("output.dir", c.out.empty() ? "graph.txt" : c.out);
  spa::ExperimentConfig cfg;
  cfg.apply(kv);
  const auto params = single_params(cfg);
  const auto g = spa::generate(params);
  spa::save_graph(cfg.output, g);
  std::cout << "n=" << g.size() << " edges=" << g.edges().size() << " mean_in_degree=" << g.mean_in_degree()
            << " file=" << cfg.output << '\n';
  return 0;
}

int cmd_infect(const Common& c, const std::string& graph_path, const std::string& run_id, std::uint64_t graph_seed,
               bool graph_seed_set) {
  auto kv = collect(c);
  spa::ExperimentConfig cfg;
  cfg.apply(kv);
  const auto g = [&] {
    if (!graph_path.empty()) return spa::load_graph(graph_path);
    auto params = single_params(cfg);
    params.seed = graph_seed_set ? graph_seed : cfg.seed;
    return spa::generate(params);
  }();

  spa::InfectionConfig ic;
  ic.origin = cfg.origin;
  ic.scenario = spa::ContagionScenario{single(cfg.scenario, "infection.scenario"), cfg.tau,
                                       single(cfg.gamma, "infection.gamma") / cfg.tau};
  ic.seed = cfg.seed;
  ic.contagion = cfg.contagion;
  try {
    ic.scenario.validate();
    spa::resolve_origin(ic.origin, g.size(), ic.seed);
  } catch (const spa::InputError& e) {
    throw spa::ConfigError(e.what());
  }
  const auto o = spa::run_sir(g, ic);

  const fs::path detail = fs::path(cfg.output) / "infections" / (run_id + ".csv");
  auto os = open_out(detail);
  os << "vertex,infection_time,infector,edge_length\n";
  for (spa::VertexId v = 1; v <= g.size(); ++v) {
    const auto t = o.time_of(v);
    if (!t) continue;
    os << v << ',' << *t << ',';
    if (v != o.origin) os << o.infector[v - 1] << ',' << spa::format_double(g.distance(o.infector[v - 1], v));
    else os << ',';
    os << '\n';
  }
  if (!os.flush()) throw spa::IoError("write failed for '" + detail.string() + "'");

  const auto& p = g.params();
  spa::ExperimentRecord r{p.n,        p.variant,     p.A1,          p.A2,          p.metric.dim,
                          p.metric.p, ic.scenario.kind, ic.scenario.gamma(), 0,     ic.seed,
                          o.origin,   o.attack_size, o.duration,    o.longest_jump, o.max_displacement};
  std::cout << spa::kExperimentHeader << '\n' << spa::format_record(r) << '\n';
  std::cerr << "detail: " << detail.string() << '\n';
  return 0;
}

int cmd_experiment(const Common& c, bool standard) {
  auto kv = collect(c);
  auto cfg = standard ? spa::ExperimentConfig::standard_protocol() : spa::ExperimentConfig{};
  cfg.apply(kv);
  cfg.validate();
  const fs::path path = fs::path(cfg.output) / "experiments.csv";
  auto os = open_out(path);
  const auto rows = spa::run_experiment(cfg, os);
  if (!os) throw spa::IoError("write failed for '" + path.string() + "'");
  std::cout << rows << " rows -> " << path.string() << '\n';
  return 0;
}

int cmd_bounds(const Common& c) {
  auto kv = collect(c);
  spa::ExperimentConfig cfg;
  cfg.apply(kv);
  const double A1 = single(cfg.A1, "spa.A1"), A2 = single(cfg.A2, "spa.A2");
  const spa::MetricConfig metric{single(cfg.d, "spa.d"), single(cfg.p, "spa.p")};
  try {
    spa::SpaParams{A1, A2, 1, metric, spa::Variant::Modified, 0}.validate();
  } catch (const spa::InputError& e) {
    throw spa::ConfigError(e.what());
  }
  const double gamma = single(cfg.gamma, "infection.gamma");
  const double pb = spa::phi_bound(A1, metric.dim);
  double phi = pb / 2;
  if (auto v = kv.get("bounds.phi")) {
    try {
      phi = spa::parse_double(*v);
    } catch (const spa::InputError& e) {
      throw spa::ConfigError(std::string("invalid value for 'bounds.phi': ") + e.what());
    }
  }
  if (!(phi > 0)) throw spa::ConfigError("invalid value for 'bounds.phi': must be > 0");
  std::vector<double> ns;
  if (kv.has("spa.n")) {
    for (auto n : cfg.n) ns.push_back(n);
  } else {
    for (int e = 3; e <= 12; ++e) ns.push_back(std::pow(10.0, e));
  }
  if (phi >= pb)
    std::cerr << "warning: phi=" << phi << " >= phi_bound=" << pb << "; bound not guaranteed to vanish\n";

  const fs::path path = fs::path(cfg.output) / "bounds.csv";
  auto os = open_out(path);
  os << spa::kBoundsHeader << '\n';
  for (double n : ns) os << spa::format_bound_row(spa::bound_row(n, A1, A2, gamma, metric, phi)) << '\n';
  if (!os.flush()) throw spa::IoError("write failed for '" + path.string() + "'");
  std::cout << ns.size() << " rows -> " << path.string() << '\n';
  return 0;
}

int cmd_verify(const Common& c, const std::string& level, const std::string& graph_path) {
  auto kv = collect(c);
  spa::ExperimentConfig cfg;
  cfg.apply(kv);
  if (level != "fast" && level != "full") throw spa::ConfigError("invalid value for '--level': fast | full");

  std::vector<spa::CheckResult> results;
  auto report = [](const spa::CheckResult& r) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cout << " [" << r.detail << "]";
    std::cout << std::endl;
  };
  if (!graph_path.empty()) {
    const auto g = spa::load_graph(graph_path);
    results.push_back(spa::check_sphere_containment(g, graph_path));
    report(results.back());
  } else {
    results = spa::run_verify(level == "full" ? spa::VerifyLevel::Full : spa::VerifyLevel::Fast, cfg.seed, report);
  }
  std::size_t failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed ? kExitVerify : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial preferential attachment graphs and SIR infection experiments"};
  app.require_subcommand(1);

  Common gen_c, inf_c, exp_c, bnd_c, ver_c;

  auto* gen = app.add_subcommand("generate", "generate one graph and write it as an edge-list file");
  add_common(gen, gen_c, "output graph file (default graph.txt)");
  add_key_flags(gen, gen_c, kSpaFlags);

  auto* inf = app.add_subcommand("infect", "run one infection and write its per-vertex detail");
  add_common(inf, inf_c, "output directory (detail goes to <out>/infections/<run-id>.csv)");
  add_key_flags(inf, inf_c, kSpaFlags);
  add_key_flags(inf, inf_c, kInfectionFlags);
  std::string graph_path, run_id = "run";
  std::uint64_t graph_seed = 0;
  inf->add_option("--graph", graph_path, "graph file to infect (otherwise one is generated)");
  auto* gseed = inf->add_option("--graph-seed", graph_seed, "seed for the generated graph (default: --seed)");
  inf->add_option("--run-id", run_id, "name of the detail file");

  auto* exp = app.add_subcommand("experiment", "run an experiment grid and write experiments.csv");
  add_common(exp, exp_c, "output directory");
  add_key_flags(exp, exp_c, kSpaFlags);
  add_key_flags(exp, exp_c, kInfectionFlags);
  bool standard = false;
  exp->add_flag("--standard", standard, "start from the standard protocol grid (n = 1000..10000, 50 runs)");

  auto* bnd = app.add_subcommand("bounds", "tabulate critical times and the long-edge probability bound");
  add_common(bnd, bnd_c, "output directory");
  add_key_flags(bnd, bnd_c, kSpaFlags);
  bnd->add_option("--gamma", bnd_c.flag_values["infection.gamma"], "contagiousness tau*T");
  bnd->add_option("--phi", bnd_c.flag_values["bounds.phi"], "exponent phi (default phi_bound / 2)");

  auto* ver = app.add_subcommand("verify", "run the invariant suite");
  add_common(ver, ver_c, "unused");
  std::string level = "fast", verify_graph;
  ver->add_option("--level", level, "fast | full");
  ver->add_option("--graph", verify_graph, "only check sphere containment of this graph file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(gen_c);
    if (*inf) return cmd_infect(inf_c, graph_path, run_id, graph_seed, gseed->count() > 0);
    if (*exp) return cmd_experiment(exp_c, standard);
    if (*bnd) return cmd_bounds(bnd_c);
    if (*ver) return cmd_verify(ver_c, level, verify_graph);
  } catch (const spa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const spa::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const spa::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
