// ustlab: command-line front end for the Monte Carlo experiments.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ustlab/acceptance.hpp"
#include "ustlab/capacity.hpp"
#include "ustlab/crt.hpp"
#include "ustlab/experiment.hpp"
#include "ustlab/extension.hpp"
#include "ustlab/graph.hpp"
#include "ustlab/lerw.hpp"
#include "ustlab/stats.hpp"
#include "ustlab/wilson.hpp"

using namespace ustlab;
using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Flag values are collected as strings and applied on top of the config file.
struct Flags {
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  std::string config_path;

  void add(CLI::App* app, const std::string& name, const std::string& help) {
    std::string key = name;
    for (char& c : key)
      if (c == '-') c = '_';
    opts[key] = app->add_option("--" + name, raw[key], help);
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    for (const auto& [key, opt] : opts)
      if (opt->count() > 0) cfg.set(key, raw.at(key));
    return cfg;
  }
};

void add_common(CLI::App* app, Flags& f) {
  f.add(app, "graph", "graph spec, e.g. torus:d=5,n=8 or complete:m=400");
  f.add(app, "samples", "number of replicates");
  f.add(app, "seed", "master seed");
  f.add(app, "threads", "worker threads (0 = all cores)");
  f.add(app, "out", "output path (stdout when omitted)");
  app->add_option("--config", f.config_path, "flat key=value config file");
}

// Output goes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close(const std::string& path) {
    if (!file_) return;
    file_->close();
    if (!*file_) throw std::runtime_error("failed writing " + path);
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

GraphFamily require_graph(const ExperimentConfig& cfg) {
  if (cfg.graph.empty()) throw ConfigError("--graph is required");
  return parse_graph_spec(cfg.graph);
}

VertexId pick_vertex(const std::string& which, const GraphFamily& g, RandomStream& rng) {
  if (which.empty() || which == "random") return rng.uniform_index(g.vertex_count());
  std::size_t pos = 0;
  const auto v = std::stoull(which, &pos);
  if (pos != which.size() || !g.contains(v)) throw ConfigError("vertex out of range: " + which);
  return v;
}

std::string get_extra(const ExperimentConfig& cfg, const std::string& key, const std::string& fallback = {}) {
  auto it = cfg.extra.find(key);
  return it == cfg.extra.end() ? fallback : it->second;
}

std::string pair_column(int i, int j) { return "d_" + std::to_string(i + 1) + "_" + std::to_string(j + 1); }

json estimate_json(const EstimateWithCI& e) {
  return json{{"value", e.value}, {"half_width", e.half_width}, {"n_samples", e.n_samples}, {"estimator", e.estimator_id}};
}

json scales_json(const ScaleSet& s) { return json{{"tau", s.tau}, {"s", s.s}, {"q", s.q}, {"r", s.r}}; }

json config_json(const ExperimentConfig& cfg, const std::string& command) {
  json j{{"tool", kToolVersion}, {"command", command}};
  for (const auto& [k, v] : cfg.echo()) j["config"][k] = v;
  return j;
}

int cmd_lerw_sample(const ExperimentConfig& cfg) {
  const GraphFamily g = require_graph(cfg);
  const std::string from = get_extra(cfg, "from", "random"), to = get_extra(cfg, "to", "random");
  if (g.vertex_count() < 2) throw ConfigError("graph needs at least two vertices");

  std::optional<ScaleSet> scales = cfg.scales;
  std::uint64_t tau = scales ? scales->tau : mixing_time(g).tau;
  if (!scales) {
    try {
      scales = ScaleSet::standard(tau, g.vertex_count());
    } catch (const ScaleError&) {
      scales.reset();  // decomposability left blank
    }
  }
  std::optional<double> alpha, gamma;
  if (auto a = get_extra(cfg, "alpha"); !a.empty()) alpha = parse_real(a);
  if (auto c = get_extra(cfg, "gamma"); !c.empty()) gamma = parse_real(c);
  const bool classify = scales && alpha && gamma;
  const double loop_bound = std::floor(std::pow(static_cast<double>(g.vertex_count()), 0.5 - cfg.delta));
  const double kill = cfg.kill_mean(g);
  const RootedExtension ext = std::isinf(kill) ? RootedExtension{g, kill} : extend(g, kill);

  struct Row {
    std::uint64_t seed = 0, T = 0, le = 0, cutpoints = 0;
    int decomposable = -1;
    int intermediate = 0;
  };
  const RandomStream base(cfg.seed);
  const auto rows = run_replicates<Row>(cfg.samples, base, cfg.threads, [&](std::size_t, RandomStream& s) {
    Row row;
    row.seed = s.stream_id();
    const VertexId x = pick_vertex(from, g, s);
    VertexId y = pick_vertex(to, g, s);
    while (to == "random" && y == x) y = s.uniform_index(g.vertex_count());
    const WalkPath p = killed_walk(ext, x, VertexSet{y}, s);
    std::vector<VertexId> verts = p.vertices;
    if (p.stop_reason == StopReason::Killed) verts.pop_back();  // rho is not a base vertex
    row.T = p.last_index();
    row.le = loop_erase(p).length();
    row.cutpoints = local_cutpoints(verts, tau).size();
    row.intermediate = loop_bound >= static_cast<double>(tau) &&
                       has_loop_with_gap(verts, tau, static_cast<std::size_t>(loop_bound));
    if (classify) {
      CapacityOracle cap = [&](std::span<const VertexId> S) {
        if (g.vertex_count() <= kExactCapacityLimit) return cap_r_exact(g, S, scales->r);
        return cap_r(g, S, scales->r, s, 2000).value;
      };
      row.decomposable = is_locally_decomposable(verts, *scales, *alpha, *gamma, g.vertex_count(), cap).decomposable;
    }
    return row;
  });

  Output out(cfg.out);
  CsvWriter csv(out.stream(), cfg, "lerw sample", {"replicate", "seed", "T", "le_length", "cutpoint_count",
                                                   "decomposable", "intermediate_loop"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    csv.row({std::to_string(i), std::to_string(r.seed), std::to_string(r.T), std::to_string(r.le),
             std::to_string(r.cutpoints), r.decomposable < 0 ? "" : std::to_string(r.decomposable),
             std::to_string(r.intermediate)});
  }
  out.close(cfg.out);
  return kExitPass;
}

int cmd_ust_kpoints(const ExperimentConfig& cfg) {
  const GraphFamily g = require_graph(cfg);
  const int k = cfg.k;
  if (k < 2 || static_cast<std::uint64_t>(k) > g.vertex_count()) throw ConfigError("--k must be in [2, |G|]");
  const double kill = cfg.kill_mean(g);
  const bool extended = !std::isinf(kill);
  const RootedExtension ext = extended ? extend(g, kill) : RootedExtension{g, kill};

  struct Row {
    std::uint64_t seed = 0;
    Eigen::MatrixXd d;
    std::size_t components = 0;
  };
  const RandomStream base(cfg.seed);
  const auto rows = run_replicates<Row>(cfg.samples, base, cfg.threads, [&](std::size_t, RandomStream& s) {
    Row row;
    row.seed = s.stream_id();
    std::vector<VertexId> pts;
    while (pts.size() < static_cast<std::size_t>(k)) {
      const VertexId v = s.uniform_index(g.vertex_count());
      if (std::find(pts.begin(), pts.end(), v) == pts.end()) pts.push_back(v);
    }
    if (extended) {
      const SpanningForest f = forest_distances(partial_tree(ext, pts, s));
      row.d = f.distances;
      row.components = f.component_count;
    } else {
      row.d = partial_tree(g, pts[0], pts, s).distances();
      row.components = 1;
    }
    return row;
  });

  std::vector<std::string> cols{"replicate", "seed"};
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) cols.push_back(pair_column(i, j));
  cols.push_back("components");
  Output out(cfg.out);
  CsvWriter csv(out.stream(), cfg, "ust kpoints", cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> f{std::to_string(r), std::to_string(rows[r].seed)};
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) f.push_back(format_real(rows[r].d(i, j)));
    f.push_back(std::to_string(rows[r].components));
    csv.row(f);
  }
  out.close(cfg.out);
  return kExitPass;
}

int cmd_constants(const ExperimentConfig& cfg) {
  const GraphFamily g = require_graph(cfg);
  const ScaleSet scales = cfg.scales ? *cfg.scales : ScaleSet::standard(mixing_time(g).tau, g.vertex_count());
  const std::uint64_t inner = std::stoull(get_extra(cfg, "inner", "1000"));
  RandomStream rng(cfg.seed);
  const ConstantsReport rep = estimate_constants(g, scales, rng, cfg.samples, inner, cfg.threads);
  json j = config_json(cfg, "constants");
  j["graph"] = g.to_string();
  j["alpha"] = estimate_json(rep.alpha);
  j["gamma"] = estimate_json(rep.gamma);
  j["beta"] = estimate_json(rep.beta());
  j["m"] = rep.m;
  j["scales"] = scales_json(scales);
  j["vertex_count"] = rep.vertex_count;
  Output out(cfg.out);
  out.stream() << j.dump(2) << "\n";
  out.close(cfg.out);
  return kExitPass;
}

int cmd_lattice_limits(const ExperimentConfig& cfg) {
  const int d = std::stoi(get_extra(cfg, "d", "5"));
  const std::uint64_t trunc = std::stoull(get_extra(cfg, "trunc", "10000"));
  RandomStream rng(cfg.seed);
  const LatticeLimits lim = lattice_limit_constants(d, trunc, rng, cfg.samples, cfg.threads);
  json j = config_json(cfg, "lattice-limits");
  j["d"] = d;
  j["trunc"] = trunc;
  j["gamma_inf"] = estimate_json(lim.gamma);
  j["alpha_inf"] = estimate_json(lim.alpha);
  j["stability"] = json{{"trunc", trunc / 2},
                        {"gamma_inf", estimate_json(lim.gamma_half)},
                        {"alpha_inf", estimate_json(lim.alpha_half)},
                        {"gamma_shift", std::abs(lim.gamma.value - lim.gamma_half.value)},
                        {"alpha_shift", std::abs(lim.alpha.value - lim.alpha_half.value)}};
  Output out(cfg.out);
  out.stream() << j.dump(2) << "\n";
  out.close(cfg.out);
  return kExitPass;
}

int cmd_crt_sample(const ExperimentConfig& cfg) {
  const int k = cfg.k;
  if (k < 2) throw ConfigError("--k must be >= 2");
  const RandomStream base(cfg.seed);
  const auto rows = run_replicates<Eigen::MatrixXd>(cfg.samples, base, cfg.threads,
                                                    [&](std::size_t, RandomStream& s) { return sample_Fk(k, s); });
  std::vector<std::string> cols{"replicate"};
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) cols.push_back(pair_column(i, j));
  Output out(cfg.out);
  CsvWriter csv(out.stream(), cfg, "crt sample", cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::string> f{std::to_string(r)};
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) f.push_back(format_real(rows[r](i, j)));
    csv.row(f);
  }
  out.close(cfg.out);
  return kExitPass;
}

int cmd_compare(const ExperimentConfig& cfg) {
  const std::string dists = get_extra(cfg, "dists");
  if (dists.empty()) throw ConfigError("--dists is required");
  const std::string column = get_extra(cfg, "column", "d_1_2");
  const std::string ref = get_extra(cfg, "ref", "rayleigh");
  const std::string stat = get_extra(cfg, "stat", "ks");
  EmpiricalSample a(read_csv(dists).reals(column), dists);

  auto normalise = [&](const EmpiricalSample& s) {
    if (cfg.normalize == "median") return normalize_by_median(s, rayleigh_median());
    // beta mode: scale = beta |G|^{1/2}
    double beta = 0.0;
    if (auto b = get_extra(cfg, "beta"); !b.empty()) {
      beta = parse_real(b);
    } else if (auto c = get_extra(cfg, "constants"); !c.empty()) {
      std::ifstream in(c);
      if (!in) throw ConfigError("cannot read " + c);
      beta = json::parse(in).at("beta").at("value").get<double>();
    } else {
      throw ConfigError("--normalize beta needs --beta or --constants");
    }
    const GraphFamily g = require_graph(cfg);
    return normalize_by_scale(s, beta * std::sqrt(static_cast<double>(g.vertex_count())));
  };

  ComparisonReport rep;
  if (ref == "rayleigh") {
    rep = ks_against(normalise(a), rayleigh_cdf);
  } else {
    EmpiricalSample b(read_csv(ref).reals(get_extra(cfg, "ref_column", column)), ref);
    if (stat == "tv")
      rep = two_sample_tv(a, b);
    else
      rep = ks_two_sample(normalise(a), b);
  }
  auto th = cfg.thresholds.find("compare");
  if (auto t = get_extra(cfg, "threshold"); !t.empty())
    rep.against(parse_real(t));
  else if (th != cfg.thresholds.end())
    rep.against(th->second);
  json j = rep;
  Output out(cfg.out);
  out.stream() << j.dump(2) << "\n";
  out.close(cfg.out);
  return rep.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for loop-erased walks and uniform spanning trees"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Flags lerw_f, ust_f, const_f, lat_f, crt_f, cmp_f;

  CLI::App* lerw = app.add_subcommand("lerw", "loop-erased random walk experiments")->require_subcommand(1);
  CLI::App* lerw_sample = lerw->add_subcommand("sample", "walks between two vertices, one row per replicate");
  add_common(lerw_sample, lerw_f);
  lerw_f.add(lerw_sample, "from", "start vertex id or 'random'");
  lerw_f.add(lerw_sample, "to", "target vertex id or 'random'");
  lerw_f.add(lerw_sample, "scales", "tau,s,q,r override");
  lerw_f.add(lerw_sample, "delta", "exponent slack for the intermediate-loop flag");
  lerw_f.add(lerw_sample, "alpha", "alpha for the decomposability check");
  lerw_f.add(lerw_sample, "gamma", "gamma for the decomposability check");
  lerw_f.add(lerw_sample, "kill", "kill mean L |G|^{1/2}");
  lerw_f.add(lerw_sample, "kill-abs", "absolute kill mean");

  CLI::App* ust = app.add_subcommand("ust", "uniform spanning tree experiments")->require_subcommand(1);
  CLI::App* kpoints = ust->add_subcommand("kpoints", "pairwise distances among k uniform points");
  add_common(kpoints, ust_f);
  ust_f.add(kpoints, "k", "number of points");
  ust_f.add(kpoints, "kill", "kill mean L |G|^{1/2} (omit for the plain graph)");
  ust_f.add(kpoints, "kill-abs", "absolute kill mean");

  CLI::App* constants = app.add_subcommand("constants", "estimate alpha, gamma, beta and m");
  add_common(constants, const_f);
  const_f.add(constants, "scales", "tau,s,q,r override");
  const_f.add(constants, "inner", "stationary probes per capacity (0 = exact)");

  CLI::App* lattice = app.add_subcommand("lattice-limits", "whole-lattice limits of gamma and alpha");
  add_common(lattice, lat_f);
  lat_f.add(lattice, "d", "dimension (>= 5)");
  lat_f.add(lattice, "trunc", "walk truncation");

  CLI::App* crt = app.add_subcommand("crt", "Brownian CRT line breaking")->require_subcommand(1);
  CLI::App* crt_sample = crt->add_subcommand("sample", "draws from F_k");
  add_common(crt_sample, crt_f);
  crt_f.add(crt_sample, "k", "number of ends");

  CLI::App* compare = app.add_subcommand("compare", "compare a distance column with a reference");
  cmp_f.add(compare, "dists", "distances CSV");
  cmp_f.add(compare, "column", "column to compare (default d_1_2)");
  cmp_f.add(compare, "ref", "'rayleigh' or an F_k CSV");
  cmp_f.add(compare, "ref-column", "column of the reference CSV (default: same as --column)");
  cmp_f.add(compare, "stat", "ks or tv for CSV references");
  cmp_f.add(compare, "normalize", "median or beta");
  cmp_f.add(compare, "beta", "beta for --normalize beta");
  cmp_f.add(compare, "constants", "constants JSON providing beta");
  cmp_f.add(compare, "graph", "graph spec for --normalize beta");
  cmp_f.add(compare, "threshold", "pass when the statistic is below this");
  cmp_f.add(compare, "out", "report path (stdout when omitted)");
  compare->add_option("--config", cmp_f.config_path, "flat key=value config file");

  CLI::App* acceptance = app.add_subcommand("acceptance", "run the acceptance suite");
  bool quick = false;
  std::vector<std::string> only;
  AcceptanceOptions aopts;
  acceptance->add_flag("--quick", quick, "criteria A1..A5 only");
  acceptance->add_option("--only", only, "run just these criteria (e.g. A3)");
  acceptance->add_option("--seed", aopts.seed, "master seed");
  acceptance->add_option("--threads", aopts.threads, "worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (lerw_sample->parsed()) return cmd_lerw_sample(lerw_f.resolve());
    if (kpoints->parsed()) return cmd_ust_kpoints(ust_f.resolve());
    if (constants->parsed()) return cmd_constants(const_f.resolve());
    if (lattice->parsed()) return cmd_lattice_limits(lat_f.resolve());
    if (crt_sample->parsed()) return cmd_crt_sample(crt_f.resolve());
    if (compare->parsed()) return cmd_compare(cmp_f.resolve());
    if (acceptance->parsed()) {
      std::vector<std::string> ids = only;
      if (quick && ids.empty()) ids = quick_criteria();
      for (const auto& id : ids) {
        const auto& all = acceptance_criteria();
        if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return id == c.id; }))
          throw ConfigError("unknown criterion " + id);
      }
      const auto results = run_acceptance(ids, aopts, std::cout);
      const bool ok = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
      return ok ? kExitPass : kExitFail;
    }
  } catch (const ConfigError& e) {
    std::cerr << "ustlab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GraphError& e) {
    std::cerr << "ustlab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ScaleError& e) {
    std::cerr << "ustlab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "ustlab: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
