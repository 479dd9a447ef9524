#include "svi/bench.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "svi/errors.hpp"

namespace svi {

namespace {

constexpr std::uint64_t kInitialPointStream = 0x1417;

std::string fmt(double v, int precision = 10) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

template <class T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  if (!node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

StepRule parse_step_rule(const YAML::Node& node) {
  StepRule rule;
  if (!node) return rule;
  if (node.IsScalar()) {
    const auto name = node.as<std::string>();
    if (name == "paper_game_rule") {
      rule.kind = StepRule::Kind::PaperGame;
    } else if (name == "paper_fractional_rule") {
      rule.kind = StepRule::Kind::PaperFractional;
    } else {
      throw ConfigError("unknown step_rule '" + name + "'");
    }
    return rule;
  }
  if (node.IsMap() && node["explicit"]) {
    rule.kind = StepRule::Kind::Explicit;
    rule.alpha = node["explicit"].as<double>();
    if (!(rule.alpha > 0.0)) throw ConfigError("step_rule.explicit must be positive");
    return rule;
  }
  throw ConfigError("step_rule must be paper_game_rule, paper_fractional_rule or {explicit: a}");
}

BatchRule parse_batch_rule(const YAML::Node& node) {
  BatchRule rule;
  if (!node) return rule;
  if (node.IsScalar()) {
    const auto name = node.as<std::string>();
    if (name != "experiment") throw ConfigError("unknown batch_rule '" + name + "'");
    return rule;
  }
  if (!node.IsMap()) throw ConfigError("batch_rule must be a name or a map");
  if (node["experiment"]) {
    rule.kind = BatchRule::Kind::Experiment;
    const auto e = node["experiment"];
    if (e.IsMap() && e["d"] && e["d"].as<std::string>() != "auto") rule.d = e["d"].as<std::int64_t>();
    if (e.IsMap() && e["rounding"]) {
      const auto r = e["rounding"].as<std::string>();
      if (r == "ceil") rule.rounding = ExperimentBatch::Rounding::Ceil;
      else if (r != "half_up") throw ConfigError("batch_rule rounding must be half_up or ceil");
    }
  } else if (node["constant"]) {
    rule.kind = BatchRule::Kind::Constant;
    rule.m = node["constant"].as<std::int64_t>();
  } else if (node["polylog"]) {
    rule.kind = BatchRule::Kind::PolyLog;
    const auto p = node["polylog"];
    rule.c = get_or<double>(p, "c", 1.0);
    rule.n0 = get_or<std::int64_t>(p, "n0", 2);
    rule.a = get_or<double>(p, "a", 1.0);
    rule.b = get_or<double>(p, "b", 0.0);
  } else {
    throw ConfigError("batch_rule map needs one of experiment, constant, polylog");
  }
  return rule;
}

}  // namespace

StepSizePolicy StepRule::policy(const ProblemInstance& problem, Algorithm algorithm) const {
  switch (kind) {
    case Kind::PaperGame: return paper_game_rule(problem.lipschitz_L, algorithm);
    case Kind::PaperFractional: return paper_fractional_rule(problem.dim, algorithm);
    case Kind::Explicit: return StepSizePolicy::constant(alpha);
  }
  throw InvalidInput("unknown step rule");
}

BatchSchedule BatchRule::schedule(std::int64_t problem_dim) const {
  switch (kind) {
    case Kind::Experiment: return BatchSchedule::experiment_rule(d.value_or(problem_dim), rounding);
    case Kind::Constant: return BatchSchedule::constant(m);
    case Kind::PolyLog: return BatchSchedule::poly_log(c, n0, a, b);
  }
  throw InvalidInput("unknown batch rule");
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (dims.empty()) throw ConfigError("dims must be nonempty");
  if (algorithms.empty()) throw ConfigError("algorithms must be nonempty");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (!(stop.residual_tol > 0.0) || !(stop.residual_alpha > 0.0) || stop.max_iterations < 0 ||
      stop.check_every < 1)
    throw ConfigError("stop: need tol > 0, alpha > 0, max_iterations >= 0, check_every >= 1");
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be >= 0");
  for (const auto& d : dims) {
    if (is_game(family)) {
      if (d.size() != 2 || d[0] < 1 || d[1] < 1)
        throw ConfigError("game dims must be [n_I, n_II] with positive entries");
      if (family == Family::Symmetric && d[0] != d[1])
        throw ConfigError("symmetric games need n_I = n_II");
    } else if (d.size() != 1 || d[0] < 1) {
      throw ConfigError("dims for " + to_string(family) + " must be positive integers");
    }
  }
  if (step_rule.kind == StepRule::Kind::PaperFractional && !step_override)
    throw ConfigError(
        "paper_fractional_rule has no verified Lipschitz bound; set step_override: true");
  try {
    (void)batch_rule.schedule(1);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("batch_rule: ") + e.what());
  }
}

ExperimentConfig parse_experiment_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a YAML mapping");

  ExperimentConfig c;
  try {
    if (!root["family"]) throw ConfigError("config needs 'family'");
    c.family = parse_family(root["family"].as<std::string>());

    if (!root["dims"]) throw ConfigError("config needs 'dims'");
    for (const auto& d : root["dims"]) {
      if (d.IsSequence()) {
        c.dims.push_back(d.as<std::vector<std::int64_t>>());
      } else if (is_game(c.family)) {
        const auto n = d.as<std::int64_t>();
        c.dims.push_back({n, n});
      } else {
        c.dims.push_back({d.as<std::int64_t>()});
      }
    }
    if (root["algorithms"]) {
      c.algorithms.clear();
      for (const auto& a : root["algorithms"]) c.algorithms.push_back(parse_algorithm(a.as<std::string>()));
    }
    c.replications = get_or<std::int64_t>(root, "replications", 10);
    c.base_seed = get_or<std::uint64_t>(root, "base_seed", 0);
    c.noise_sd = get_or<double>(root, "noise_sd", 0.1);
    if (root["payoffs"]) c.payoffs = parse_payoffs(root["payoffs"].as<std::string>());
    c.affine_strong = get_or<bool>(root, "strong", true);
    if (const auto s = root["stop"]) {
      c.stop.residual_tol = get_or<double>(s, "tol", c.stop.residual_tol);
      c.stop.residual_alpha = get_or<double>(s, "alpha", c.stop.residual_alpha);
      c.stop.max_iterations = get_or<std::int64_t>(s, "max_iterations", c.stop.max_iterations);
      c.stop.check_every = get_or<std::int64_t>(s, "check_every", c.stop.check_every);
    }
    c.step_rule = parse_step_rule(root["step_rule"]);
    c.step_override = get_or<bool>(root, "step_override", false);
    c.batch_rule = parse_batch_rule(root["batch_rule"]);
    c.record_trajectory = get_or<bool>(root, "record_trajectory", false);
    c.output_dir = get_or<std::string>(root, "output_dir", "");
    c.parallelism = get_or<int>(root, "parallelism", 1);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

namespace {
std::uint64_t dims_key(const ExperimentConfig& config, std::size_t dim_index) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(config.family) + 1);
  for (auto v : config.dims.at(dim_index)) h = hash_combine(h, static_cast<std::uint64_t>(v));
  return h;
}
}  // namespace

std::uint64_t problem_seed(const ExperimentConfig& config, std::size_t dim_index,
                           std::int64_t replication) {
  return config.base_seed ^
         hash_combine(dims_key(config, dim_index), static_cast<std::uint64_t>(replication));
}

std::uint64_t solver_seed(const ExperimentConfig& config, std::size_t dim_index,
                          Algorithm algorithm, std::int64_t replication) {
  const auto h = hash_combine(dims_key(config, dim_index),
                              static_cast<std::uint64_t>(algorithm) + 0x100);
  return config.base_seed ^ hash_combine(h, static_cast<std::uint64_t>(replication));
}

ProblemSpec problem_spec(const ExperimentConfig& config, std::size_t dim_index,
                         std::int64_t replication) {
  ProblemSpec s;
  s.family = config.family;
  const auto& d = config.dims.at(dim_index);
  if (is_game(config.family)) {
    s.n_I = d.at(0);
    s.n_II = d.at(1);
    s.payoffs = config.payoffs;
  } else {
    s.dim = d.at(0);
  }
  s.seed = problem_seed(config, dim_index, replication);
  s.noise_sd = config.noise_sd;
  s.strong = config.affine_strong;
  return s;
}

std::string RunRecord::run_id() const {
  return to_string(spec.family) + "/" + spec.dim_label() + "/" + to_string(algorithm) + "/" +
         std::to_string(replication);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();

  struct Task {
    std::size_t dim_index;
    Algorithm algorithm;
    std::int64_t replication;
  };
  std::vector<Task> tasks;
  for (std::size_t di = 0; di < config.dims.size(); ++di)
    for (auto alg : config.algorithms)
      for (std::int64_t r = 0; r < config.replications; ++r) tasks.push_back({di, alg, r});

  std::vector<RunRecord> records(tasks.size());
  auto execute = [&](std::size_t i) {
    const Task& t = tasks[i];
    RunRecord rec;
    rec.spec = problem_spec(config, t.dim_index, t.replication);
    rec.algorithm = t.algorithm;
    rec.replication = t.replication;
    rec.solver_seed = solver_seed(config, t.dim_index, t.algorithm, t.replication);

    const ProblemInstance problem = make_problem(rec.spec);
    RngStream init(rec.spec.seed, kInitialPointStream);
    const Vector x0 = default_initial_point(problem, init);

    SolverConfig sc;
    sc.algorithm = t.algorithm;
    sc.step_policy = config.step_rule.policy(problem, t.algorithm);
    sc.batch_schedule = config.batch_rule.schedule(problem.dim);
    sc.stop = config.stop;
    sc.seed = rec.solver_seed;
    sc.record_trajectory = config.record_trajectory;
    sc.step_override = config.step_override;
    rec.report = run(problem, sc, x0);
    records[i] = std::move(rec);
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), tasks.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) execute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < tasks.size(); i = next++) execute(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.summary = summarize(records);
  result.runs = std::move(records);
  if (!config.output_dir.empty()) write_experiment_artifacts(config, result);
  return result;
}

BenchmarkSummary summarize(const std::vector<RunRecord>& runs) {
  // Preserve first-appearance order of (family, dim, algorithm).
  std::vector<std::tuple<std::string, std::string, std::string>> keys;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : runs) {
    auto key = std::make_tuple(to_string(r.spec.family), r.spec.dim_label(), to_string(r.algorithm));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }
  BenchmarkSummary s;
  for (const auto& key : keys) {
    const auto& g = groups.at(key);
    std::vector<double> its, times, calls;
    double converged = 0.0;
    for (const auto* r : g) {
      its.push_back(static_cast<double>(r->report.iterations));
      times.push_back(r->report.wall_time_s);
      calls.push_back(static_cast<double>(r->report.oracle_calls));
      if (r->report.converged) converged += 1.0;
    }
    SummaryRow row;
    std::tie(row.family, row.dim, row.algorithm) = key;
    row.mean_iterations = mean_of(its);
    row.sd_iterations = sd_of(its);
    row.mean_time_s = mean_of(times);
    row.sd_time_s = sd_of(times);
    row.mean_oracle_calls = mean_of(calls);
    row.convergence_rate = converged / static_cast<double>(g.size());
    s.rows.push_back(row);
  }
  return s;
}

const SummaryRow* BenchmarkSummary::find(const std::string& dim,
                                         const std::string& algorithm) const {
  for (const auto& r : rows)
    if (r.dim == dim && r.algorithm == algorithm) return &r;
  return nullptr;
}

std::optional<double> BenchmarkSummary::iteration_ratio(const std::string& dim) const {
  const auto* seg = find(dim, "seg");
  const auto* sfbf = find(dim, "sfbf");
  if (!seg || !sfbf || sfbf->mean_iterations == 0.0) return std::nullopt;
  return seg->mean_iterations / sfbf->mean_iterations;
}

std::optional<double> BenchmarkSummary::time_ratio(const std::string& dim) const {
  const auto* seg = find(dim, "seg");
  const auto* sfbf = find(dim, "sfbf");
  if (!seg || !sfbf || sfbf->mean_time_s == 0.0) return std::nullopt;
  return seg->mean_time_s / sfbf->mean_time_s;
}

std::string emit_table(const BenchmarkSummary& summary, TableStyle style) {
  if (summary.rows.empty()) throw InvalidInput("emit_table: empty summary");
  std::ostringstream os;
  if (style == TableStyle::Csv) {
    os << "family,dim,algorithm,mean_iterations,sd_iterations,mean_time_s,sd_time_s,"
          "mean_oracle_calls,convergence_rate\n";
    for (const auto& r : summary.rows) {
      os << r.family << ',' << r.dim << ',' << r.algorithm << ',' << fmt(r.mean_iterations) << ','
         << fmt(r.sd_iterations) << ',' << fmt(r.mean_time_s) << ',' << fmt(r.sd_time_s) << ','
         << fmt(r.mean_oracle_calls) << ',' << fmt(r.convergence_rate) << '\n';
    }
    return os.str();
  }

  // One line per (family, dim) with SFBF and SEG side by side.
  std::vector<std::pair<std::string, std::string>> sizes;
  for (const auto& r : summary.rows) {
    auto key = std::make_pair(r.family, r.dim);
    if (std::find(sizes.begin(), sizes.end(), key) == sizes.end()) sizes.push_back(key);
  }
  auto cell = [](const SummaryRow* r, bool time) {
    if (!r) return std::string("-");
    return time ? fmt(r->mean_time_s, 4) : fmt(r->mean_iterations, 5);
  };
  os << std::left << std::setw(12) << "family" << std::setw(12) << "dim" << std::right
     << std::setw(12) << "SFBF iter" << std::setw(12) << "SFBF s" << std::setw(12) << "SEG iter"
     << std::setw(12) << "SEG s" << std::setw(12) << "iter ratio" << std::setw(10) << "conv"
     << '\n';
  for (const auto& [family, dim] : sizes) {
    const SummaryRow* f = nullptr;
    const SummaryRow* e = nullptr;
    for (const auto& r : summary.rows) {
      if (r.family != family || r.dim != dim) continue;
      if (r.algorithm == "sfbf") f = &r;
      if (r.algorithm == "seg") e = &r;
    }
    const auto ratio = summary.iteration_ratio(dim);
    std::string conv;
    if (f) conv += fmt(f->convergence_rate, 3);
    if (e) conv += (conv.empty() ? "" : "/") + fmt(e->convergence_rate, 3);
    os << std::left << std::setw(12) << family << std::setw(12) << dim << std::right
       << std::setw(12) << cell(f, false) << std::setw(12) << cell(f, true) << std::setw(12)
       << cell(e, false) << std::setw(12) << cell(e, true) << std::setw(12)
       << (ratio ? fmt(*ratio, 4) : std::string("-")) << std::setw(10) << conv << '\n';
  }
  return os.str();
}

BenchmarkSummary parse_summary_csv(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("parse_summary_csv: empty input");
  const auto header = split(line, ',');
  const std::vector<std::string> expected{"family",        "dim",         "algorithm",
                                          "mean_iterations", "sd_iterations", "mean_time_s",
                                          "sd_time_s",     "mean_oracle_calls", "convergence_rate"};
  if (header != expected) throw InvalidInput("parse_summary_csv: unexpected header");
  BenchmarkSummary s;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != expected.size()) throw InvalidInput("parse_summary_csv: bad row '" + line + "'");
    SummaryRow r;
    r.family = f[0];
    r.dim = f[1];
    r.algorithm = f[2];
    r.mean_iterations = std::stod(f[3]);
    r.sd_iterations = std::stod(f[4]);
    r.mean_time_s = std::stod(f[5]);
    r.sd_time_s = std::stod(f[6]);
    r.mean_oracle_calls = std::stod(f[7]);
    r.convergence_rate = std::stod(f[8]);
    s.rows.push_back(r);
  }
  return s;
}

std::string emit_trajectory_curves(const std::vector<RunRecord>& runs) {
  std::vector<std::string> missing;
  for (const auto& r : runs)
    if (!r.report.trajectory) missing.push_back(r.run_id());
  if (!missing.empty()) {
    std::string msg = "emit_trajectory_curves: no trajectory recorded for";
    for (const auto& id : missing) msg += " " + id;
    throw Unsupported(msg);
  }
  std::ostringstream os;
  os << std::setprecision(12);
  os << "run_id,algorithm,n,wall_time_s,residual\n";
  for (const auto& r : runs) {
    const auto id = r.run_id();
    const auto alg = to_string(r.algorithm);
    for (const auto& pt : *r.report.trajectory)
      os << id << ',' << alg << ',' << pt.n << ',' << pt.wall_time_s << ',' << pt.residual << '\n';
  }
  return os.str();
}

std::string emit_runs_csv(const std::vector<RunRecord>& runs) {
  std::ostringstream os;
  os << "family,dim,algorithm,replication,problem_seed,solver_seed,iterations,converged,diverged,"
        "final_residual,oracle_calls\n";
  for (const auto& r : runs) {
    os << to_string(r.spec.family) << ',' << r.spec.dim_label() << ',' << to_string(r.algorithm)
       << ',' << r.replication << ',' << r.spec.seed << ',' << r.solver_seed << ','
       << r.report.iterations << ',' << (r.report.converged ? 1 : 0) << ','
       << (r.report.diverged ? 1 : 0) << ',' << fmt(r.report.final_residual, 12) << ','
       << r.report.oracle_calls << '\n';
  }
  return os.str();
}

std::string emit_timings_csv(const std::vector<RunRecord>& runs) {
  std::ostringstream os;
  os << "family,dim,algorithm,replication,wall_time_s\n";
  for (const auto& r : runs)
    os << to_string(r.spec.family) << ',' << r.spec.dim_label() << ',' << to_string(r.algorithm)
       << ',' << r.replication << ',' << fmt(r.report.wall_time_s, 6) << '\n';
  return os.str();
}

void write_experiment_artifacts(const ExperimentConfig& config, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory '" + config.output_dir + "'");
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + (dir / name).string());
    out << text;
  };
  write("runs.csv", emit_runs_csv(result.runs));
  write("timings.csv", emit_timings_csv(result.runs));
  if (!result.summary.rows.empty()) {
    write("summary.csv", emit_table(result.summary, TableStyle::Csv));
    write("summary.txt", emit_table(result.summary, TableStyle::AlignedText));
  }
  if (config.record_trajectory) write("trajectories.csv", emit_trajectory_curves(result.runs));
}

}  // namespace svi
