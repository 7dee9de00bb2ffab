// Copyright 2026 The bicolor Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================
#include "bicolor/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "bicolor/dataset.hpp"
#include "bicolor/errors.hpp"
#include "bicolor/logistic.hpp"

namespace bicolor {
namespace {

// ---------------------------------------------------------------------------
// Config text conversion.

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string to_text(const std::string& v) { return "\"" + v + "\""; }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(std::uint64_t v) { return std::to_string(v); }
std::string to_text(double v) { return format_double(v); }
template <class T>
std::string to_text(const std::vector<T>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += to_text(v[i]);
  }
  return s + "]";
}

bool from_text(std::string_view s, std::string& out) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  if (s.find('"') != std::string_view::npos) return false;
  out = std::string(s);
  return true;
}
bool from_text(std::string_view s, bool& out) {
  if (s == "true" || s == "1") out = true;
  else if (s == "false" || s == "0") out = false;
  else return false;
  return true;
}
bool from_text(std::string_view s, std::uint64_t& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}
bool from_text(std::string_view s, double& out) {
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [p, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && first != p &&
         std::isfinite(out);
}
template <class T>
bool from_text(std::string_view s, std::vector<T>& out) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') return false;
  s = trim(s.substr(1, s.size() - 2));
  out.clear();
  while (!s.empty()) {
    const auto comma = s.find(',');
    T v{};
    if (!from_text(trim(s.substr(0, comma)), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s = trim(s.substr(comma + 1));
    if (s.empty()) return false;
  }
  return true;
}

struct Field {
  const char* key;
  std::function<bool(ExperimentConfig&, std::string_view)> set;
  std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <class T>
Field field(const char* key, T ExperimentConfig::*m) {
  return {key,
          [m](ExperimentConfig& c, std::string_view s) { return from_text(s, c.*m); },
          [m](const ExperimentConfig& c) -> std::optional<std::string> {
            return to_text(c.*m);
          }};
}

template <class T>
Field field(const char* key, std::optional<T> ExperimentConfig::*m) {
  return {key,
          [m](ExperimentConfig& c, std::string_view s) {
            T v{};
            if (!from_text(s, v)) return false;
            c.*m = v;
            return true;
          },
          [m](const ExperimentConfig& c) -> std::optional<std::string> {
            if (!(c.*m)) return std::nullopt;
            return to_text(*(c.*m));
          }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      field("dataset", &C::dataset),
      field("synthetic", &C::synthetic),
      field("synthetic_rows", &C::synthetic_rows),
      field("synthetic_dim", &C::synthetic_dim),
      field("heterogeneity", &C::heterogeneity),
      field("dimension", &C::dimension),
      field("data_seed", &C::data_seed),
      field("n", &C::n),
      field("kappa", &C::kappa),
      field("mu", &C::mu),
      field("fold_regularizers", &C::fold_regularizers),
      field("init", &C::init),
      field("alpha", &C::alpha),
      field("strategy", &C::strategy),
      field("uplink", &C::uplink),
      field("downlink", &C::downlink),
      field("k", &C::k),
      field("K", &C::K),
      field("K_s", &C::K_s),
      field("omega_av", &C::omega_av),
      field("strict_float32", &C::strict_float32),
      field("schedule", &C::schedule),
      field("p", &C::p),
      field("a", &C::a),
      field("b", &C::b),
      field("C", &C::C),
      field("compare_constant", &C::compare_constant),
      field("gamma", &C::gamma),
      field("gamma_grid", &C::gamma_grid),
      field("sweep_iters", &C::sweep_iters),
      field("seeds", &C::seeds),
      field("stop_metric", &C::stop_metric),
      field("target", &C::target),
      field("bit_budget", &C::bit_budget),
      field("max_iters", &C::max_iters),
      field("record_every", &C::record_every),
      field("uplink_policy", &C::uplink_policy),
      field("count_index_overhead", &C::count_index_overhead),
      field("output", &C::output),
  };
  return table;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Experiment construction.

CompressorSpec custom_spec(const std::string& name, std::size_t d,
                           std::size_t K) {
  if (name == "identity") return CompressorSpec::identity(d);
  if (name == "natural") return CompressorSpec::natural(d);
  if (name == "rand_k") return CompressorSpec::rand_k(d, K);
  if (name == "rand_k+natural")
    return CompressorSpec::composed(CompressorSpec::natural(d),
                                    CompressorSpec::rand_k(d, K));
  throw ContractViolation("unknown compressor '" + name + "'");
}

ProblemInstance make_problem(const ExperimentConfig& c) {
  if (c.n == 0) throw ContractViolation("n must be positive");
  if (c.mu && c.kappa)
    throw ContractViolation("set either kappa or mu, not both");
  if (c.dataset.empty() && c.synthetic == "quadratic") {
    SyntheticQuadraticSpec s;
    s.n = c.n;
    s.d = c.synthetic_dim;
    s.L = 1.0;
    s.kappa = c.kappa ? *c.kappa : (c.mu ? 1.0 / *c.mu : 50.0);
    s.heterogeneity = c.heterogeneity;
    s.seed = c.data_seed;
    return make_synthetic_quadratic(s).problem;
  }
  SparseDataset data;
  if (!c.dataset.empty()) {
    data = load_libsvm(c.dataset, c.dimension);
  } else if (c.synthetic == "logistic") {
    SyntheticLogisticSpec s;
    s.rows = c.synthetic_rows;
    s.d = c.synthetic_dim;
    s.seed = c.data_seed;
    data = make_synthetic_logistic(s);
  } else {
    throw ContractViolation("unknown synthetic kind '" + c.synthetic + "'");
  }
  Rng shuffle = Rng::derive(c.data_seed, 0x5eed);
  Partition part = partition(data, c.n, shuffle);
  LogisticProblemOptions opts;
  opts.kappa = c.kappa;
  opts.mu = c.mu;
  opts.fold_regularizers = c.fold_regularizers;
  return make_logistic_problem(part.shards, opts);
}

RunOptions make_run_options(const ExperimentConfig& c) {
  RunOptions o;
  o.stop.max_iterations = c.max_iters;
  o.stop.target = c.target;
  o.stop.bit_budget = c.bit_budget;
  o.stop.metric = parse_stop_metric(c.stop_metric);
  o.record_every = std::max<std::uint64_t>(1, c.record_every);
  o.cost.alpha = c.alpha;
  o.cost.count_index_overhead = c.count_index_overhead;
  if (c.uplink_policy == "sum")
    o.cost.uplink_policy = UplinkPolicy::sum_over_clients;
  else if (c.uplink_policy == "max")
    o.cost.uplink_policy = UplinkPolicy::max_over_clients;
  else
    throw ContractViolation("uplink_policy must be sum or max");
  o.fingerprint = fingerprint(c);
  return o;
}

std::vector<double> metric_series(const RunTrace& trace, StopMetric metric) {
  std::vector<double> out;
  if (trace.records.empty()) return out;
  const double psi0 = trace.records.front().psi;
  const double sub0 = trace.records.front().subopt;
  for (const auto& r : trace.records) {
    switch (metric) {
      case StopMetric::rel_dist: out.push_back(r.rel_dist); break;
      case StopMetric::rel_subopt: out.push_back(sub0 > 0 ? r.subopt / sub0 : 0); break;
      case StopMetric::rel_psi: out.push_back(psi0 > 0 ? r.psi / psi0 : 0); break;
    }
  }
  return out;
}

template <class T>
bool parse_field(std::string_view s, T& out) {
  if constexpr (std::is_same_v<T, double>) {
    return from_text(s, out) || s == "nan" || s == "inf";
  } else {
    return from_text(s, out);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

StopMetric parse_stop_metric(const std::string& name) {
  if (name == "rel_dist") return StopMetric::rel_dist;
  if (name == "rel_subopt") return StopMetric::rel_subopt;
  if (name == "rel_psi") return StopMetric::rel_psi;
  throw ContractViolation("unknown stop metric '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view text = line;
    // '#' inside a quoted string is kept.
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '"') quoted = !quoted;
      if (text[i] == '#' && !quoted) {
        text = text.substr(0, i);
        break;
      }
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(number, "expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return key == f.key; });
    if (it == table.end()) throw ParseError(number, "unknown key '" + key + "'");
    if (const auto prev = seen.find(key); prev != seen.end())
      throw ParseError(number, "duplicate key '" + key + "' (first on line " +
                                   std::to_string(prev->second) + ")");
    seen[key] = number;
    if (!it->set(c, value))
      throw ParseError(number, "bad value for '" + key + "': " + std::string(value));
  }
  if (c.seeds.empty()) throw ParseError(number, "seeds must be nonempty");
  for (const double g : c.gamma_grid)
    if (!(g > 0)) throw ParseError(number, "gamma_grid values must be positive");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in);
}

std::string serialize(const ExperimentConfig& config) {
  std::string out;
  for (const auto& f : fields())
    if (const auto v = f.get(config)) out += std::string(f.key) + " = " + *v + "\n";
  return out;
}

std::string fingerprint(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(serialize(config))));
  return buf;
}

Experiment build_experiment(const ExperimentConfig& c) {
  ProblemInstance problem = make_problem(c);
  const std::size_t d = problem.d();
  const std::size_t n = problem.n();
  const std::optional<double> kappa = problem.kappa();

  const bool decreasing = c.schedule == "decreasing";
  if (!decreasing && c.schedule != "constant")
    throw ContractViolation("schedule must be constant or decreasing");
  const double C = c.C ? *c.C : (decreasing ? 0.99 : 1.0);

  std::vector<CompressorSpec> up;
  std::optional<CompressorSpec> down;
  std::size_t k = d;
  std::optional<double> corollary_p;
  double omega = 0;
  double omega_s = 0;
  double om_av = 0;

  auto finish_specs = [&]() {
    omega = up.front().omega_on(k);
    omega_s = down->omega_on(k);
    om_av = c.omega_av ? *c.omega_av : omega_av(up);
    if (k < d) {
      // omega_av() reports on R^d; on a k-subset use the block variance.
      if (!c.omega_av)
        om_av = up.front().independence() == Independence::mutually_independent
                    ? omega / static_cast<double>(n)
                    : omega;
    }
  };

  if (c.strategy == "subset_k_natural") {
    if (c.k) {
      k = *c.k;
    } else {
      if (!kappa)
        throw ContractViolation("subset_k_natural without strong convexity "
                                "needs an explicit k");
      k = corollary_params(c.alpha, d, n, *kappa, 1.0, Strategy::subset_k).k;
    }
    up.assign(n, CompressorSpec::natural(d));
    down = CompressorSpec::natural(d);
    finish_specs();
    if (kappa) {
      // The subset-k probability, evaluated at the k actually used.
      const StepSizes s = default_params(omega, om_av, omega_s, C);
      corollary_p = std::min(
          1.0, static_cast<double>(d) /
                   (static_cast<double>(k) * std::sqrt(s.eta * *kappa)));
    }
  } else if (c.strategy == "rand_K_natural") {
    std::size_t K = 0;
    std::size_t K_s = 0;
    if (kappa) {
      const auto cp = corollary_params(c.alpha, d, n, *kappa, 1.0, Strategy::rand_K);
      K = cp.K;
      K_s = cp.K_s;
    }
    if (c.K) K = *c.K;
    if (c.K_s) K_s = *c.K_s;
    if (K == 0 || K_s == 0)
      throw ContractViolation("rand_K_natural without strong convexity needs "
                              "explicit K and K_s");
    const auto nat = CompressorSpec::natural(d);
    up.assign(n, CompressorSpec::composed(nat, CompressorSpec::rand_k(d, K)));
    down = CompressorSpec::composed(nat, CompressorSpec::rand_k(d, K_s));
    k = d;
    finish_specs();
    if (kappa) {
      const StepSizes s = default_params(omega, om_av, omega_s, C);
      corollary_p = corollary_params(c.alpha, d, n, *kappa, s.eta,
                                     Strategy::rand_K).p;
    }
  } else if (c.strategy == "custom") {
    k = c.k ? *c.k : d;
    const std::size_t K = c.K ? *c.K : d;
    const std::size_t K_s = c.K_s ? *c.K_s : K;
    for (std::size_t i = 0; i < n; ++i) up.push_back(custom_spec(c.uplink, d, K));
    down = custom_spec(c.downlink, d, K_s);
    finish_specs();
  } else {
    throw ContractViolation("unknown strategy '" + c.strategy + "'");
  }

  const StepSizes steps = default_params(omega, om_av, omega_s, C);
  AlgoConfig algo;
  algo.rho = steps.rho;
  algo.rho_y = steps.rho_y;
  algo.eta = steps.eta;
  algo.eta_y = steps.eta_y;
  algo.k = k;
  algo.uplink_specs = up;
  algo.downlink_spec = *down;
  algo.omega_av = om_av;
  algo.strict_float32 = c.strict_float32;
  if (decreasing) {
    if (c.a || c.b) {
      if (!(c.a && c.b)) throw ContractViolation("set both a and b");
      algo.schedule = PSchedule::decreasing(*c.a, *c.b);
    } else {
      algo.schedule = sqrt_decay_schedule(steps.eta);
    }
  } else {
    algo.schedule = PSchedule::constant(c.p ? *c.p : corollary_p.value_or(1.0));
  }
  const double gamma_units = c.gamma.value_or(1.0);
  algo.gamma = gamma_units / problem.L();

  InitMode init;
  if (c.init == "warm")
    init = InitMode::warm(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)));
  else if (c.init != "zeros")
    throw ContractViolation("init must be zeros or warm");

  RunOptions options = make_run_options(c);
  std::optional<AlgoConfig> constant_variant;
  if (c.compare_constant) {
    if (!decreasing)
      throw ContractViolation("compare_constant needs the decreasing schedule");
    constant_variant = algo;
    constant_variant->schedule = PSchedule::constant(
        matched_constant_p(algo.schedule, options.stop.max_iterations));
  }
  Experiment e{std::move(problem), std::move(algo), gamma_units, init,
               std::move(options), std::move(constant_variant), omega, omega_s};
  e.algo.validate(e.problem.n(), e.problem.d());
  return e;
}

AlgoConfig with_gamma(const Experiment& e, const AlgoConfig& algo,
                      double gamma_units) {
  AlgoConfig out = algo;
  out.gamma = gamma_units / e.problem.L();
  return out;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("BICOLOR_WORKERS")) {
    std::uint64_t v = 0;
    if (from_text(std::string_view(env), v) && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SweepResult sweep_gamma(const Experiment& e, const ExperimentConfig& c,
                        const ReferenceSolution& ref) {
  if (c.gamma_grid.empty()) throw ContractViolation("gamma grid is empty");
  const std::size_t g = c.gamma_grid.size();
  const std::size_t s = c.seeds.size();
  std::vector<double> metric(g * s, 0.0);
  std::vector<std::string> evidence(g * s);
  RunOptions opts = e.options;
  opts.stop.max_iterations = c.sweep_iters;
  opts.stop.bit_budget.reset();
  opts.record_every = c.sweep_iters;

  parallel_for(g * s, [&](std::size_t job) {
    const std::size_t gi = job / s;
    const std::size_t si = job % s;
    try {
      const RunTrace tr = run(e.problem, with_gamma(e, e.algo, c.gamma_grid[gi]),
                              e.init, ref, c.seeds[si], opts);
      metric[job] = tr.final_metric;
      if (tr.status == RunStatus::diverged)
        evidence[job] = "seed " + std::to_string(c.seeds[si]) +
                        ": metric " + format_double(tr.final_metric) +
                        " at t=" + std::to_string(tr.iterations);
    } catch (const std::exception& ex) {
      metric[job] = std::numeric_limits<double>::quiet_NaN();
      evidence[job] = "seed " + std::to_string(c.seeds[si]) + ": " + ex.what();
    }
  });

  SweepResult result;
  std::optional<std::size_t> best;
  for (std::size_t gi = 0; gi < g; ++gi) {
    SweepEntry entry;
    entry.gamma_units = c.gamma_grid[gi];
    double sum = 0;
    for (std::size_t si = 0; si < s; ++si) {
      const double m = metric[gi * s + si];
      const auto& ev = evidence[gi * s + si];
      if (!ev.empty() || !std::isfinite(m) ||
          m > e.options.stop.divergence_factor) {
        entry.diverged = true;
        if (entry.evidence.empty())
          entry.evidence = ev.empty() ? "metric " + format_double(m) : ev;
      }
      sum += m;
    }
    entry.metric = sum / static_cast<double>(s);
    if (!entry.diverged &&
        (!best || entry.metric < result.entries[*best].metric))
      best = gi;
    result.entries.push_back(entry);
  }
  if (!best) {
    std::string msg = "every gamma in the grid diverged:";
    for (const auto& en : result.entries)
      msg += " [" + format_double(en.gamma_units) + ": " + en.evidence + "]";
    throw std::runtime_error(msg);
  }
  result.best = result.entries[*best].gamma_units;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  Experiment e = build_experiment(config);
  SolverOptions so;
  if (!e.problem.kappa()) so.tol = 1e-10;
  const ReferenceSolution ref = solve_reference(e.problem, so);

  ExperimentResult result;
  result.gamma_units = e.gamma_units;
  if (!config.gamma) {
    result.sweep = sweep_gamma(e, config, ref);
    result.gamma_units = result.sweep->best;
  }

  struct Variant {
    std::string label;
    AlgoConfig algo;
  };
  std::vector<Variant> variants;
  variants.push_back({e.algo.schedule.kind() == PSchedule::Kind::decreasing
                          ? "decreasing"
                          : "constant",
                      with_gamma(e, e.algo, result.gamma_units)});
  if (e.constant_variant)
    variants.push_back(
        {"constant", with_gamma(e, *e.constant_variant, result.gamma_units)});

  const std::size_t s = config.seeds.size();
  result.traces.resize(variants.size() * s);
  parallel_for(result.traces.size(), [&](std::size_t job) {
    const auto& v = variants[job / s];
    RunTrace tr = run(e.problem, v.algo, e.init, ref, config.seeds[job % s],
                      e.options);
    tr.label = v.label;
    result.traces[job] = std::move(tr);
  });
  return result;
}

void write_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  out << kCsvHeader << '\n';
  for (const auto& tr : traces)
    for (const auto& r : tr.records)
      out << r.t << ',' << (r.communicated ? 1 : 0) << ',' << r.up_bits << ','
          << r.down_bits << ',' << format_double(r.total_bits_cum) << ','
          << format_double(r.psi) << ',' << format_double(r.subopt) << ','
          << format_double(r.bregman_sum) << ','
          << format_double(r.consensus_client) << ','
          << format_double(r.consensus_y) << ',' << r.seed << '\n';
}

std::vector<MetricRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw ParseError(1, "unexpected CSV header");
  std::vector<MetricRecord> out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest = trim(line);
    for (;;) {
      const auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (cols.size() != 11) throw ParseError(number, "expected 11 columns");
    MetricRecord r;
    std::uint64_t comm = 0;
    bool ok = parse_field(cols[0], r.t) && parse_field(cols[1], comm) &&
              comm <= 1 && parse_field(cols[2], r.up_bits) &&
              parse_field(cols[3], r.down_bits) &&
              parse_field(cols[4], r.total_bits_cum) &&
              parse_field(cols[5], r.psi) && parse_field(cols[6], r.subopt) &&
              parse_field(cols[7], r.bregman_sum) &&
              parse_field(cols[8], r.consensus_client) &&
              parse_field(cols[9], r.consensus_y) &&
              parse_field(cols[10], r.seed);
    if (!ok) throw ParseError(number, "malformed CSV row");
    r.communicated = comm == 1;
    out.push_back(r);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<RunTrace>& traces,
                       StopMetric metric) {
  struct Acc {
    std::size_t count = 0;
    double bits = 0;
    double sum = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
  };
  std::map<std::pair<std::string, std::uint64_t>, Acc> groups;
  for (const auto& tr : traces) {
    const auto series = metric_series(tr, metric);
    for (std::size_t i = 0; i < tr.records.size(); ++i) {
      Acc& a = groups[{tr.label, tr.records[i].t}];
      ++a.count;
      a.bits += tr.records[i].total_bits_cum;
      a.sum += series[i];
      a.lo = std::min(a.lo, series[i]);
      a.hi = std::max(a.hi, series[i]);
    }
  }
  out << "label,t,seeds,total_bits_mean,metric_mean,metric_min,metric_max\n";
  for (const auto& [key, a] : groups) {
    const double c = static_cast<double>(a.count);
    out << key.first << ',' << key.second << ',' << a.count << ','
        << format_double(a.bits / c) << ',' << format_double(a.sum / c) << ','
        << format_double(a.lo) << ',' << format_double(a.hi) << '\n';
  }
}

void write_svg(std::ostream& out, const std::vector<RunTrace>& traces,
               StopMetric metric) {
  constexpr double kW = 640, kH = 400, kPad = 50;
  double xmax = 1;
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> series;
  for (const auto& tr : traces) {
    series.push_back(metric_series(tr, metric));
    for (std::size_t i = 0; i < tr.records.size(); ++i) {
      xmax = std::max(xmax, tr.records[i].total_bits_cum);
      const double v = series.back()[i];
      if (v > 0 && std::isfinite(v)) {
        ymin = std::min(ymin, std::log10(v));
        ymax = std::max(ymax, std::log10(v));
      }
    }
  }
  if (!std::isfinite(ymin)) ymin = -1, ymax = 0;
  ymin = std::floor(ymin);
  ymax = std::max(std::ceil(ymax), ymin + 1);
  auto px = [&](double x) { return kPad + (kW - 2 * kPad) * x / xmax; };
  auto py = [&](double ly) {
    return kH - kPad - (kH - 2 * kPad) * (ly - ymin) / (ymax - ymin);
  };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\""
      << kW - kPad << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad
      << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
  for (double e = ymin; e <= ymax; e += 1)
    out << "<text x=\"" << kPad - 5 << "\" y=\"" << py(e) + 4
        << "\" font-size=\"10\" text-anchor=\"end\">1e" << e << "</text>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">TotalCom bits (max "
      << format_double(xmax) << ")</text>\n";
  std::map<std::string, std::size_t> color_of;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto color =
        kColors[color_of.emplace(traces[i].label, color_of.size()).first->second % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-opacity=\"0.6\" points=\"";
    for (std::size_t j = 0; j < traces[i].records.size(); ++j) {
      const double v = series[i][j];
      if (!(v > 0) || !std::isfinite(v)) continue;
      out << px(traces[i].records[j].total_bits_cum) << ',' << py(std::log10(v))
          << ' ';
    }
    out << "\"/>\n";
  }
  std::size_t row = 0;
  for (const auto& [label, idx] : color_of)
    out << "<text x=\"" << kW - kPad << "\" y=\"" << kPad + 14 * row++
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << kColors[idx % 6]
        << "\">" << (label.empty() ? "run" : label) << "</text>\n";
  out << "</svg>\n";
}

std::vector<std::filesystem::path> emit(const std::vector<RunTrace>& traces,
                                        OutputFormat format,
                                        const std::filesystem::path& dir,
                                        const std::string& stem,
                                        StopMetric metric) {
  if (traces.empty()) throw ContractViolation("emit: no traces");
  std::filesystem::create_directories(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
  };
  std::vector<std::filesystem::path> written;
  if (format == OutputFormat::csv) {
    const auto main = dir / (stem + ".csv");
    const auto summary = dir / (stem + "_summary.csv");
    {
      auto f = open(main);
      write_csv(f, traces);
      if (!f) throw std::runtime_error("write failed: " + main.string());
    }
    {
      auto f = open(summary);
      write_summary_csv(f, traces, metric);
      if (!f) throw std::runtime_error("write failed: " + summary.string());
    }
    written = {main, summary};
  } else {
    const auto svg = dir / (stem + ".svg");
    auto f = open(svg);
    write_svg(f, traces, metric);
    if (!f) throw std::runtime_error("write failed: " + svg.string());
    written = {svg};
  }
  return written;
}

}  // namespace bicolor
