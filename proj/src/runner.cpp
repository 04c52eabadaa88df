#include "qkr/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qkr/classical.hpp"
#include "qkr/io.hpp"
#include "qkr/oracle.hpp"

namespace qkr {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

int resolve_workers(const RunnerOptions& opts) {
  if (opts.workers > 0) return opts.workers;
  if (const char* env = std::getenv("QKR_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// ---------------------------------------------------------------------------
// task pool
// ---------------------------------------------------------------------------

struct TaskBudget {
  std::uint64_t limit = ~std::uint64_t{0};
  std::atomic<std::uint64_t> used{0};
  bool take() {
    std::uint64_t cur = used.load();
    while (cur < limit) {
      if (used.compare_exchange_weak(cur, cur + 1)) return true;
    }
    return false;
  }
};

// Runs tasks over `workers` threads; every task writes to its own files, so
// scheduling order cannot affect outputs. Returns the number executed.
int run_task_list(const std::vector<std::function<void()>>& tasks, int workers,
                  TaskBudget& budget, bool& exhausted) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> executed{0};
  std::atomic<bool> out_of_budget{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      if (first_error) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      if (!budget.take()) {
        out_of_budget = true;
        return;
      }
      try {
        tasks[i]();
        executed.fetch_add(1);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::min<int>(workers, static_cast<int>(tasks.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  if (out_of_budget) exhausted = true;
  return executed.load();
}

// ---------------------------------------------------------------------------
// shared evolution helpers
// ---------------------------------------------------------------------------

// Documented seed contract: the noise stream of (parameter point, realization)
// is CounterRng::derive_key(master_seed, param_index * 2^20 + realization).
std::uint64_t stream_id_for(std::size_t param_index, long realization) {
  return (static_cast<std::uint64_t>(param_index) << 20) +
         static_cast<std::uint64_t>(realization);
}

NoiseModel noise_for(const ExperimentConfig& cfg, const ParamPoint& point,
                     long realization) {
  return NoiseModel(point.epsilon, cfg.master_seed,
                    stream_id_for(point.index, realization), cfg.tilt_3d);
}

// Step the state, invoking cb at each sample time (samples sorted, may start
// at 0). cb returning false stops the evolution early.
void evolve_sampled(QuantumState& state, const RotatorParams& params, NoiseModel& noise,
                    const std::vector<std::int64_t>& samples,
                    const std::function<bool(std::int64_t, const QuantumState&)>& cb) {
  std::size_t si = 0;
  if (si < samples.size() && samples[si] == 0) {
    if (!cb(0, state)) return;
    ++si;
  }
  for (std::int64_t t = 1; si < samples.size(); ++t) {
    step(state, params, noise);
    if (t == samples[si]) {
      if (!cb(t, state)) return;
      ++si;
    }
  }
}

std::vector<std::int64_t> samples_up_to(const Cadence& cadence, std::int64_t horizon) {
  return cadence.sample_times(horizon);
}

io::SeriesMeta meta_for(const ParamPoint& p, long realization) {
  io::SeriesMeta m;
  m.n_q = p.params.n_q;
  m.k = p.params.k;
  m.T = p.params.T;
  m.epsilon = p.epsilon;
  m.realization = realization;
  return m;
}

// ---------------------------------------------------------------------------
// horizons (pinned constants from the scaling laws, generous margins)
// ---------------------------------------------------------------------------

std::int64_t tq_noisy_horizon(const ParamPoint& p, std::int64_t t_max) {
  const double k4 = std::pow(p.params.k, 4.0);
  const double expected = 0.23 * k4 /
                          (p.epsilon * p.epsilon * p.params.n_q *
                           std::pow(4.0, p.params.n_q));
  const double h = std::ceil(6.0 * expected) + 50.0;
  return std::min<std::int64_t>(t_max, static_cast<std::int64_t>(h));
}

std::int64_t tq_plateau_horizon(const RotatorParams& params) {
  // localization time ~ l ~ k^2/4; saturate well past it
  return std::max<std::int64_t>(600, static_cast<std::int64_t>(2.0 * params.k * params.k));
}

std::int64_t tf_horizon(const ParamPoint& p, std::int64_t t_max) {
  const double expected =
      0.35 / (p.epsilon * p.epsilon * p.params.n_q * p.params.n_q);
  return std::min<std::int64_t>(t_max,
                                static_cast<std::int64_t>(std::ceil(4.0 * expected) + 20.0));
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

struct Stats {
  double mean = 0.0;
  double stderr_ = 0.0;
  int count = 0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  s.count = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  if (xs.size() > 1) {
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    var /= static_cast<double>(xs.size() - 1);
    s.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return s;
}

// Mean/stderr per (observable, t) across all realization files of a point.
void write_aggregate(const fs::path& point_dir, int realizations) {
  std::map<std::pair<std::string, std::int64_t>, std::vector<double>> cells;
  for (int r = 0; r < realizations; ++r) {
    const fs::path f = point_dir / ("realization-" + std::to_string(r) + ".csv");
    if (!fs::exists(f)) continue;
    for (const auto& [ts, meta] : io::read_series_csv(f)) {
      (void)meta;
      for (std::size_t i = 0; i < ts.size(); ++i)
        cells[{ts.observable, ts.times[i]}].push_back(ts.values[i]);
    }
  }
  std::ostringstream out;
  out << "observable,t,mean,stderr,count\n";
  for (const auto& [key, values] : cells) {
    const Stats s = stats_of(values);
    out << key.first << ',' << key.second << ',' << io::format_double(s.mean) << ','
        << io::format_double(s.stderr_) << ',' << s.count << '\n';
  }
  io::atomic_write(point_dir / "aggregate.csv", out.str());
}

// ---------------------------------------------------------------------------
// manifest
// ---------------------------------------------------------------------------

void write_manifest(const ExperimentConfig& cfg, const std::vector<ParamPoint>& points,
                    const fs::path& exp_dir, const json& extra) {
  json j;
  j["version"] = kVersionTag;
  j["config"] = json::parse(cfg.to_json());
  // manifests are location-independent: paths are relative to the manifest
  j["config"]["output_dir"] = ".";
  j["seed_contract"] =
      "noise stream of (point, realization r) = CounterRng::derive_key(master_seed, "
      "(point_index << 20) + r)";
  j["points"] = json::array();
  for (const auto& p : points) {
    json pj;
    pj["index"] = p.index;
    pj["slug"] = p.slug();
    pj["n_q"] = p.params.n_q;
    pj["N"] = p.params.dim();
    pj["k"] = p.params.k;
    pj["T"] = p.params.T;
    pj["K"] = p.params.K();
    pj["n_bar"] = p.params.n_bar;
    pj["n0"] = p.params.n0;
    pj["epsilon"] = p.epsilon;
    json seeds = json::array();
    for (int r = 0; r < cfg.realizations; ++r)
      seeds.push_back(CounterRng::derive_key(cfg.master_seed, stream_id_for(p.index, r)));
    pj["realization_stream_keys"] = seeds;
    j["points"].push_back(pj);
  }
  if (!extra.is_null()) j["resolved"] = extra;
  io::atomic_write(exp_dir / "manifest.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// per-kind execution
// ---------------------------------------------------------------------------

struct Execution {
  const ExperimentConfig& cfg;
  fs::path exp_dir;
  int workers;
  TaskBudget budget;
  int tasks_run = 0;
  int tasks_skipped = 0;
  bool exhausted = false;

  explicit Execution(const ExperimentConfig& c, fs::path dir, int w)
      : cfg(c), exp_dir(std::move(dir)), workers(w) {}

  fs::path point_dir(const ParamPoint& p) const { return exp_dir / p.slug(); }
  fs::path realization_file(const ParamPoint& p, long r) const {
    return point_dir(p) / ("realization-" + std::to_string(r) + ".csv");
  }

  // Run the pending subset of (point, realization) tasks in `make_task`'s
  // order; returns false if the budget ran out first.
  void run_pending(const std::vector<std::pair<const ParamPoint*, long>>& pending,
                   const std::function<void(const ParamPoint&, long)>& body) {
    std::vector<std::function<void()>> tasks;
    tasks.reserve(pending.size());
    for (const auto& [point, r] : pending) {
      const ParamPoint* p = point;
      const long real = r;
      tasks.push_back([p, real, &body] { body(*p, real); });
    }
    tasks_run += run_task_list(tasks, workers, budget, exhausted);
  }

  std::vector<std::pair<const ParamPoint*, long>> pending_of(
      const std::vector<const ParamPoint*>& pts) {
    std::vector<std::pair<const ParamPoint*, long>> pending;
    for (const ParamPoint* p : pts)
      for (long r = 0; r < cfg.realizations; ++r) {
        if (fs::exists(realization_file(*p, r)))
          ++tasks_skipped;
        else
          pending.push_back({p, r});
      }
    return pending;
  }
};

// Group points by shared exact arm (same params, different epsilon).
std::vector<std::vector<const ParamPoint*>> group_points(
    const std::vector<ParamPoint>& points) {
  std::vector<std::vector<const ParamPoint*>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& p : points) {
    const std::string key = p.group_slug();
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, groups.size());
      groups.push_back({&p});
    } else {
      groups[it->second].push_back(&p);
    }
  }
  return groups;
}

// ---------------- evolve ----------------

void run_evolve(Execution& ex, const std::vector<ParamPoint>& points) {
  std::vector<std::pair<const ParamPoint*, long>> pending;
  for (const auto& p : points)
    for (long r = 0; r < (p.epsilon > 0.0 ? ex.cfg.realizations : 1); ++r) {
      if (fs::exists(ex.realization_file(p, r)))
        ++ex.tasks_skipped;
      else
        pending.push_back({&p, r});
    }

  const auto samples = samples_up_to(ex.cfg.cadence, ex.cfg.t_max);
  auto body = [&](const ParamPoint& p, long r) {
    auto state = prepare_momentum_state(p.params.n_q, p.params.n0);
    auto noise = noise_for(ex.cfg, p, r);
    TimeSeries m2, norm;
    m2.observable = "m2";
    norm.observable = "norm";
    const double n0 = static_cast<double>(p.params.n0);
    evolve_sampled(state, p.params, noise, samples,
                   [&](std::int64_t t, const QuantumState& s) {
                     m2.push(t, second_moment(s, n0));
                     norm.push(t, s.norm());
                     return true;
                   });
    io::write_series_csv(ex.realization_file(p, r),
                         {{m2, meta_for(p, r)}, {norm, meta_for(p, r)}});
    if (ex.cfg.dump_state) {
      std::ostringstream out;
      out << "# index re im\n";
      for (std::size_t i = 0; i < state.dim(); ++i)
        out << i << ' ' << io::format_double(state[i].real()) << ' '
            << io::format_double(state[i].imag()) << '\n';
      io::atomic_write(ex.point_dir(p) / ("state-" + std::to_string(r) + ".txt"),
                       out.str());
    }
  };
  ex.run_pending(pending, body);
  if (ex.exhausted) return;

  std::ostringstream summary;
  summary << "n_q,k,T,K,epsilon,n0,realizations,m2_tail_mean,m2_tail_slope\n";
  for (const auto& p : points) {
    const int reals = p.epsilon > 0.0 ? ex.cfg.realizations : 1;
    write_aggregate(ex.point_dir(p), reals);
    // tail statistics over t >= t_max/2, averaged across realizations
    std::vector<double> tail_means, tail_slopes;
    for (int r = 0; r < reals; ++r) {
      for (const auto& [ts, meta] : io::read_series_csv(ex.realization_file(p, r))) {
        (void)meta;
        if (ts.observable != "m2") continue;
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < ts.size(); ++i)
          if (ts.times[i] >= ex.cfg.t_max / 2) {
            xs.push_back(static_cast<double>(ts.times[i]));
            ys.push_back(ts.values[i]);
          }
        if (xs.size() >= 2) {
          const auto fit = linear_fit(xs, ys);
          tail_slopes.push_back(fit.slope);
          double mean = 0.0;
          for (double y : ys) mean += y;
          tail_means.push_back(mean / ys.size());
        }
      }
    }
    summary << p.params.n_q << ',' << io::format_double(p.params.k) << ','
            << io::format_double(p.params.T) << ',' << io::format_double(p.params.K())
            << ',' << io::format_double(p.epsilon) << ',' << p.params.n0 << ',' << reals
            << ',' << io::format_double(stats_of(tail_means).mean) << ','
            << io::format_double(stats_of(tail_slopes).mean) << '\n';
  }
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

// ---------------- sweep_tq ----------------

void run_sweep_tq(Execution& ex, const std::vector<ParamPoint>& points) {
  const auto groups = group_points(points);
  for (const auto& group : groups) {
    const ParamPoint& lead = *group.front();
    auto pending = ex.pending_of(group);
    const fs::path exact_file = ex.exp_dir / (lead.group_slug() + "_exact") / "exact.csv";
    if (pending.empty() && fs::exists(exact_file)) continue;
    if (ex.budget.used.load() >= ex.budget.limit) {
      ex.exhausted = true;
      return;
    }

    // Shared exact arm: second moment to saturation.
    TimeSeries exact_m2;
    if (fs::exists(exact_file)) {
      for (auto& [ts, meta] : io::read_series_csv(exact_file)) {
        (void)meta;
        if (ts.observable == "m2") exact_m2 = std::move(ts);
      }
    } else {
      exact_m2.observable = "m2";
      auto state = prepare_momentum_state(lead.params.n_q, lead.params.n0);
      NoiseModel exact;
      const auto samples =
          samples_up_to(ex.cfg.cadence, tq_plateau_horizon(lead.params));
      const double n0 = static_cast<double>(lead.params.n0);
      evolve_sampled(state, lead.params, exact, samples,
                     [&](std::int64_t t, const QuantumState& s) {
                       exact_m2.push(t, second_moment(s, n0));
                       return true;
                     });
      io::SeriesMeta meta = meta_for(lead, -1);
      meta.epsilon = 0.0;
      io::write_series_csv(exact_file, {{exact_m2, meta}});
    }
    double plateau = 0.0;
    {
      std::size_t n = 0;
      for (std::size_t i = exact_m2.size() / 2; i < exact_m2.size(); ++i, ++n)
        plateau += exact_m2.values[i];
      plateau /= static_cast<double>(n);
    }

    auto body = [&, plateau](const ParamPoint& p, long r) {
      auto state = prepare_momentum_state(p.params.n_q, p.params.n0);
      auto noise = noise_for(ex.cfg, p, r);
      const auto samples = samples_up_to(ex.cfg.cadence, tq_noisy_horizon(p, ex.cfg.t_max));
      TimeSeries m2;
      m2.observable = "m2";
      const double n0 = static_cast<double>(p.params.n0);
      const double stop_level = 2.2 * plateau;  // just past the doubling level
      evolve_sampled(state, p.params, noise, samples,
                     [&](std::int64_t t, const QuantumState& s) {
                       const double v = second_moment(s, n0);
                       m2.push(t, v);
                       return v < stop_level;
                     });
      io::write_series_csv(ex.realization_file(p, r), {{m2, meta_for(p, r)}});
    };
    ex.run_pending(pending, body);
    if (ex.exhausted) return;
  }

  // summary: per point, mean doubling time and rescaled constant
  std::ostringstream summary;
  summary << "n_q,k,T,K,epsilon,n0,realizations,plateau,t_q_mean,t_q_stderr,"
             "not_reached,C_q\n";
  for (const auto& p : points) {
    const fs::path exact_file = ex.exp_dir / (p.group_slug() + "_exact") / "exact.csv";
    TimeSeries exact_m2;
    for (auto& [ts, meta] : io::read_series_csv(exact_file)) {
      (void)meta;
      if (ts.observable == "m2") exact_m2 = std::move(ts);
    }
    double plateau = 0.0;
    std::size_t n = 0;
    for (std::size_t i = exact_m2.size() / 2; i < exact_m2.size(); ++i, ++n)
      plateau += exact_m2.values[i];
    plateau /= static_cast<double>(n);

    std::vector<double> tqs;
    int not_reached = 0;
    for (int r = 0; r < ex.cfg.realizations; ++r) {
      for (const auto& [ts, meta] : io::read_series_csv(ex.realization_file(p, r))) {
        (void)meta;
        if (ts.observable != "m2") continue;
        const auto tq = extract_doubling_time(exact_m2, ts);
        if (tq)
          tqs.push_back(*tq);
        else
          ++not_reached;
      }
    }
    const Stats s = stats_of(tqs);
    const double k4 = std::pow(p.params.k, 4.0);
    const double cq = s.mean * p.epsilon * p.epsilon * p.params.n_q *
                      std::pow(4.0, p.params.n_q) / k4;
    write_aggregate(ex.point_dir(p), ex.cfg.realizations);
    summary << p.params.n_q << ',' << io::format_double(p.params.k) << ','
            << io::format_double(p.params.T) << ',' << io::format_double(p.params.K())
            << ',' << io::format_double(p.epsilon) << ',' << p.params.n0 << ','
            << ex.cfg.realizations << ',' << io::format_double(plateau) << ','
            << io::format_double(s.mean) << ',' << io::format_double(s.stderr_) << ','
            << not_reached << ',' << io::format_double(cq) << '\n';
  }
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

// ---------------- sweep_tf ----------------

void run_sweep_tf(Execution& ex, const std::vector<ParamPoint>& points) {
  const auto groups = group_points(points);
  for (const auto& group : groups) {
    const ParamPoint& lead = *group.front();
    auto pending = ex.pending_of(group);
    if (pending.empty()) continue;
    if (ex.budget.used.load() >= ex.budget.limit) {
      ex.exhausted = true;
      return;
    }

    std::int64_t arm_horizon = 0;
    for (const ParamPoint* p : group)
      arm_horizon = std::max(arm_horizon, tf_horizon(*p, ex.cfg.t_max));
    const auto arm_samples = samples_up_to(ex.cfg.cadence, arm_horizon);

    // Exact arm states at sample times, shared by every realization task.
    std::vector<QuantumState> arm_states;
    arm_states.reserve(arm_samples.size());
    {
      auto state = prepare_momentum_state(lead.params.n_q, lead.params.n0);
      NoiseModel exact;
      evolve_sampled(state, lead.params, exact, arm_samples,
                     [&](std::int64_t, const QuantumState& s) {
                       arm_states.push_back(s);
                       return true;
                     });
    }

    auto body = [&](const ParamPoint& p, long r) {
      auto state = prepare_momentum_state(p.params.n_q, p.params.n0);
      auto noise = noise_for(ex.cfg, p, r);
      const std::int64_t horizon = tf_horizon(p, ex.cfg.t_max);
      TimeSeries f;
      f.observable = "fidelity";
      std::size_t si = 0;
      evolve_sampled(state, p.params, noise, arm_samples,
                     [&](std::int64_t t, const QuantumState& s) {
                       const double v = fidelity(arm_states[si], s);
                       ++si;
                       if (t > horizon) return false;
                       f.push(t, v);
                       return v > 0.3;  // past the 0.5 crossing
                     });
      io::write_series_csv(ex.realization_file(p, r), {{f, meta_for(p, r)}});
    };
    ex.run_pending(pending, body);
    if (ex.exhausted) return;
  }

  std::ostringstream summary;
  summary << "n_q,k,T,K,epsilon,n0,realizations,t_f_mean,t_f_stderr,not_reached,C_f\n";
  for (const auto& p : points) {
    std::vector<double> tfs;
    int not_reached = 0;
    for (int r = 0; r < ex.cfg.realizations; ++r) {
      for (const auto& [ts, meta] : io::read_series_csv(ex.realization_file(p, r))) {
        (void)meta;
        if (ts.observable != "fidelity") continue;
        const auto tf = extract_fidelity_time(ts);
        if (tf)
          tfs.push_back(*tf);
        else
          ++not_reached;
      }
    }
    const Stats s = stats_of(tfs);
    const double cf = s.mean * p.epsilon * p.epsilon * p.params.n_q * p.params.n_q;
    write_aggregate(ex.point_dir(p), ex.cfg.realizations);
    summary << p.params.n_q << ',' << io::format_double(p.params.k) << ','
            << io::format_double(p.params.T) << ',' << io::format_double(p.params.K())
            << ',' << io::format_double(p.epsilon) << ',' << p.params.n0 << ','
            << ex.cfg.realizations << ',' << io::format_double(s.mean) << ','
            << io::format_double(s.stderr_) << ',' << not_reached << ','
            << io::format_double(cf) << '\n';
  }
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

// ---------------- sweep_tw ----------------

void run_sweep_tw(Execution& ex, const std::vector<ParamPoint>& points) {
  const auto groups = group_points(points);
  for (const auto& group : groups) {
    const ParamPoint& lead = *group.front();
    auto pending = ex.pending_of(group);
    if (pending.empty()) continue;
    if (ex.budget.used.load() >= ex.budget.limit) {
      ex.exhausted = true;
      return;
    }

    // delta W is 0/0 at t = 0 (identical states, and a bare momentum delta
    // can fall entirely between sampled lattice points), so sampling starts
    // at the first kick.
    auto samples = samples_up_to(ex.cfg.cadence, ex.cfg.t_max);
    if (!samples.empty() && samples.front() == 0)
      samples.erase(samples.begin());
    const std::size_t n_samples_per_zone = 2 * lead.params.dim();

    // Zone sample points are a function of (zone, N) only, so exact and noisy
    // arms see identical lattice points.
    std::vector<std::vector<LatticePoint>> zone_points;
    for (const auto& zone : ex.cfg.zones)
      zone_points.push_back(sample_zone_points(
          zone, lead.params, n_samples_per_zone, io::fnv1a(zone.name) ^ lead.params.dim()));

    // Exact arm: Wigner values at the sampled lattice points for every
    // sample time.  [zone][sample] -> values
    std::vector<std::vector<std::vector<double>>> arm_values(ex.cfg.zones.size());
    {
      auto state = prepare_momentum_state(lead.params.n_q, lead.params.n0);
      NoiseModel exact;
      evolve_sampled(state, lead.params, exact, samples,
                     [&](std::int64_t, const QuantumState& s) {
                       for (std::size_t z = 0; z < zone_points.size(); ++z)
                         arm_values[z].push_back(wigner_values_at(s, zone_points[z]));
                       return true;
                     });
    }

    auto body = [&](const ParamPoint& p, long r) {
      auto state = prepare_momentum_state(p.params.n_q, p.params.n0);
      auto noise = noise_for(ex.cfg, p, r);
      std::vector<TimeSeries> dw(ex.cfg.zones.size());
      std::vector<bool> crossed(ex.cfg.zones.size(), false);
      for (std::size_t z = 0; z < dw.size(); ++z)
        dw[z].observable = "dW_" + ex.cfg.zones[z].name;
      std::size_t si = 0;
      evolve_sampled(state, p.params, noise, samples,
                     [&](std::int64_t t, const QuantumState& s) {
                       bool all_crossed = true;
                       for (std::size_t z = 0; z < zone_points.size(); ++z) {
                         const auto noisy_vals = wigner_values_at(s, zone_points[z]);
                         const double v = wigner_error_values(arm_values[z][si], noisy_vals);
                         dw[z].push(t, v);
                         if (v >= 0.8) crossed[z] = true;  // safely past 0.5
                         all_crossed = all_crossed && crossed[z];
                       }
                       ++si;
                       return !all_crossed;
                     });
      std::vector<std::pair<TimeSeries, io::SeriesMeta>> out;
      for (auto& ts : dw) out.push_back({std::move(ts), meta_for(p, r)});
      io::write_series_csv(ex.realization_file(p, r), out);
    };
    ex.run_pending(pending, body);
    if (ex.exhausted) return;
  }

  std::ostringstream summary;
  summary << "n_q,k,T,K,epsilon,n0,realizations,zone,t_w_mean,t_w_stderr,not_reached\n";
  for (const auto& p : points) {
    write_aggregate(ex.point_dir(p), ex.cfg.realizations);
    for (const auto& zone : ex.cfg.zones) {
      std::vector<double> tws;
      int not_reached = 0;
      for (int r = 0; r < ex.cfg.realizations; ++r) {
        for (const auto& [ts, meta] : io::read_series_csv(ex.realization_file(p, r))) {
          (void)meta;
          if (ts.observable != "dW_" + zone.name) continue;
          const auto tw = extract_wigner_time(ts);
          if (tw)
            tws.push_back(*tw);
          else
            ++not_reached;
        }
      }
      const Stats s = stats_of(tws);
      summary << p.params.n_q << ',' << io::format_double(p.params.k) << ','
              << io::format_double(p.params.T) << ',' << io::format_double(p.params.K())
              << ',' << io::format_double(p.epsilon) << ',' << p.params.n0 << ','
              << ex.cfg.realizations << ',' << zone.name << ','
              << io::format_double(s.mean) << ',' << io::format_double(s.stderr_) << ','
              << not_reached << '\n';
    }
  }
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

// ---------------- maps ----------------

void run_maps(Execution& ex, const std::vector<ParamPoint>& points, bool wigner_map) {
  std::vector<std::pair<const ParamPoint*, long>> pending;
  for (const auto& p : points)
    for (long r = 0; r < (p.epsilon > 0.0 ? ex.cfg.realizations : 1); ++r) {
      const fs::path f =
          ex.point_dir(p) / ((wigner_map ? "wigner-" : "husimi-") + std::to_string(r) +
                             std::string(".txt"));
      if (fs::exists(f))
        ++ex.tasks_skipped;
      else
        pending.push_back({&p, r});
    }

  auto body = [&](const ParamPoint& p, long r) {
    if (wigner_map && p.params.n_q > 12)
      throw std::invalid_argument("wigner_map limited to n_q <= 12");
    auto state = prepare_momentum_state(p.params.n_q, p.params.n0);
    auto noise = noise_for(ex.cfg, p, r);
    for (std::int64_t t = 0; t < ex.cfg.t_max - ex.cfg.avg_window + 1; ++t)
      step(state, p.params, noise);
    // average the density over avg_window consecutive kicks ending at t_max
    std::vector<double> acc;
    WignerGrid wrep;
    HusimiGrid hrep;
    for (int w = 0; w < ex.cfg.avg_window; ++w) {
      if (w > 0) step(state, p.params, noise);
      if (wigner_map) {
        wrep = wigner(state);
        if (acc.empty()) acc.assign(wrep.values.size(), 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += wrep.values[i];
      } else {
        hrep = husimi(state, p.params, ex.cfg.husimi_grid);
        if (acc.empty()) acc.assign(hrep.values.size(), 0.0);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += hrep.values[i];
      }
    }
    for (auto& v : acc) v /= ex.cfg.avg_window;
    const fs::path f =
        ex.point_dir(p) / ((wigner_map ? "wigner-" : "husimi-") + std::to_string(r) +
                           std::string(".txt"));
    if (wigner_map) {
      wrep.values = std::move(acc);
      io::write_wigner_grid(f, wrep);
    } else {
      hrep.values = std::move(acc);
      io::write_husimi_grid(f, hrep);
    }
  };
  ex.run_pending(pending, body);
  if (ex.exhausted) return;

  std::ostringstream summary;
  summary << "n_q,k,T,K,epsilon,n0,file_count\n";
  for (const auto& p : points) {
    const int reals = p.epsilon > 0.0 ? ex.cfg.realizations : 1;
    summary << p.params.n_q << ',' << io::format_double(p.params.k) << ','
            << io::format_double(p.params.T) << ',' << io::format_double(p.params.K())
            << ',' << io::format_double(p.epsilon) << ',' << p.params.n0 << ',' << reals
            << '\n';
  }
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

// ---------------- tunneling ----------------

PhaseSpaceDomain resolve_domain(const ExperimentConfig& cfg, double K) {
  if (!cfg.domain_auto) return cfg.domain;
  const auto island = locate_main_island(K);
  PhaseSpaceDomain d;
  d.shape = PhaseSpaceDomain::Shape::Circle;
  d.center_theta = island.theta_center;
  d.center_p = island.p_center;
  d.radius = 0.5 * island.inscribed_radius();
  return d;
}

void run_tunneling(Execution& ex, const std::vector<ParamPoint>& points,
                   const PhaseSpaceDomain& domain) {
  std::vector<std::pair<const ParamPoint*, long>> pending;
  for (const auto& p : points)
    for (long r = 0; r < (p.epsilon > 0.0 ? ex.cfg.realizations : 1); ++r) {
      if (fs::exists(ex.realization_file(p, r)))
        ++ex.tasks_skipped;
      else
        pending.push_back({&p, r});
    }

  auto body = [&](const ParamPoint& p, long r) {
    auto state = prepare_momentum_state(p.params.n_q, p.params.n0);
    auto noise = noise_for(ex.cfg, p, r);
    const std::int64_t window_start = ex.cfg.t_max - ex.cfg.avg_window + 1;
    // cadence samples before the averaging window, then every kick inside it
    std::set<std::int64_t> sample_set;
    for (std::int64_t t : samples_up_to(ex.cfg.cadence, ex.cfg.t_max))
      if (t < window_start) sample_set.insert(t);
    for (std::int64_t t = window_start; t <= ex.cfg.t_max; ++t) sample_set.insert(t);
    const std::vector<std::int64_t> samples(sample_set.begin(), sample_set.end());

    TimeSeries series;
    series.observable = "I";
    evolve_sampled(state, p.params, noise, samples,
                   [&](std::int64_t t, const QuantumState& s) {
                     const auto grid = husimi(s, p.params, ex.cfg.husimi_grid);
                     series.push(t, tunneling_probability(grid, domain));
                     return true;
                   });
    io::write_series_csv(ex.realization_file(p, r), {{series, meta_for(p, r)}});
  };
  ex.run_pending(pending, body);
  if (ex.exhausted) return;

  std::ostringstream summary;
  summary << "n_q,k,T,K,epsilon,n0,realizations,I_window_mean,I_window_stderr\n";
  for (const auto& p : points) {
    const int reals = p.epsilon > 0.0 ? ex.cfg.realizations : 1;
    write_aggregate(ex.point_dir(p), reals);
    const std::int64_t window_start = ex.cfg.t_max - ex.cfg.avg_window + 1;
    std::vector<double> means;
    for (int r = 0; r < reals; ++r) {
      for (const auto& [ts, meta] : io::read_series_csv(ex.realization_file(p, r))) {
        (void)meta;
        if (ts.observable != "I") continue;
        double acc = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < ts.size(); ++i)
          if (ts.times[i] >= window_start) {
            acc += ts.values[i];
            ++n;
          }
        if (n) means.push_back(acc / static_cast<double>(n));
      }
    }
    const Stats s = stats_of(means);
    summary << p.params.n_q << ',' << io::format_double(p.params.k) << ','
            << io::format_double(p.params.T) << ',' << io::format_double(p.params.K())
            << ',' << io::format_double(p.epsilon) << ',' << p.params.n0 << ',' << reals
            << ',' << io::format_double(s.mean) << ',' << io::format_double(s.stderr_)
            << '\n';
  }
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

// ---------------- ipr ----------------

void run_ipr(Execution& ex, const std::vector<ParamPoint>& points) {
  std::vector<std::pair<const ParamPoint*, long>> pending;
  for (const auto& p : points)
    for (long r = 0; r < (p.epsilon > 0.0 ? ex.cfg.realizations : 1); ++r) {
      if (fs::exists(ex.realization_file(p, r)))
        ++ex.tasks_skipped;
      else
        pending.push_back({&p, r});
    }

  auto body = [&](const ParamPoint& p, long r) {
    auto state = prepare_momentum_state(p.params.n_q, p.params.n0);
    auto noise = noise_for(ex.cfg, p, r);
    for (std::int64_t t = 0; t < ex.cfg.t_max - ex.cfg.avg_window + 1; ++t)
      step(state, p.params, noise);
    TimeSeries xi;
    xi.observable = "xi";
    for (int w = 0; w < ex.cfg.avg_window; ++w) {
      if (w > 0) step(state, p.params, noise);
      xi.push(ex.cfg.t_max - ex.cfg.avg_window + 1 + w, wigner_ipr(state));
    }
    io::write_series_csv(ex.realization_file(p, r), {{xi, meta_for(p, r)}});
  };
  ex.run_pending(pending, body);
  if (ex.exhausted) return;

  std::ostringstream summary;
  summary << "n_q,k,T,K,epsilon,n0,N,xi_mean,xi_stderr,xi_over_N2,xi_over_N\n";
  for (const auto& p : points) {
    const int reals = p.epsilon > 0.0 ? ex.cfg.realizations : 1;
    write_aggregate(ex.point_dir(p), reals);
    std::vector<double> xis;
    for (int r = 0; r < reals; ++r)
      for (const auto& [ts, meta] : io::read_series_csv(ex.realization_file(p, r))) {
        (void)meta;
        if (ts.observable == "xi")
          for (double v : ts.values) xis.push_back(v);
      }
    const Stats s = stats_of(xis);
    const double n = static_cast<double>(p.params.dim());
    summary << p.params.n_q << ',' << io::format_double(p.params.k) << ','
            << io::format_double(p.params.T) << ',' << io::format_double(p.params.K())
            << ',' << io::format_double(p.epsilon) << ',' << p.params.n0 << ','
            << p.params.dim() << ',' << io::format_double(s.mean) << ','
            << io::format_double(s.stderr_) << ',' << io::format_double(s.mean / (n * n))
            << ',' << io::format_double(s.mean / n) << '\n';
  }
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

// ---------------- classical ----------------

void run_classical_portrait(Execution& ex, const std::vector<ParamPoint>& points) {
  const ParamPoint& p = points.front();
  const fs::path file = ex.exp_dir / "portrait.txt";
  std::optional<double> line_p0;
  if (ex.cfg.portrait_line_ics)
    line_p0 = p.params.T * (static_cast<double>(p.params.n0) - p.params.n_bar);
  // cheap enough to recompute for the summary on resume
  const auto pts = phase_portrait(p.params.K(), ex.cfg.n_points,
                                  static_cast<int>(ex.cfg.t_max), ex.cfg.master_seed,
                                  line_p0);
  if (fs::exists(file)) {
    ++ex.tasks_skipped;
  } else {
    if (!ex.budget.take()) {
      ex.exhausted = true;
      return;
    }
    io::write_portrait(file, pts);
    ++ex.tasks_run;
  }
  std::ostringstream summary;
  summary << "K,n_trajectories,t,occupied_cell_fraction_96\n";
  summary << io::format_double(p.params.K()) << ',' << ex.cfg.n_points << ','
          << ex.cfg.t_max << ',' << io::format_double(occupied_cell_fraction(pts, 96))
          << '\n';
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

void run_classical_density(Execution& ex, const std::vector<ParamPoint>& points) {
  // one density per epsilon; quantum n_q fixes the cell [0, N) and T
  std::vector<std::pair<const ParamPoint*, long>> pending;
  for (const auto& p : points) {
    const fs::path f = ex.point_dir(p) / "density.txt";
    if (fs::exists(f))
      ++ex.tasks_skipped;
    else
      pending.push_back({&p, 0});
  }
  auto body = [&](const ParamPoint& p, long) {
    const std::size_t N = p.params.dim();
    auto rng = CounterRng::stream(ex.cfg.master_seed, stream_id_for(p.index, 0));
    ClassicalEnsemble ens;
    ens.k = p.params.k;
    ens.T = p.params.T;
    ens.noise_epsilon = p.epsilon;
    const double n0 = static_cast<double>(p.params.n0);
    for (int i = 0; i < ex.cfg.n_points; ++i)
      ens.points.push_back(
          {n0, 2.0 * std::numbers::pi * (i + 0.5) / ex.cfg.n_points});
    ens.evolve(static_cast<int>(ex.cfg.t_max) - ex.cfg.avg_window + 1, rng);
    const int grid_n = 256;
    std::vector<double> acc;
    DensityGrid rep;
    for (int w = 0; w < ex.cfg.avg_window; ++w) {
      if (w > 0) ens.evolve(1, rng);
      rep = classical_density(ens, grid_n, grid_n, 0.0, static_cast<double>(N));
      if (acc.empty()) acc.assign(rep.values.size(), 0.0);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += rep.values[i];
    }
    for (auto& v : acc) v /= ex.cfg.avg_window;
    rep.values = std::move(acc);
    io::write_density_grid(ex.point_dir(p) / "density.txt", rep);
  };
  ex.run_pending(pending, body);
  if (ex.exhausted) return;
  std::ostringstream summary;
  summary << "k,T,K,epsilon,n_points,t,avg_window\n";
  for (const auto& p : points)
    summary << io::format_double(p.params.k) << ',' << io::format_double(p.params.T)
            << ',' << io::format_double(p.params.K()) << ','
            << io::format_double(p.epsilon) << ',' << ex.cfg.n_points << ','
            << ex.cfg.t_max << ',' << ex.cfg.avg_window << '\n';
  io::atomic_write(ex.exp_dir / "summary.csv", summary.str());
}

}  // namespace

RunSummary run(const ExperimentConfig& config, const RunnerOptions& opts) {
  config.validate();
  const int workers = resolve_workers(opts);
  config.check_memory(workers);
  const auto points = config.resolve();

  const fs::path exp_dir = config.output_dir / kind_name(config.kind);
  fs::create_directories(exp_dir);

  json resolved = json::object();
  PhaseSpaceDomain domain;
  if (config.kind == ExperimentKind::Tunneling) {
    domain = resolve_domain(config, points.front().params.K());
    resolved["domain"] = {{"shape", domain.shape == PhaseSpaceDomain::Shape::Circle
                                        ? "circle"
                                        : "rectangle"},
                          {"center_theta", domain.center_theta},
                          {"center_p", domain.center_p},
                          {"radius", domain.radius},
                          {"extent_u", domain.extent_u},
                          {"extent_v", domain.extent_v}};
  }
  write_manifest(config, points, exp_dir, resolved);

  Execution ex(config, exp_dir, workers);
  ex.budget.limit = opts.max_tasks;

  const auto t0 = std::chrono::steady_clock::now();
  switch (config.kind) {
    case ExperimentKind::Evolve: run_evolve(ex, points); break;
    case ExperimentKind::SweepTq: run_sweep_tq(ex, points); break;
    case ExperimentKind::SweepTf: run_sweep_tf(ex, points); break;
    case ExperimentKind::SweepTw: run_sweep_tw(ex, points); break;
    case ExperimentKind::WignerMap: run_maps(ex, points, true); break;
    case ExperimentKind::HusimiMap: run_maps(ex, points, false); break;
    case ExperimentKind::Tunneling: run_tunneling(ex, points, domain); break;
    case ExperimentKind::ClassicalPortrait: run_classical_portrait(ex, points); break;
    case ExperimentKind::ClassicalDensity: run_classical_density(ex, points); break;
    case ExperimentKind::Ipr: run_ipr(ex, points); break;
  }
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t0);

  // Wall time lives outside the determinism contract (separate file).
  {
    std::ostringstream t;
    t << "wall_ms=" << elapsed.count() << " tasks_run=" << ex.tasks_run
      << " tasks_skipped=" << ex.tasks_skipped << " workers=" << workers << '\n';
    std::ofstream out(exp_dir / "timing.txt", std::ios::app);
    out << t.str();
  }

  RunSummary summary;
  summary.experiment_dir = exp_dir;
  summary.tasks_run = ex.tasks_run;
  summary.tasks_skipped = ex.tasks_skipped;
  summary.complete = !ex.exhausted;
  return summary;
}

}  // namespace qkr
