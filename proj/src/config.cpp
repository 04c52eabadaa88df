#include "qkr/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qkr/io.hpp"

namespace qkr {

using json = nlohmann::ordered_json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames = {
    {ExperimentKind::Evolve, "evolve"},
    {ExperimentKind::SweepTq, "sweep_tq"},
    {ExperimentKind::SweepTf, "sweep_tf"},
    {ExperimentKind::SweepTw, "sweep_tw"},
    {ExperimentKind::WignerMap, "wigner_map"},
    {ExperimentKind::HusimiMap, "husimi_map"},
    {ExperimentKind::Tunneling, "tunneling"},
    {ExperimentKind::ClassicalPortrait, "classical_portrait"},
    {ExperimentKind::ClassicalDensity, "classical_density"},
    {ExperimentKind::Ipr, "ipr"},
};

}  // namespace

std::string kind_name(ExperimentKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  throw std::logic_error("unknown experiment kind");
}

ExperimentKind kind_from_name(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

std::vector<std::int64_t> Cadence::sample_times(std::int64_t t_max) const {
  if (dense_until < 0 || stride_after < 1)
    throw std::invalid_argument("invalid cadence");
  std::vector<std::int64_t> times{0};
  for (std::int64_t t = 1; t <= t_max; ++t) {
    if (t <= dense_until || (t - dense_until) % stride_after == 0 || t == t_max)
      times.push_back(t);
  }
  return times;
}

double LevelRule::resolve(std::size_t N) const {
  switch (kind) {
    case Kind::One: return 1.0;
    case Kind::HalfN: return static_cast<double>(N / 2);
    case Kind::Explicit: return value;
  }
  throw std::logic_error("bad level rule");
}

std::string ParamPoint::group_slug() const {
  std::ostringstream s;
  s << "nq" << params.n_q << "_K" << io::format_double(params.K()) << "_T"
    << io::format_double(params.T) << "_n0" << params.n0;
  return s.str();
}

std::string ParamPoint::slug() const {
  std::ostringstream s;
  s << group_slug() << "_eps" << io::format_double(epsilon);
  const auto h = io::fnv1a(s.str());
  char buf[12];
  std::snprintf(buf, sizeof(buf), "%08llx", static_cast<unsigned long long>(h & 0xffffffffull));
  return s.str() + "_" + buf;
}

namespace {

LevelRule parse_level_rule(const json& j, const char* what) {
  LevelRule r;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "N/2")
      r.kind = LevelRule::Kind::HalfN;
    else if (s == "1")
      r.kind = LevelRule::Kind::One;
    else
      throw std::invalid_argument(std::string(what) + ": unknown rule '" + s + "'");
  } else if (j.is_number()) {
    const double v = j.get<double>();
    if (v == 1.0) {
      r.kind = LevelRule::Kind::One;
    } else {
      r.kind = LevelRule::Kind::Explicit;
      r.value = v;
    }
  } else {
    throw std::invalid_argument(std::string(what) + ": expected rule string or number");
  }
  return r;
}

json level_rule_json(const LevelRule& r) {
  switch (r.kind) {
    case LevelRule::Kind::One: return json("1");
    case LevelRule::Kind::HalfN: return json("N/2");
    case LevelRule::Kind::Explicit: return json(r.value);
  }
  throw std::logic_error("bad level rule");
}

Zone parse_zone(const json& j) {
  Zone z;
  z.name = j.at("name").get<std::string>();
  if (j.contains("theta")) {
    z.theta_lo = j["theta"].at(0).get<double>();
    z.theta_hi = j["theta"].at(1).get<double>();
  }
  if (j.contains("p")) {
    z.unit = Zone::MomentumUnit::CellRadians;
    z.mom_lo = j["p"].at(0).get<double>();
    z.mom_hi = j["p"].at(1).get<double>();
  } else if (j.contains("levels")) {
    z.unit = Zone::MomentumUnit::LevelAbsolute;
    z.mom_lo = j["levels"].at(0).get<double>();
    z.mom_hi = j["levels"].at(1).get<double>();
  } else {
    throw std::invalid_argument("zone '" + z.name + "' needs a p or levels range");
  }
  return z;
}

json zone_json(const Zone& z) {
  json j;
  j["name"] = z.name;
  j["theta"] = {z.theta_lo, z.theta_hi};
  if (z.unit == Zone::MomentumUnit::CellRadians)
    j["p"] = {z.mom_lo, z.mom_hi};
  else
    j["levels"] = {z.mom_lo, z.mom_hi};
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_string(ss.str());
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  c.kind = kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("n_q")) c.n_q_list = j["n_q"].get<std::vector<int>>();
  if (j.contains("K") && j.contains("k"))
    throw std::invalid_argument("give K or k, not both");
  if (j.contains("K")) c.K_list = j["K"].get<std::vector<double>>();
  if (j.contains("k")) c.k_list = j["k"].get<std::vector<double>>();
  if (c.K_list.empty() && c.k_list.empty()) c.K_list = {5.0};
  if (j.contains("T")) {
    if (j["T"].is_string()) {
      const std::string t = j["T"].get<std::string>();
      if (t != "2pi/N") throw std::invalid_argument("unknown T rule: " + t);
      c.T_resonance = true;
    } else {
      c.T_fixed = j["T"].get<double>();
    }
  }
  if (j.contains("epsilon")) c.epsilon_list = j["epsilon"].get<std::vector<double>>();
  if (j.contains("n0")) c.n0_rule = parse_level_rule(j["n0"], "n0");
  if (j.contains("n_bar")) c.n_bar_rule = parse_level_rule(j["n_bar"], "n_bar");
  if (j.contains("t_max")) c.t_max = j["t_max"].get<std::int64_t>();
  if (j.contains("cadence")) {
    c.cadence.dense_until = j["cadence"].value("dense_until", c.cadence.dense_until);
    c.cadence.stride_after = j["cadence"].value("stride_after", c.cadence.stride_after);
  }
  if (j.contains("realizations")) c.realizations = j["realizations"].get<int>();
  if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("tilt_3d")) c.tilt_3d = j["tilt_3d"].get<bool>();
  if (j.contains("zones"))
    for (const auto& zj : j["zones"]) c.zones.push_back(parse_zone(zj));
  if (j.contains("domain")) {
    const auto& dj = j["domain"];
    c.domain_auto = false;
    c.domain.shape = dj.value("shape", std::string("circle")) == "rectangle"
                         ? PhaseSpaceDomain::Shape::Rectangle
                         : PhaseSpaceDomain::Shape::Circle;
    c.domain.center_theta = dj.value("center_theta", std::numbers::pi);
    c.domain.center_p = dj.value("center_p", 0.0);
    if (dj.contains("radius")) {
      if (dj["radius"].is_string() && dj["radius"].get<std::string>() == "auto")
        c.domain_auto = true;
      else
        c.domain.radius = dj["radius"].get<double>();
    }
    c.domain.extent_u = dj.value("extent_u", 0.0);
    c.domain.extent_v = dj.value("extent_v", 0.0);
  }
  if (j.contains("husimi_grid")) {
    c.husimi_grid.n_theta = j["husimi_grid"].value("n_theta", 0);
    c.husimi_grid.n_momentum = j["husimi_grid"].value("n_momentum", 0);
  }
  if (j.contains("avg_window")) c.avg_window = j["avg_window"].get<int>();
  if (j.contains("n_points")) c.n_points = j["n_points"].get<int>();
  if (j.contains("portrait_line_ics"))
    c.portrait_line_ics = j["portrait_line_ics"].get<bool>();
  if (j.contains("dump_state")) c.dump_state = j["dump_state"].get<bool>();
  if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("memory_budget_mb"))
    c.memory_budget_mb = j["memory_budget_mb"].get<double>();
  c.validate();
  return c;
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["kind"] = kind_name(kind);
  j["n_q"] = n_q_list;
  if (!k_list.empty())
    j["k"] = k_list;
  else
    j["K"] = K_list;
  if (T_resonance)
    j["T"] = "2pi/N";
  else
    j["T"] = T_fixed;
  j["epsilon"] = epsilon_list;
  j["n0"] = level_rule_json(n0_rule);
  j["n_bar"] = level_rule_json(n_bar_rule);
  j["t_max"] = t_max;
  j["cadence"] = {{"dense_until", cadence.dense_until}, {"stride_after", cadence.stride_after}};
  j["realizations"] = realizations;
  j["master_seed"] = master_seed;
  j["tilt_3d"] = tilt_3d;
  j["zones"] = json::array();
  for (const auto& z : zones) j["zones"].push_back(zone_json(z));
  j["domain"] = {
      {"shape", domain.shape == PhaseSpaceDomain::Shape::Circle ? "circle" : "rectangle"},
      {"center_theta", domain.center_theta},
      {"center_p", domain.center_p},
      {"radius", domain_auto ? json("auto") : json(domain.radius)},
      {"extent_u", domain.extent_u},
      {"extent_v", domain.extent_v}};
  j["husimi_grid"] = {{"n_theta", husimi_grid.n_theta},
                      {"n_momentum", husimi_grid.n_momentum}};
  j["avg_window"] = avg_window;
  j["n_points"] = n_points;
  j["portrait_line_ics"] = portrait_line_ics;
  j["dump_state"] = dump_state;
  j["output_dir"] = output_dir.string();
  j["memory_budget_mb"] = memory_budget_mb;
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  if (n_q_list.empty()) throw std::invalid_argument("n_q list is empty");
  for (int n_q : n_q_list)
    if (n_q < 1 || n_q > 26) throw std::invalid_argument("n_q out of range [1,26]");
  if (K_list.empty() == k_list.empty())
    throw std::invalid_argument("exactly one of K/k must be given");
  if (!T_resonance && !(T_fixed > 0.0)) throw std::invalid_argument("T must be positive");
  if (epsilon_list.empty()) throw std::invalid_argument("epsilon list is empty");
  for (double e : epsilon_list)
    if (e < 0.0) throw std::invalid_argument("epsilon must be >= 0");
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (avg_window < 1) throw std::invalid_argument("avg_window must be >= 1");
  if (n_points < 1) throw std::invalid_argument("n_points must be >= 1");
  if (cadence.dense_until < 0 || cadence.stride_after < 1)
    throw std::invalid_argument("invalid cadence");
  if (avg_window > t_max) throw std::invalid_argument("avg_window exceeds t_max");
  if (kind == ExperimentKind::SweepTw && zones.empty())
    throw std::invalid_argument("sweep_tw needs at least one zone");
  if (kind == ExperimentKind::SweepTq || kind == ExperimentKind::SweepTf ||
      kind == ExperimentKind::SweepTw) {
    for (double e : epsilon_list)
      if (e <= 0.0)
        throw std::invalid_argument("time-scale sweeps need strictly positive epsilon");
  }
}

std::vector<ParamPoint> ExperimentConfig::resolve() const {
  std::vector<ParamPoint> points;
  const auto& strengths = k_list.empty() ? K_list : k_list;
  for (int n_q : n_q_list) {
    const std::size_t N = std::size_t{1} << n_q;
    const double T = T_resonance ? 2.0 * std::numbers::pi / static_cast<double>(N) : T_fixed;
    for (double s : strengths) {
      const double k = k_list.empty() ? s / T : s;
      for (double eps : epsilon_list) {
        ParamPoint p;
        p.index = points.size();
        p.params.n_q = n_q;
        p.params.k = k;
        p.params.T = T;
        p.params.n_bar = n_bar_rule.resolve(N);
        const double n0 = n0_rule.resolve(N);
        if (n0 < 0.0 || n0 >= static_cast<double>(N))
          throw std::invalid_argument("resolved n0 out of range");
        p.params.n0 = static_cast<std::size_t>(n0);
        p.params.validate();
        p.epsilon = eps;
        points.push_back(p);
      }
    }
  }
  return points;
}

void ExperimentConfig::check_memory(int workers) const {
  int max_nq = 0;
  for (int n_q : n_q_list) max_nq = std::max(max_nq, n_q);
  const double state_bytes = 2.0 * 16.0 * std::pow(2.0, max_nq);
  double per_task = state_bytes;
  if (kind == ExperimentKind::SweepTf) {
    // lockstep sweeps keep the exact arm's sampled states in memory
    const double samples = static_cast<double>(cadence.sample_times(t_max).size());
    per_task += samples * 16.0 * std::pow(2.0, max_nq);
  }
  if (kind == ExperimentKind::WignerMap)
    per_task += 4.0 * std::pow(2.0, 2.0 * max_nq) * 8.0;
  const double total_mb = per_task * std::max(workers, 1) / (1024.0 * 1024.0);
  if (total_mb > memory_budget_mb) {
    std::ostringstream msg;
    msg << "estimated memory " << static_cast<long>(total_mb) << " MiB exceeds budget "
        << static_cast<long>(memory_budget_mb)
        << " MiB; lower n_q, workers, or the sampling cadence, or raise memory_budget_mb";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace qkr
