#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qkr/circuits.hpp"
#include "qkr/observables.hpp"
#include "qkr/phasespace.hpp"

namespace qkr {

enum class ExperimentKind {
  Evolve,
  SweepTq,
  SweepTf,
  SweepTw,
  WignerMap,
  HusimiMap,
  Tunneling,
  ClassicalPortrait,
  ClassicalDensity,
  Ipr,
};

std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);

/// Measurement cadence: every kick while t <= dense_until, then every
/// stride_after-th kick. t = 0 is always sampled.
struct Cadence {
  int dense_until = 100;
  int stride_after = 10;
  std::vector<std::int64_t> sample_times(std::int64_t t_max) const;
};

/// How n0 (and n_bar) resolve once N is known.
struct LevelRule {
  enum class Kind { One, HalfN, Explicit };
  Kind kind = Kind::HalfN;
  double value = 0.0;
  double resolve(std::size_t N) const;
};

/// One fully resolved quantum parameter point of a sweep.
struct ParamPoint {
  std::size_t index = 0;  // position in the resolved grid; seeds derive from it
  RotatorParams params;
  double epsilon = 0.0;

  std::string slug() const;        // human-readable + stable hash
  std::string group_slug() const;  // same, without epsilon (shared exact arm)
};

/// Declarative description of one experiment. Every field is explicit in the
/// emitted manifest; there are no silent defaults downstream of `parse`.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Evolve;

  std::vector<int> n_q_list{4};
  std::vector<double> K_list;  // exactly one of K_list/k_list non-empty
  std::vector<double> k_list;
  bool T_resonance = false;  // T = 2*pi/N
  double T_fixed = 0.5;
  std::vector<double> epsilon_list{0.0};
  LevelRule n0_rule{LevelRule::Kind::HalfN, 0.0};
  LevelRule n_bar_rule{LevelRule::Kind::HalfN, 0.0};

  std::int64_t t_max = 1000;
  Cadence cadence;
  int realizations = 1;
  std::uint64_t master_seed = 1;
  bool tilt_3d = false;

  std::vector<Zone> zones;
  PhaseSpaceDomain domain;
  bool domain_auto = true;  // locate the main island numerically
  HusimiGridSpec husimi_grid;
  int avg_window = 1;

  int n_points = 1000;  // classical ensembles / portrait trajectories
  bool portrait_line_ics = false;  // start portrait points on the n0 line
  bool dump_state = false;

  std::filesystem::path output_dir = "out";
  double memory_budget_mb = 3500.0;

  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  static ExperimentConfig from_json_string(const std::string& text);
  std::string to_json() const;  // canonical manifest form, all fields explicit

  void validate() const;
  std::vector<ParamPoint> resolve() const;

  /// Peak bytes of live state data for one worker at the widest point
  /// (2 * 16 * 2^n_q per in-flight arm, plus stored exact samples for
  /// lockstep sweeps). Throws with an actionable message over budget.
  void check_memory(int workers) const;
};

}  // namespace qkr
