#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "qkr/config.hpp"

namespace qkr {

inline constexpr const char* kVersionTag = "qkr 0.1.0";

struct RunnerOptions {
  /// 0: QKR_WORKERS environment variable, else hardware concurrency.
  int workers = 0;
  /// Stop scheduling new tasks after this many have executed (resume testing).
  std::uint64_t max_tasks = ~std::uint64_t{0};
};

struct RunSummary {
  std::filesystem::path experiment_dir;
  int tasks_run = 0;
  int tasks_skipped = 0;  // outputs already present
  bool complete = true;   // false: interrupted, aggregates deferred
};

/// Execute one experiment: write manifest.json, per-realization CSVs under
/// <output_dir>/<kind>/<param-slug>/, aggregate.csv per parameter point and
/// summary.csv for the experiment. Outputs are byte-identical for a given
/// config regardless of worker count or scheduling, and a killed run resumes
/// by skipping completed (parameter, realization) pairs.
RunSummary run(const ExperimentConfig& config, const RunnerOptions& opts = {});

int resolve_workers(const RunnerOptions& opts);

}  // namespace qkr
