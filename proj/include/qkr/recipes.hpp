#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qkr/runner.hpp"

namespace qkr {

/// A bundled experiment recipe: one of the named figures fig1..fig13, each a
/// set of experiment configs plus a plotting script stub. Desk-scale
/// parameter choices (qubit caps, realization counts) are baked into the
/// recipe and can be adjusted via --override key=value.
struct RecipeStep {
  std::string label;        // sub-experiment name, e.g. "noisy", "classical"
  std::string config_json;  // before overrides / output_dir injection
};

std::vector<std::string> recipe_names();
std::vector<RecipeStep> recipe_steps(const std::string& figure_id);

struct RecipeResult {
  std::filesystem::path figure_dir;
  std::vector<std::filesystem::path> experiment_dirs;
  bool complete = true;
};

/// Materialize configs (with overrides applied), run them, and write the
/// plotting stub into <out_root>/<figure_id>/.
RecipeResult reproduce(const std::string& figure_id,
                       const std::vector<std::string>& overrides,
                       const std::filesystem::path& out_root,
                       const RunnerOptions& opts = {});

}  // namespace qkr
