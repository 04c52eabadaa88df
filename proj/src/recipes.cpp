#include "qkr/recipes.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qkr/io.hpp"

namespace qkr {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

// Shared zone presets. The chaotic zone sits in the separatrix layer of the
// main resonance (hyperbolic point at theta=0), the integrable zone inside
// the period-1 island at theta=pi, the localized zone around the initial
// momentum line for the T=0.5 localized series.
constexpr const char* kChaoticZone =
    R"({"name":"chaotic","theta":[0.3,1.2],"p":[-0.6,0.6]})";
constexpr const char* kIntegrableZone =
    R"({"name":"integrable","theta":[2.64,3.64],"p":[-0.3,0.3]})";
constexpr const char* kLocalizedZone =
    R"({"name":"localized","theta":[0.0,6.2831853],"p":[-6.0,6.0]})";

const std::map<std::string, std::vector<RecipeStep>>& recipes() {
  static const std::map<std::string, std::vector<RecipeStep>> table = {
      {"fig1",
       {{"portrait", R"({
  "kind": "classical_portrait",
  "n_q": [4], "K": [0.9716], "T": 1.0,
  "n_points": 200, "t_max": 10000, "master_seed": 101
})"}}},
      {"fig2",
       {{"noisy", R"({
  "kind": "evolve",
  "n_q": [13, 14, 15, 16], "K": [15.0], "T": 0.5,
  "epsilon": [1e-4], "n0": "N/2",
  "t_max": 1000, "cadence": {"dense_until": 100, "stride_after": 5},
  "realizations": 4, "master_seed": 202
})"},
        {"exact", R"({
  "kind": "evolve",
  "n_q": [14], "K": [15.0], "T": 0.5,
  "epsilon": [0.0], "n0": "N/2",
  "t_max": 1000, "cadence": {"dense_until": 100, "stride_after": 5},
  "realizations": 1, "master_seed": 202
})"}}},
      {"fig3",
       {{"sweep", R"({
  "kind": "sweep_tq",
  "n_q": [10, 11, 12, 13, 14, 15, 16], "K": [5.0, 15.0], "T": 0.5,
  "epsilon": [1e-4, 1e-3], "n0": "N/2",
  "t_max": 4000000, "cadence": {"dense_until": 100, "stride_after": 10},
  "realizations": 10, "master_seed": 303
})"}}},
      {"fig4",
       {{"resonant", R"({
  "kind": "sweep_tf",
  "n_q": [14], "K": [1.3], "T": "2pi/N",
  "epsilon": [3e-3, 1e-2, 3e-2], "n0": 1,
  "t_max": 3000, "cadence": {"dense_until": 100, "stride_after": 5},
  "realizations": 4, "master_seed": 404
})"},
        {"localized", R"({
  "kind": "sweep_tf",
  "n_q": [14], "K": [5.0], "T": 0.5,
  "epsilon": [3e-3, 1e-2], "n0": "N/2",
  "t_max": 3000, "cadence": {"dense_until": 100, "stride_after": 5},
  "realizations": 4, "master_seed": 404
})"}}},
      {"fig5",
       {{"resonant", R"({
  "kind": "sweep_tf",
  "n_q": [4, 6, 8, 10, 12, 14], "K": [1.3], "T": "2pi/N",
  "epsilon": [3e-3, 1e-2, 3e-2], "n0": 1,
  "t_max": 20000, "cadence": {"dense_until": 100, "stride_after": 10},
  "realizations": 10, "master_seed": 505
})"},
        {"localized", R"({
  "kind": "sweep_tf",
  "n_q": [4, 6, 8, 10, 12, 14], "K": [5.0], "T": 0.5,
  "epsilon": [3e-3, 1e-2, 3e-2], "n0": "N/2",
  "t_max": 20000, "cadence": {"dense_until": 100, "stride_after": 10},
  "realizations": 10, "master_seed": 505
})"}}},
      {"fig6",
       {{"husimi", R"({
  "kind": "husimi_map",
  "n_q": [7], "K": [1.3], "T": "2pi/N",
  "epsilon": [0.0, 0.002, 0.004], "n0": 1,
  "t_max": 1000, "realizations": 1, "master_seed": 606
})"},
        {"wigner", R"({
  "kind": "wigner_map",
  "n_q": [7], "K": [1.3], "T": "2pi/N",
  "epsilon": [0.0, 0.002, 0.004], "n0": 1,
  "t_max": 1000, "realizations": 1, "master_seed": 606
})"}}},
      {"fig7",
       {{"husimi", R"({
  "kind": "husimi_map",
  "n_q": [9, 12, 14], "K": [1.3], "T": "2pi/N",
  "epsilon": [0.0, 0.002, 0.004], "n0": 1,
  "t_max": 1000, "avg_window": 10,
  "husimi_grid": {"n_theta": 512, "n_momentum": 512},
  "realizations": 1, "master_seed": 707
})"},
        {"classical", R"({
  "kind": "classical_density",
  "n_q": [14], "K": [1.3], "T": "2pi/N",
  "epsilon": [0.0, 0.002, 0.004], "n0": 1,
  "n_points": 20000, "t_max": 1000, "avg_window": 10, "master_seed": 707
})"}}},
      {"fig8",
       {{"sweep", std::string(R"({
  "kind": "sweep_tw",
  "n_q": [10], "K": [0.9716], "T": "2pi/N",
  "epsilon": [1e-4, 3.1623e-4, 1e-3], "n0": "N/2",
  "t_max": 1000, "cadence": {"dense_until": 100, "stride_after": 10},
  "realizations": 10, "master_seed": 808,
  "zones": [)") + kChaoticZone + "]\n}"}}},
      {"fig9",
       {{"resonant", std::string(R"({
  "kind": "sweep_tw",
  "n_q": [5, 6, 7, 8, 9, 10, 11], "K": [0.9716], "T": "2pi/N",
  "epsilon": [1e-3, 3.1623e-3, 1e-2], "n0": "N/2",
  "t_max": 8000, "cadence": {"dense_until": 100, "stride_after": 10},
  "realizations": 10, "master_seed": 909,
  "zones": [)") + kChaoticZone + "," + kIntegrableZone + "]\n}"},
        {"localized", std::string(R"({
  "kind": "sweep_tw",
  "n_q": [6, 8, 10, 12, 14], "K": [5.0], "T": 0.5,
  "epsilon": [1e-3, 3.1623e-3], "n0": "N/2",
  "t_max": 10000, "cadence": {"dense_until": 100, "stride_after": 10},
  "realizations": 10, "master_seed": 909,
  "zones": [)") + kLocalizedZone + "]\n}"}}},
      {"fig10",
       {{"ipr", R"({
  "kind": "ipr",
  "n_q": [5, 6, 7, 8, 9, 10, 11, 12], "K": [0.5, 0.9, 1.3, 2.0], "T": "2pi/N",
  "epsilon": [0.0], "n0": 1,
  "t_max": 1000, "realizations": 1, "master_seed": 1010
})"}}},
      {"fig11",
       {{"resonant", R"({
  "kind": "ipr",
  "n_q": [5, 6, 7, 8, 9, 10, 11, 12], "K": [2.0], "T": "2pi/N",
  "epsilon": [0.0], "n0": 1,
  "t_max": 1000, "realizations": 1, "master_seed": 1111
})"},
        {"localized", R"({
  "kind": "ipr",
  "n_q": [5, 6, 7, 8, 9, 10, 11, 12, 13, 14], "K": [5.0], "T": 0.5,
  "epsilon": [0.0], "n0": 1,
  "t_max": 1000, "realizations": 1, "master_seed": 1111
})"}}},
      {"fig12",
       {{"tunneling", R"({
  "kind": "tunneling",
  "n_q": [14], "K": [1.3], "T": "2pi/N",
  "epsilon": [1e-3], "n0": 1,
  "t_max": 1000, "cadence": {"dense_until": 0, "stride_after": 25},
  "avg_window": 1, "domain": {"radius": "auto"},
  "husimi_grid": {"n_theta": 1024, "n_momentum": 0},
  "realizations": 5, "master_seed": 1212
})"},
        {"inset", R"({
  "kind": "classical_portrait",
  "n_q": [14], "K": [1.3], "T": "2pi/N", "n0": 1,
  "portrait_line_ics": true,
  "n_points": 100, "t_max": 10000, "master_seed": 1212
})"}}},
      {"fig13",
       {{"scan", R"({
  "kind": "tunneling",
  "n_q": [8, 9, 10, 11, 12, 13, 14], "K": [1.3], "T": "2pi/N",
  "epsilon": [0.0, 3e-3], "n0": 1,
  "t_max": 1050, "cadence": {"dense_until": 0, "stride_after": 200},
  "avg_window": 100, "domain": {"radius": "auto"},
  "husimi_grid": {"n_theta": 1024, "n_momentum": 0},
  "realizations": 10, "master_seed": 1313
})"}}},
  };
  return table;
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

// "a.b=v" sets config[a][b] = v (parsed as JSON when possible).
void apply_override(json& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like key=value: " + kv);
  const std::string key = kv.substr(0, eq);
  const json value = parse_override_value(kv.substr(eq + 1));
  json* node = &cfg;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string plot_stub(const std::string& figure_id,
                      const std::vector<RecipeStep>& steps) {
  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "\"\"\"Plotting stub for " << figure_id
     << ": renders whatever this recipe produced.\"\"\"\n"
     << "import glob, json, os, sys\n"
     << "import matplotlib\n"
     << "matplotlib.use(\"Agg\")\n"
     << "import matplotlib.pyplot as plt\n"
     << "import numpy as np\n\n"
     << "here = os.path.dirname(os.path.abspath(__file__))\n"
     << "fig_id = \"" << figure_id << "\"\n"
     << "steps = [";
  for (std::size_t i = 0; i < steps.size(); ++i)
    py << (i ? ", " : "") << '"' << steps[i].label << '"';
  py << "]\n\n" << R"PY(
def plot_series(ax, path, label):
    rows = [l.strip().split(",") for l in open(path) if l.strip()]
    header, body = rows[0], rows[1:]
    col = {name: i for i, name in enumerate(header)}
    by_obs = {}
    for r in body:
        by_obs.setdefault(r[col["observable"]], []).append(
            (float(r[col["t"]]), float(r[col["mean"]])))
    for obs, pts in sorted(by_obs.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"{label}:{obs}")

def plot_matrix(ax, path):
    with open(path) as f:
        header = json.loads(f.readline().lstrip("# "))
        data = np.loadtxt(f)
    ax.imshow(data, origin="lower", aspect="auto", cmap="viridis")
    ax.set_title(os.path.relpath(path, here), fontsize=6)

def plot_portrait(ax, path):
    data = np.loadtxt(path)
    ax.plot(data[:, 0], data[:, 1], ",k", markersize=0.2)
    ax.set_xlabel("theta"); ax.set_ylabel("p")

series = sorted(glob.glob(os.path.join(here, "*", "*", "*", "aggregate.csv")))
matrices = sorted(glob.glob(os.path.join(here, "*", "*", "*", "*.txt")))
matrices = [m for m in matrices if os.path.basename(m) not in ("timing.txt",)]
portraits = sorted(glob.glob(os.path.join(here, "*", "*", "portrait.txt")))

n = max(1, len(matrices) + (1 if series else 0) + len(portraits))
cols = min(4, n); rows = (n + cols - 1) // cols
fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 3 * rows), squeeze=False)
flat = [ax for row in axes for ax in row]
i = 0
if series:
    for path in series:
        plot_series(flat[0], path, os.path.relpath(path, here).split(os.sep)[0])
    flat[0].set_xlabel("t"); flat[0].legend(fontsize=4); flat[0].set_yscale("log")
    i = 1
for path in matrices:
    if i >= len(flat): break
    plot_matrix(flat[i], path); i += 1
for path in portraits:
    if i >= len(flat): break
    plot_portrait(flat[i], path); i += 1
out = os.path.join(here, fig_id + ".png")
fig.savefig(out, dpi=150, bbox_inches="tight")
print("wrote", out)
)PY";
  return py.str();
}

}  // namespace

std::vector<std::string> recipe_names() {
  std::vector<std::string> names;
  for (const auto& [name, steps] : recipes()) names.push_back(name);
  return names;
}

std::vector<RecipeStep> recipe_steps(const std::string& figure_id) {
  const auto it = recipes().find(figure_id);
  if (it == recipes().end())
    throw std::invalid_argument("unknown figure id: " + figure_id +
                                " (expected fig1..fig13)");
  return it->second;
}

RecipeResult reproduce(const std::string& figure_id,
                       const std::vector<std::string>& overrides,
                       const fs::path& out_root, const RunnerOptions& opts) {
  const auto steps = recipe_steps(figure_id);
  RecipeResult result;
  result.figure_dir = out_root / figure_id;
  fs::create_directories(result.figure_dir);

  for (const auto& step : steps) {
    json cfg = json::parse(step.config_json);
    for (const auto& kv : overrides) apply_override(cfg, kv);
    cfg["output_dir"] = (result.figure_dir / step.label).string();
    const auto config = ExperimentConfig::from_json_string(cfg.dump());
    const auto summary = qkr::run(config, opts);
    result.experiment_dirs.push_back(summary.experiment_dir);
    result.complete = result.complete && summary.complete;
  }
  io::atomic_write(result.figure_dir / ("plot_" + figure_id + ".py"),
                   plot_stub(figure_id, steps));
  return result;
}

}  // namespace qkr
