#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zk/domain.hpp"
#include "zk/solver.hpp"
#include "zk/transforms.hpp"
#include "zk/weights.hpp"

namespace zk {

enum class Preset {
  LinearDispersion,
  Conservation,
  HSweep,
  DecaySweep,
  Perturbation,
  InterpolationAudit,
  Custom,
};
Preset preset_from_name(const std::string& name);  // throws UsageError on unknown names
std::string preset_name(Preset p);

// Initial data builders. `type` selects the recipe:
//   zero           the zero field
//   gaussian-pulse amplitude * exp(-(x-x0)^2/width^2) times a transverse profile,
//                  either the (l1, l2) sine mode or centered Gaussians (wy, wz;
//                  zero means L/5)
//   single-mode    one spectral slot: amplitude * cos(xi_kx x) * sin * sin
//   random         band-limited noise with unit L2 norm, scaled by amplitude
//   file           ZKF1 snapshot, domain must match
struct InitialSpec {
  std::string type = "gaussian-pulse";
  double amplitude = 1.0;
  double x0 = 0.0;
  double width = 2.0;
  std::string transverse = "mode";  // mode | gaussian
  int l1 = 1, l2 = 1;
  int kx = 1;
  double wy = 0.0, wz = 0.0;
  int kband = 8, l1band = 4, l2band = 4;
  std::optional<double> l2_normalize;
  std::string file;
};

struct ForcingSpec {
  std::string type = "none";  // none | modulated
  InitialSpec profile{};      // spatial profile, same recipes as initial data
  double omega = 0.0;         // amplitude modulation cos(omega t)
};

struct SweepSpec {
  std::vector<double> h{0.2, 0.1, 0.05};   // h-sweep points
  std::vector<double> alpha{0.05, 0.1, 0.2};  // decay-sweep weights
  std::vector<double> eps{1e-2, 1e-3, 1e-4};  // perturbation sizes
  int samples = 200;                          // interpolation audit sample count
};

struct ExperimentConfig {
  Preset preset = Preset::Custom;
  std::string name = "run";
  DomainSpec domain{3.141592653589793, 3.141592653589793, 16.0, 128, 32, 32, true};
  SolverConfig solver;
  InitialSpec initial;
  ForcingSpec forcing;
  DiagnosticsConfig diagnostics;
  SweepSpec sweep;
  std::uint64_t seed = 1;
  bool snapshots = false;
  void validate() const;
};

// Strict JSON parsing: unknown keys anywhere are rejected by name. A "preset" key
// loads that preset's full configuration first; remaining keys override it.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string canonical_json(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);  // FNV-1a of the canonical form

// "solver.dt=5e-4" style dotted-path override, value parsed as JSON when possible.
void apply_override(ExperimentConfig& cfg, const std::string& dotted_kv);

Field build_initial(const Transforms& tr, const InitialSpec& spec, std::uint64_t seed);
std::optional<Forcing> build_forcing(const Transforms& tr, const ForcingSpec& spec,
                                     std::uint64_t seed);

// Baseline configuration of each named preset (before user overrides).
ExperimentConfig preset_config(Preset p);

struct ExecuteOptions {
  std::filesystem::path output_root = "runs";
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

// Runs the experiment, writes config.json / metrics*.csv / report.txt (and ZKF1
// snapshots when requested) under <output_root>/<name>, and returns that directory.
// Every file is written to a .partial sibling first and renamed into place.
std::filesystem::path execute(const ExperimentConfig& cfg, const ExecuteOptions& opts = {});

// Text of <run_dir>/report.txt, for the report subcommand.
std::string report_text(const std::filesystem::path& run_dir);

}  // namespace zk
