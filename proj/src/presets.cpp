#include <cmath>

#include "zk/config.hpp"

namespace zk {

// Baseline experiment definitions. Sizes are chosen so each run finishes in seconds
// to a few minutes while keeping the quantity under test well inside its tolerance:
// pulse widths set the spectral cutoff, box lengths keep wrap-around radiation out of
// the guard band for the whole horizon, and dt keeps the trapezoidal identity
// accumulators far below the reported residual scale.
ExperimentConfig preset_config(Preset p) {
  const double pi = std::acos(-1.0);
  ExperimentConfig c;
  c.preset = p;
  c.name = preset_name(p);
  c.domain = DomainSpec{pi, pi, 16.0, 128, 32, 32, true};

  switch (p) {
    case Preset::LinearDispersion:
      c.solver.nonlinearity = Nonlinearity::Off;
      c.solver.dt = 1e-3;
      c.solver.T = 1.0;
      c.solver.snapshot_stride = 10;
      c.initial.type = "gaussian-pulse";
      c.initial.amplitude = 1.0;
      c.initial.x0 = 0.0;
      c.initial.width = 2.0;
      c.initial.transverse = "gaussian";
      break;
    case Preset::Conservation:
      c.solver.nonlinearity = Nonlinearity::Auto;
      c.solver.h = 0.0;
      c.solver.dt = 1e-3;
      c.solver.T = 1.0;
      c.solver.snapshot_stride = 10;
      c.initial.type = "gaussian-pulse";
      c.initial.amplitude = 1.0;
      c.initial.x0 = 0.0;
      c.initial.width = 2.0;
      c.initial.transverse = "gaussian";
      break;
    case Preset::HSweep:
      c.domain.Ny = 16;
      c.domain.Nz = 16;
      c.solver.nonlinearity = Nonlinearity::Auto;
      c.solver.dt = 2.5e-4;
      c.solver.T = 0.5;
      c.solver.snapshot_stride = 20;
      c.initial.type = "gaussian-pulse";
      c.initial.amplitude = 1.0;
      c.initial.x0 = 0.0;
      c.initial.width = 2.0;
      c.initial.transverse = "gaussian";
      c.sweep.h = {0.2, 0.1, 0.05};
      break;
    case Preset::DecaySweep:
      c.domain.X = 100.0;
      c.domain.Nx = 512;
      c.domain.Ny = 8;
      c.domain.Nz = 8;
      c.solver.nonlinearity = Nonlinearity::Off;
      c.solver.dt = 1e-3;
      c.solver.T = 5.0;
      c.solver.snapshot_stride = 25;
      c.initial.type = "gaussian-pulse";
      c.initial.amplitude = 1.0;
      c.initial.x0 = 10.0;
      c.initial.width = 4.0;
      c.initial.transverse = "mode";
      c.initial.l1 = 1;
      c.initial.l2 = 1;
      c.diagnostics.window_max = 34.0;
      c.diagnostics.guard_threshold = 1e-10;
      c.sweep.alpha = {0.05, 0.1, 0.2};
      break;
    case Preset::Perturbation:
      c.domain.Nx = 64;
      c.domain.Ny = 16;
      c.domain.Nz = 16;
      c.solver.nonlinearity = Nonlinearity::Auto;
      c.solver.dt = 1e-3;
      c.solver.T = 1.0;
      c.solver.snapshot_stride = 10;
      c.initial.type = "gaussian-pulse";
      c.initial.amplitude = 0.5;
      c.initial.width = 2.0;
      c.initial.transverse = "gaussian";
      c.initial.kband = 8;
      c.initial.l1band = 4;
      c.initial.l2band = 4;
      c.diagnostics.weight = WeightSpec{WeightKind::KappaAlphaBeta, 0.5, 0.5, false};
      c.sweep.eps = {1e-2, 1e-3, 1e-4};
      break;
    case Preset::InterpolationAudit:
      c.domain.X = 8.0;
      c.domain.Nx = 32;
      c.domain.Ny = 8;
      c.domain.Nz = 8;
      c.sweep.samples = 200;
      break;
    case Preset::Custom:
      break;
  }
  return c;
}

}  // namespace zk
