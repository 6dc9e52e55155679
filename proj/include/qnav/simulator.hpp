#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qnav/pulses.hpp"

namespace qnav {

// Time-domain integration settings.  Windows are in the same units as the
// pulse widths; rates likewise.
struct SimConfig {
  double t_start = -15.0;
  double t_end = 15.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double gamma_dephase = 0.0;  // pure dephasing rate on the qunit levels
  double gamma_decay = 0.0;    // ancilla radiative decay rate
  int samples = 400;           // recorded points per run (>= 2)
};

// Sampled time evolution.  `states` holds (N+1)-dimensional propagators or
// density matrices.  `ancilla_population` is the worst-case excited-level
// population over qunit initial states for propagator runs, and rho_ee for
// density-matrix runs.  `mismatch` is filled by plan execution when the
// plan declares endpoints.
struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
  std::vector<double> ancilla_population;
  std::vector<double> mismatch;
};

// (N+1)-level linkage Hamiltonian of the drive at time t: level n couples to
// the ancilla with Omega_n(t)/2, the ancilla carries the static detuning.
Matrix build_hamiltonian(const PulseSet& pulses, double t);

// Schroedinger propagator over [t_start, t_end].
std::pair<Matrix, Trajectory> propagate_unitary(const PulseSet& pulses,
                                                const SimConfig& cfg);

// Master-equation evolution with pure dephasing on the qunit and radiative
// ancilla decay branching equally to all N levels.  `pulses` may be null
// (free evolution).  rho0 must have dimension N+1.
Trajectory propagate_dissipative(const PulseSet* pulses,
                                 const DensityMatrix& rho0,
                                 const SimConfig& cfg);

enum class ExecutionMode { Analytic, Dynamic };

struct ExecutionConfig {
  // Coherent-pulse integration window in units of the pulse width.
  double t_start = -15.0;
  double t_end = 15.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int samples = 400;      // per segment
  double gamma_decay = 1.0;  // ancilla decay rate driving the sculpting steps
  // When set, overrides the dephasing rate declared by Dephase steps.
  std::optional<double> gamma_dephase_override;
  // Compilation choices when the executor lowers reflections itself.
  CompileOptions compile;
  // Precompiled pulses aligned with plan steps (from a pulse program);
  // entries may be nullopt for steps that need none.
  const std::vector<std::optional<PulseSet>>* pulses = nullptr;
};

struct ExecutionResult {
  DensityMatrix final_state;          // qunit block
  std::vector<Trajectory> segments;   // global times; empty in analytic mode
};

// Run a plan on rho0.  Analytic mode folds the exact step maps; dynamic mode
// integrates every step physically on the (N+1)-level system, checking that
// the ancilla is empty between steps.
ExecutionResult execute_plan(const NavigationPlan& plan,
                             const DensityMatrix& rho0, ExecutionMode mode,
                             const ExecutionConfig& cfg = {});

// Concatenate execution segments into one table.
Trajectory flatten(const std::vector<Trajectory>& segments);

}  // namespace qnav
