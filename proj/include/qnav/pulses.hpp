#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qnav/plan.hpp"

namespace qnav {

// Physical drive realizing one reflection on the N-pod linkage: every level n
// couples to the shared ancilla with amplitude Omega_n(t) = chi_n e^{i beta_n}
// sech(t / width), while the ancilla sits at static detuning delta0.
struct PulseSet {
  RealVector chi;            // peak coupling magnitude per channel, >= 0
  RealVector beta;           // coupling phase per channel
  double width = 1.0;        // envelope width T
  double area = 2.0 * kPi;   // rms pulse area A = pi * |chi| * width
  double delta0 = 0.0;       // ancilla detuning
  int area_index = 1;        // l for detuned pulses, k for resonant ones
  std::string shape = "sech";

  Eigen::Index dim() const { return chi.size(); }
  // Unit vector chi_n e^{i beta_n} / |chi|: the reflection axis realized.
  Vector coupling_vector() const;
  // Complex drive amplitudes at time t.
  Vector drive(double t) const;
};

// Phase picked up by a detuned sech pulse of area 2 pi l at detuning
// delta0 * width = x: 2 arg prod_{k=0}^{l-1} (x + i (2k+1)), in (-pi, pi].
double rz_phase(double x, int l);

// All detunings delta0 * width realizing reflection phase `phi` with area
// 2 pi l, sorted by (|x|, x).  phi = 0: no root for l = 1 (identity needs no
// pulse -> ValidationError), l - 1 roots otherwise.
std::vector<double> solve_detuning(double phi, int l);

// Resonant realization of a standard reflection: area 2 (2k+1) pi, delta0 = 0.
PulseSet compile_standard_resonant(const Reflection& r, int k = 0,
                                   double width = 1.0);

// Detuned realization of a generalized reflection with area 2 pi l;
// `root_index` picks among solve_detuning's candidates (default 0: smallest
// |delta0|).
PulseSet compile_generalized(const Reflection& r, int l = 1,
                             int root_index = 0, double width = 1.0);

// Marker for a plan step that requires no drive at all.
struct NoPulse {};

using ProgramEntry =
    std::variant<PulseSet, NoPulse, Dephase, ShortPulseDecay, LongDepletion>;

// Executable pulse program: the plan with every coherent step lowered to
// drive parameters.  Endpoints ride along for verification.
struct PulseProgram {
  Eigen::Index dim = 0;
  std::vector<ProgramEntry> entries;
  std::optional<StateDescriptor> source;
  std::optional<StateDescriptor> target;
};

struct CompileOptions {
  int l = 1;           // area index for generalized reflections
  int k = 0;           // area index for resonant standard reflections
  int root_index = 0;  // detuning-root choice
  double width = 1.0;
};

PulseProgram compile_plan(const NavigationPlan& plan,
                          const CompileOptions& opt = {});

// Rebuild the abstract plan a program encodes (reflection axes from the
// couplings, phases from the detunings), with the original pulse parameters
// kept alongside each coherent step.
struct ReconstructedPlan {
  NavigationPlan plan;
  // One entry per plan step; set for reflections that carry a pulse.
  std::vector<std::optional<PulseSet>> pulses;
};

ReconstructedPlan reconstruct_plan(const PulseProgram& program);

}  // namespace qnav
