#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "qnav/algebra.hpp"
#include "qnav/types.hpp"

namespace qnav {

// Coherence-erasing step: switch pure dephasing on at rate `gamma`.  Without
// an explicit duration the step runs to completion (off-diagonal elements
// negligible at the executor's working precision).
struct Dephase {
  double gamma = 1.0;
  std::optional<double> duration;
};

// Couple `level` to the decaying ancilla with a pulse of transition
// probability p, then wait for the ancilla to empty.  Qutrit-only.
struct ShortPulseDecay {
  Eigen::Index level = 0;  // 0-based
  double p = 1.0;
};

// Repeated unit-probability pulses on `level` until its population has fully
// drained through the ancilla.  Qutrit-only.
struct LongDepletion {
  Eigen::Index level = 0;  // 0-based
};

using PlanStep =
    std::variant<Reflection, PhaseGate, Dephase, ShortPulseDecay, LongDepletion>;

inline bool is_coherent(const PlanStep& s) {
  return std::holds_alternative<Reflection>(s) ||
         std::holds_alternative<PhaseGate>(s);
}

// Endpoint of a plan: a pure state, a density matrix, or empty (for plans
// rebuilt from pulse programs without endpoint metadata).
class StateDescriptor {
 public:
  StateDescriptor() = default;

  static StateDescriptor pure(const QuantumState& psi) {
    StateDescriptor d;
    d.psi_ = psi;
    return d;
  }
  static StateDescriptor mixed(const DensityMatrix& rho) {
    StateDescriptor d;
    d.rho_ = rho;
    return d;
  }

  bool has_value() const { return psi_.has_value() || rho_.has_value(); }
  bool is_pure() const { return psi_.has_value(); }
  const QuantumState& pure_state() const { return psi_.value(); }
  const DensityMatrix& density() const { return rho_.value(); }
  DensityMatrix as_density() const {
    if (psi_) return DensityMatrix::pure(*psi_);
    if (rho_) return *rho_;
    throw ValidationError("plan endpoint is not specified");
  }
  Eigen::Index dim() const { return psi_ ? psi_->dim() : (rho_ ? rho_->dim() : 0); }

 private:
  std::optional<QuantumState> psi_;
  std::optional<DensityMatrix> rho_;
};

// Ordered recipe taking `source` to `target`: steps[0] is applied first.
struct NavigationPlan {
  Eigen::Index dim = 0;
  std::vector<PlanStep> steps;
  StateDescriptor source;
  StateDescriptor target;
  // Guaranteed endpoint accuracy (Frobenius) of exact execution.
  double tolerance = 1e-10;

  bool empty() const { return steps.empty(); }
  size_t size() const { return steps.size(); }
  size_t reflection_count() const {
    size_t c = 0;
    for (const auto& s : steps)
      if (std::holds_alternative<Reflection>(s)) ++c;
    return c;
  }
  size_t phase_gate_count() const {
    size_t c = 0;
    for (const auto& s : steps)
      if (std::holds_alternative<PhaseGate>(s)) ++c;
    return c;
  }
};

}  // namespace qnav
