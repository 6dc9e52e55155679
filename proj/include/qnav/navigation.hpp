#pragma once

#include <optional>

#include "qnav/plan.hpp"

namespace qnav {

// Eigendecomposition of a density matrix in a fixed gauge: eigenvalues
// descending, each eigenvector's largest-magnitude component real positive.
// rho = eigenvectors * diag(eigenvalues) * eigenvectors^dag.
struct Spectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;  // columns
};

Spectrum spectrum(const DensityMatrix& rho);

// Normalized distance of rho from rho_f on the path from rho_i:
// sum |rho - rho_f| / sum |rho_i - rho_f| (elementwise absolute values).
// Returns 0 when the denominator vanishes.
double mismatch(const DensityMatrix& rho, const DensityMatrix& rho_i,
                const DensityMatrix& rho_f);

// Which decomposition a mixed-state plan should use for its coherent stage.
enum class Variant { Standard, Generalized };

// Pure -> pure via standard reflections.  Emits a single reflection when one
// of the four special cases applies (either endpoint a basis state,
// orthogonal endpoints, or both real), otherwise two reflections through
// basis state `basis` with an optional diagonal gate D between them
// (default identity).  The target is reached up to global phase.
NavigationPlan plan_pure_standard(const QuantumState& psi_i,
                                  const QuantumState& psi_f,
                                  Eigen::Index basis = 0,
                                  const std::optional<PhaseGate>& d = {});

// Pure -> pure via one generalized reflection; exact including global phase.
NavigationPlan plan_pure_generalized(const QuantumState& psi_i,
                                     const QuantumState& psi_f);

// Mixed -> mixed for states with equal spectra (the dynamical invariants).
// Builds U = R_f D R_i^dag from the two gauge-fixed eigenbases and an
// arbitrary diagonal gate D (default identity), then decomposes it per
// `variant`.  Throws InvariantMismatch when the spectra differ beyond `tau`.
NavigationPlan plan_mixed(const DensityMatrix& rho_i, const DensityMatrix& rho_f,
                          const std::optional<PhaseGate>& d = {},
                          Variant variant = Variant::Generalized,
                          double tau = 1e-9);

// The coherent unitary a plan's reflections and phase gates compose to
// (steps applied left to right); identity if the plan has no coherent steps.
Matrix coherent_unitary(const NavigationPlan& plan);

}  // namespace qnav
