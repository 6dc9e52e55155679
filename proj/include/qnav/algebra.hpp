#pragma once

#include <vector>

#include "qnav/types.hpp"

namespace qnav {

// Build the standard reflection I - 2|v><v| from a unit vector.
// Hermitian, unitary, involutory, det = -1; fixes the subspace orthogonal
// to v and maps v -> -v.
Matrix make_standard_qhr(const Vector& v, double tol = 1e-9);

// Build the generalized reflection I + (e^{i phi} - 1)|v><v|.
// Unitary with det = e^{i phi}; reduces to the standard reflection at
// phi = pi and to the identity at phi = 0.
Matrix make_generalized_qhr(const Vector& v, double phi, double tol = 1e-9);

// Frobenius norm of U^dag U - I.
double unitarity_deviation(const Matrix& U);

// Throws ValidationError if U is not square and unitary within `tol`.
void require_unitary(const Matrix& U, double tol = 1e-10);

// One reflection step of a plan.  `standard()` tags phi = pi exactly;
// `identity()` marks a step that needs no operation at all (it carries no
// vector).  Axis vectors are validated as unit within `tol` and stored
// renormalized.
class Reflection {
 public:
  static Reflection standard(Vector v, double tol = 1e-9);
  static Reflection generalized(Vector v, double phi, double tol = 1e-9);
  static Reflection identity(Eigen::Index dim);

  bool is_identity() const { return identity_; }
  bool is_standard() const { return standard_; }
  // Phase of the reflection: exactly pi for standard ones.
  double phase() const { return phi_; }
  const Vector& axis() const;
  Eigen::Index dim() const { return dim_; }
  Matrix matrix() const;

 private:
  Reflection() = default;
  Vector v_;
  double phi_ = 0.0;
  bool standard_ = false;
  bool identity_ = false;
  Eigen::Index dim_ = 0;
};

// Diagonal gate diag(e^{i phi_1}, ..., e^{i phi_N}); phases are reduced to
// (-pi, pi] on construction.
class PhaseGate {
 public:
  explicit PhaseGate(RealVector phases);
  static PhaseGate identity(Eigen::Index dim);

  const RealVector& phases() const { return phases_; }
  Eigen::Index dim() const { return phases_.size(); }
  Matrix matrix() const;
  bool is_identity(double tol = 1e-12) const;

 private:
  RealVector phases_;
};

// U = M(v_1) ... M(v_{N-1}) Phi: exactly N-1 standard reflections (some
// possibly identity-marked) followed (in the product, i.e. applied first)
// by one phase gate.
struct StandardDecomposition {
  std::vector<Reflection> reflections;
  PhaseGate gate;
};

StandardDecomposition decompose_standard(const Matrix& U, double tol = 1e-10);

// U = M(v_1; phi_1) ... M(v_N; phi_N): exactly N generalized reflections,
// no residual gate.
std::vector<Reflection> decompose_generalized(const Matrix& U,
                                              double tol = 1e-10);

QuantumState apply_unitary(const Matrix& U, const QuantumState& psi);
DensityMatrix apply_unitary(const Matrix& U, const DensityMatrix& rho);

}  // namespace qnav
