#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnav {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Malformed or inconsistent input (bad norms, dimensions, parameter ranges).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Source and target density matrices have different spectra, so no unitary
// connects them.  Carries both spectra for diagnostics.
struct InvariantMismatch : std::runtime_error {
  std::vector<double> initial_spectrum;
  std::vector<double> final_spectrum;
  InvariantMismatch(const std::string& msg, std::vector<double> si,
                    std::vector<double> sf)
      : std::runtime_error(msg),
        initial_spectrum(std::move(si)),
        final_spectrum(std::move(sf)) {}
};

// Time propagation failed (step-size underflow, tolerance not reachable) or a
// dynamical invariant was violated mid-run.
struct IntegratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compact diagnostic formatting for magnitudes of any scale (std::to_string
// would flatten 4e-7 to "0.000000").
inline std::string num_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Reduce an angle to the principal branch (-pi, pi].
inline double reduce_phase(double phi) {
  double r = std::remainder(phi, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// arg(z) with the convention arg(0) := 0, used wherever a phase is read off an
// amplitude that may vanish.
inline double arg_or_zero(const Complex& z) {
  if (z == Complex(0.0, 0.0)) return 0.0;
  return std::arg(z);
}

// Normalized pure state of an N-level system (N >= 2).
class QuantumState {
 public:
  // Requires |amps| already normalized within `tol`; stores it renormalized.
  explicit QuantumState(Vector amps, double tol = 1e-9) : amps_(std::move(amps)) {
    if (amps_.size() < 2) throw ValidationError("state dimension must be >= 2");
    const double n = amps_.norm();
    if (std::abs(n - 1.0) > tol)
      throw ValidationError("state vector norm deviates from 1 by " +
                            num_str(std::abs(n - 1.0)));
    amps_ /= n;
  }

  static QuantumState basis(Eigen::Index dim, Eigen::Index n) {
    if (n < 0 || n >= dim) throw ValidationError("basis index out of range");
    Vector v = Vector::Zero(dim);
    v(n) = 1.0;
    return QuantumState(std::move(v));
  }

  // Accepts any nonzero vector and normalizes it (for hand-entered data).
  static QuantumState normalized(Vector amps) {
    const double n = amps.norm();
    if (n < 1e-300) throw ValidationError("cannot normalize the zero vector");
    return QuantumState(amps / n);
  }

  const Vector& amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }
  Matrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  Vector amps_;
};

// Density matrix of an N-level system: Hermitian, unit trace, positive
// semidefinite.  The stored matrix is re-hermitized and trace-normalized, so
// exact algebra downstream starts from exact invariants even when the input
// was rounded.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho, double tol = 1e-9) : rho_(std::move(rho)) {
    if (rho_.rows() < 2 || rho_.rows() != rho_.cols())
      throw ValidationError("density matrix must be square with dim >= 2");
    const double herm_dev = (rho_ - rho_.adjoint()).norm();
    if (herm_dev > tol)
      throw ValidationError("density matrix not Hermitian (deviation " +
                            num_str(herm_dev) + ")");
    const double tr_dev = std::abs(rho_.trace() - Complex(1.0));
    if (tr_dev > tol)
      throw ValidationError("density matrix trace deviates from 1 by " +
                            num_str(tr_dev));
    rho_ = (rho_ + rho_.adjoint()) / 2.0;
    rho_ /= rho_.trace().real();
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -std::max(tol, 1e-10))
      throw ValidationError("density matrix has negative eigenvalue " +
                            num_str(min_ev));
  }

  static DensityMatrix pure(const QuantumState& psi) {
    return DensityMatrix(psi.projector(), 1e-12);
  }

  static DensityMatrix basis(Eigen::Index dim, Eigen::Index n) {
    return pure(QuantumState::basis(dim, n));
  }

  // Diagonal matrix from a population vector (nonnegative, summing to 1
  // within `tol`); stored renormalized.
  static DensityMatrix diagonal(const RealVector& pops, double tol = 1e-9) {
    for (Eigen::Index i = 0; i < pops.size(); ++i)
      if (pops(i) < -1e-12)
        throw ValidationError("negative population in diagonal state");
    const double s = pops.sum();
    if (std::abs(s - 1.0) > tol)
      throw ValidationError("populations sum to " + num_str(s));
    Matrix rho = Matrix::Zero(pops.size(), pops.size());
    for (Eigen::Index i = 0; i < pops.size(); ++i)
      rho(i, i) = std::max(pops(i), 0.0) / s;
    return DensityMatrix(std::move(rho), 1e-12);
  }

  const Matrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  RealVector populations() const { return rho_.diagonal().real(); }

 private:
  Matrix rho_;
};

}  // namespace qnav
