#include "qnav/algebra.hpp"

#include <cmath>

namespace qnav {

namespace {

Vector checked_unit(Vector v, double tol, const char* what) {
  if (v.size() < 1) throw ValidationError(std::string(what) + ": empty vector");
  const double n = v.norm();
  if (std::abs(n - 1.0) > tol)
    throw ValidationError(std::string(what) + ": norm deviates from 1 by " +
                          num_str(std::abs(n - 1.0)));
  return v / n;
}

// Columns with ||x - e_n||^2 below this are treated as already reduced.
constexpr double kIdentityColumn = 1e-24;

}  // namespace

Matrix make_standard_qhr(const Vector& v, double tol) {
  const Vector u = checked_unit(v, tol, "reflection vector");
  const Eigen::Index n = u.size();
  return Matrix::Identity(n, n) - 2.0 * (u * u.adjoint());
}

Matrix make_generalized_qhr(const Vector& v, double phi, double tol) {
  const Vector u = checked_unit(v, tol, "reflection vector");
  const Eigen::Index n = u.size();
  const Complex w = std::exp(Complex(0.0, phi)) - 1.0;
  return Matrix::Identity(n, n) + w * (u * u.adjoint());
}

double unitarity_deviation(const Matrix& U) {
  return (U.adjoint() * U - Matrix::Identity(U.rows(), U.cols())).norm();
}

void require_unitary(const Matrix& U, double tol) {
  if (U.rows() != U.cols()) throw ValidationError("matrix is not square");
  const double dev = unitarity_deviation(U);
  if (dev > tol)
    throw ValidationError("matrix is not unitary (deviation " +
                          num_str(dev) + ")");
}

Reflection Reflection::standard(Vector v, double tol) {
  Reflection r;
  r.v_ = checked_unit(std::move(v), tol, "reflection vector");
  r.dim_ = r.v_.size();
  r.phi_ = kPi;
  r.standard_ = true;
  return r;
}

Reflection Reflection::generalized(Vector v, double phi, double tol) {
  const double reduced = reduce_phase(phi);
  if (reduced == kPi) return standard(std::move(v), tol);
  Reflection r;
  r.v_ = checked_unit(std::move(v), tol, "reflection vector");
  r.dim_ = r.v_.size();
  r.phi_ = reduced;
  return r;
}

Reflection Reflection::identity(Eigen::Index dim) {
  if (dim < 1) throw ValidationError("reflection dimension must be positive");
  Reflection r;
  r.identity_ = true;
  r.dim_ = dim;
  return r;
}

const Vector& Reflection::axis() const {
  if (identity_)
    throw ValidationError("identity-marked reflection has no axis");
  return v_;
}

Matrix Reflection::matrix() const {
  if (identity_) return Matrix::Identity(dim_, dim_);
  if (standard_) return make_standard_qhr(v_, 1e-9);
  return make_generalized_qhr(v_, phi_, 1e-9);
}

PhaseGate::PhaseGate(RealVector phases) : phases_(std::move(phases)) {
  if (phases_.size() < 1) throw ValidationError("phase gate: empty phases");
  for (Eigen::Index i = 0; i < phases_.size(); ++i)
    phases_(i) = reduce_phase(phases_(i));
}

PhaseGate PhaseGate::identity(Eigen::Index dim) {
  return PhaseGate(RealVector::Zero(dim));
}

Matrix PhaseGate::matrix() const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (Eigen::Index i = 0; i < dim(); ++i)
    m(i, i) = std::exp(Complex(0.0, phases_(i)));
  return m;
}

bool PhaseGate::is_identity(double tol) const {
  for (Eigen::Index i = 0; i < dim(); ++i)
    if (std::abs(phases_(i)) > tol) return false;
  return true;
}

// Column-by-column triangularization.  Step n finds the standard reflection
// sending column n to e_n times the phase of its diagonal entry; phases pile
// up on the diagonal and are flushed into the trailing gate.
StandardDecomposition decompose_standard(const Matrix& U, double tol) {
  require_unitary(U, tol);
  const Eigen::Index n = U.rows();
  Matrix w = U;
  std::vector<Reflection> refls;
  refls.reserve(static_cast<size_t>(n) - 1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Vector d = w.col(k);
    const Complex c = std::exp(Complex(0.0, arg_or_zero(d(k))));
    d(k) -= c;
    const double kk = d.squaredNorm();
    if (kk < kIdentityColumn) {
      refls.push_back(Reflection::identity(n));
      continue;
    }
    const Vector v = d / std::sqrt(kk);
    w -= 2.0 * v * (v.adjoint() * w);
    refls.push_back(Reflection::standard(v, 1e-9));
  }
  RealVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) phases(k) = arg_or_zero(w(k, k));
  return StandardDecomposition{std::move(refls), PhaseGate(std::move(phases))};
}

// Same sweep, but each step absorbs the column's phase as well, so the
// reduction terminates on the identity with no residual gate.
std::vector<Reflection> decompose_generalized(const Matrix& U, double tol) {
  require_unitary(U, tol);
  const Eigen::Index n = U.rows();
  Matrix w = U;
  std::vector<Reflection> refls;
  refls.reserve(static_cast<size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Vector d = w.col(k);
    const Complex xk = d(k);
    d(k) -= 1.0;
    const double kk = d.squaredNorm();
    if (kk < kIdentityColumn) {
      Vector e = Vector::Zero(n);
      e(k) = 1.0;
      refls.push_back(Reflection::generalized(e, arg_or_zero(w(k, k)), 1e-12));
      continue;
    }
    const Vector v = d / std::sqrt(kk);
    const double phi = kPi - 2.0 * std::arg(1.0 - std::conj(xk));
    // Apply M(v; phi)^dag = M(v; -phi).
    const Complex wconj = std::exp(Complex(0.0, -phi)) - 1.0;
    w += wconj * v * (v.adjoint() * w);
    refls.push_back(Reflection::generalized(v, phi, 1e-9));
  }
  return refls;
}

QuantumState apply_unitary(const Matrix& U, const QuantumState& psi) {
  require_unitary(U, 1e-10);
  if (U.cols() != psi.dim())
    throw ValidationError("unitary/state dimension mismatch");
  return QuantumState(U * psi.amplitudes(), 1e-9);
}

DensityMatrix apply_unitary(const Matrix& U, const DensityMatrix& rho) {
  require_unitary(U, 1e-10);
  if (U.cols() != rho.dim())
    throw ValidationError("unitary/state dimension mismatch");
  return DensityMatrix(U * rho.matrix() * U.adjoint(), 1e-9);
}

}  // namespace qnav
