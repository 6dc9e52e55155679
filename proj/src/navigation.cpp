#include "qnav/navigation.hpp"

#include <cmath>
#include <sstream>

namespace qnav {

namespace {

constexpr double kExact = 1e-12;

// Reflection vector sending state `psi` to basis state n (up to phase):
// v = (psi - e^{i phi_n} e_n) / sqrt(2 (1 - |psi_n|)), phi_n = arg(psi_n).
Vector axis_through_basis(const QuantumState& psi, Eigen::Index n) {
  Vector v = psi.amplitudes();
  const double phi = arg_or_zero(v(n));
  v(n) -= std::exp(Complex(0.0, phi));
  const double k = v.squaredNorm();
  if (k < 1e-24)
    throw ValidationError("state coincides with the chosen basis state");
  return v / std::sqrt(k);
}

std::vector<double> to_std(const RealVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

bool nearly_real(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i).imag()) > kExact) return false;
  return true;
}

// Index of the dominant component if the state is a basis state up to
// global phase, otherwise -1.
Eigen::Index basis_index(const Vector& v) {
  Eigen::Index at = 0;
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      at = i;
    }
  return best >= 1.0 - kExact ? at : -1;
}

}  // namespace

Spectrum spectrum(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  if (es.info() != Eigen::Success)
    throw ValidationError("eigendecomposition failed");
  const Eigen::Index n = rho.dim();
  Spectrum s;
  s.eigenvalues = RealVector(n);
  s.eigenvectors = Matrix(n, n);
  // Eigen sorts ascending; flip to descending and fix each column's gauge.
  for (Eigen::Index k = 0; k < n; ++k) {
    s.eigenvalues(k) = es.eigenvalues()(n - 1 - k);
    Vector col = es.eigenvectors().col(n - 1 - k);
    Eigen::Index at = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(col(i)) > best + 1e-15) {
        best = std::abs(col(i));
        at = i;
      }
    col *= std::exp(Complex(0.0, -std::arg(col(at))));
    s.eigenvectors.col(k) = col;
  }
  return s;
}

double mismatch(const DensityMatrix& rho, const DensityMatrix& rho_i,
                const DensityMatrix& rho_f) {
  if (rho.dim() != rho_i.dim() || rho.dim() != rho_f.dim())
    throw ValidationError("mismatch: dimension disagreement");
  const double den = (rho_i.matrix() - rho_f.matrix()).cwiseAbs().sum();
  if (den == 0.0) return 0.0;
  return (rho.matrix() - rho_f.matrix()).cwiseAbs().sum() / den;
}

NavigationPlan plan_pure_standard(const QuantumState& psi_i,
                                  const QuantumState& psi_f,
                                  Eigen::Index basis,
                                  const std::optional<PhaseGate>& d) {
  if (psi_i.dim() != psi_f.dim())
    throw ValidationError("endpoint dimensions differ");
  const Eigen::Index n = psi_i.dim();
  if (basis < 0 || basis >= n)
    throw ValidationError("intermediate basis index out of range");
  if (d && d->dim() != n)
    throw ValidationError("phase gate dimension mismatch");

  NavigationPlan plan;
  plan.dim = n;
  plan.source = StateDescriptor::pure(psi_i);
  plan.target = StateDescriptor::pure(psi_f);
  plan.tolerance = 1e-10;

  const Complex a = psi_f.amplitudes().dot(psi_i.amplitudes());
  if (std::abs(a) >= 1.0 - kExact) return plan;  // same ray

  const Eigen::Index bi = basis_index(psi_i.amplitudes());
  const Eigen::Index bf = basis_index(psi_f.amplitudes());
  if (bi >= 0) {
    plan.steps.emplace_back(
        Reflection::standard(axis_through_basis(psi_f, bi), 1e-12));
    return plan;
  }
  if (bf >= 0) {
    plan.steps.emplace_back(
        Reflection::standard(axis_through_basis(psi_i, bf), 1e-12));
    return plan;
  }
  if (std::abs(a) < kExact ||
      (nearly_real(psi_i.amplitudes()) && nearly_real(psi_f.amplitudes()))) {
    Vector diff = psi_f.amplitudes() - psi_i.amplitudes();
    plan.steps.emplace_back(
        Reflection::standard(diff / diff.norm(), 1e-12));
    return plan;
  }

  plan.steps.emplace_back(
      Reflection::standard(axis_through_basis(psi_i, basis), 1e-12));
  if (d && !d->is_identity()) plan.steps.emplace_back(*d);
  plan.steps.emplace_back(
      Reflection::standard(axis_through_basis(psi_f, basis), 1e-12));
  return plan;
}

NavigationPlan plan_pure_generalized(const QuantumState& psi_i,
                                     const QuantumState& psi_f) {
  if (psi_i.dim() != psi_f.dim())
    throw ValidationError("endpoint dimensions differ");
  NavigationPlan plan;
  plan.dim = psi_i.dim();
  plan.source = StateDescriptor::pure(psi_i);
  plan.target = StateDescriptor::pure(psi_f);
  plan.tolerance = 1e-10;

  const Complex a = psi_f.amplitudes().dot(psi_i.amplitudes());
  if (std::abs(1.0 - a) < kExact) return plan;  // identical states
  Vector diff = psi_f.amplitudes() - psi_i.amplitudes();
  const double k = diff.squaredNorm();  // = 2 (1 - Re a)
  const double phi = kPi - 2.0 * std::arg(1.0 - a);
  plan.steps.emplace_back(
      Reflection::generalized(diff / std::sqrt(k), phi, 1e-12));
  return plan;
}

NavigationPlan plan_mixed(const DensityMatrix& rho_i, const DensityMatrix& rho_f,
                          const std::optional<PhaseGate>& d, Variant variant,
                          double tau) {
  if (rho_i.dim() != rho_f.dim())
    throw ValidationError("endpoint dimensions differ");
  const Eigen::Index n = rho_i.dim();
  if (d && d->dim() != n)
    throw ValidationError("phase gate dimension mismatch");

  const Spectrum si = spectrum(rho_i);
  const Spectrum sf = spectrum(rho_f);
  const double dev = (si.eigenvalues - sf.eigenvalues).cwiseAbs().maxCoeff();
  if (dev > tau) {
    std::ostringstream msg;
    msg << "spectra differ (max eigenvalue deviation " << dev
        << " > tolerance " << tau << "); no unitary connects the states";
    throw InvariantMismatch(msg.str(), to_std(si.eigenvalues),
                            to_std(sf.eigenvalues));
  }

  NavigationPlan plan;
  plan.dim = n;
  plan.source = StateDescriptor::mixed(rho_i);
  plan.target = StateDescriptor::mixed(rho_f);
  plan.tolerance = 10.0 * tau;

  const Matrix dm = d ? d->matrix() : Matrix::Identity(n, n);
  const Matrix u = sf.eigenvectors * dm * si.eigenvectors.adjoint();

  // Identity up to global phase: nothing to do.
  const Complex tr = u.trace() / static_cast<double>(n);
  if (std::abs(tr) >= 1.0 - kExact &&
      (u - tr * Matrix::Identity(n, n)).norm() < 1e-10)
    return plan;

  const auto keep = [](const Reflection& r) {
    return !r.is_identity() &&
           (r.is_standard() || std::abs(r.phase()) > kExact);
  };
  if (variant == Variant::Standard) {
    StandardDecomposition dec = decompose_standard(u);
    if (!dec.gate.is_identity()) plan.steps.emplace_back(dec.gate);
    for (auto it = dec.reflections.rbegin(); it != dec.reflections.rend(); ++it)
      if (keep(*it)) plan.steps.emplace_back(*it);
  } else {
    std::vector<Reflection> refls = decompose_generalized(u);
    for (auto it = refls.rbegin(); it != refls.rend(); ++it)
      if (keep(*it)) plan.steps.emplace_back(*it);
  }
  return plan;
}

Matrix coherent_unitary(const NavigationPlan& plan) {
  Matrix u = Matrix::Identity(plan.dim, plan.dim);
  for (const auto& step : plan.steps) {
    if (const auto* r = std::get_if<Reflection>(&step))
      u = r->matrix() * u;
    else if (const auto* g = std::get_if<PhaseGate>(&step))
      u = g->matrix() * u;
  }
  return u;
}

}  // namespace qnav
