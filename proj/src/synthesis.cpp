#include "qnav/synthesis.hpp"

#include <cmath>

namespace qnav {

namespace {

RealVector diagonal_populations(const DensityMatrix& rho, const char* what) {
  const Matrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > 1e-12)
        throw ValidationError(std::string(what) +
                              ": input density matrix is not diagonal");
  return rho.populations();
}

// Target spectrum, clamped nonnegative and renormalized.
RealVector clean_spectrum(const DensityMatrix& rho_f) {
  RealVector r = spectrum(rho_f).eigenvalues;
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = std::max(r(i), 0.0);
  return r / r.sum();
}

}  // namespace

DensityMatrix apply_dephasing_map(const DensityMatrix& rho) {
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  out.diagonal() = rho.matrix().diagonal();
  return DensityMatrix(std::move(out), 1e-12);
}

DensityMatrix apply_short_pulse_decay_map(const DensityMatrix& rho,
                                          Eigen::Index level, double p) {
  if (rho.dim() != 3)
    throw ValidationError("short-pulse decay map is defined for qutrits");
  if (level < 0 || level >= 3) throw ValidationError("level index out of range");
  if (p < -1e-12 || p > 1.0 + 1e-12)
    throw ValidationError("transition probability must lie in [0, 1]");
  p = std::clamp(p, 0.0, 1.0);
  RealVector pops = diagonal_populations(rho, "short-pulse decay map");
  const double moved = p * pops(level);
  pops(level) -= moved;
  for (Eigen::Index i = 0; i < 3; ++i) pops(i) += moved / 3.0;
  return DensityMatrix::diagonal(pops, 1e-12);
}

DensityMatrix apply_long_depletion_map(const DensityMatrix& rho,
                                       Eigen::Index level) {
  if (rho.dim() != 3)
    throw ValidationError("long depletion map is defined for qutrits");
  if (level < 0 || level >= 3) throw ValidationError("level index out of range");
  RealVector pops = diagonal_populations(rho, "long depletion map");
  const double moved = pops(level);
  pops(level) = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i)
    if (i != level) pops(i) += moved / 2.0;
  return DensityMatrix::diagonal(pops, 1e-12);
}

std::pair<double, double> spontaneous_probabilities(const RealVector& r) {
  if (r.size() != 3)
    throw ValidationError("spontaneous sculpting needs a 3-level spectrum");
  if (r(0) < r(1) - 1e-12 || r(1) < r(2) - 1e-12)
    throw ValidationError("spectrum must be sorted descending");
  if (r(2) < -1e-12) throw ValidationError("spectrum must be nonnegative");
  if (std::abs(r.sum() - 1.0) > 1e-9)
    throw ValidationError("spectrum must sum to 1");
  const double p1 = std::clamp(2.0 * (r(1) - r(2)), 0.0, 1.0);
  const double p2 = std::clamp(3.0 * r(2) / (r(0) + 2.0 * r(2)), 0.0, 1.0);
  return {p1, p2};
}

NavigationPlan plan_dephasing_route(Eigen::Index start,
                                    const DensityMatrix& rho_f, double gamma,
                                    Variant variant) {
  const Eigen::Index n = rho_f.dim();
  if (start < 0 || start >= n)
    throw ValidationError("start basis index out of range");
  if (gamma <= 0.0) throw ValidationError("dephasing rate must be positive");

  const RealVector r = clean_spectrum(rho_f);
  Vector amps(n);
  for (Eigen::Index i = 0; i < n; ++i) amps(i) = std::sqrt(r(i));
  const QuantumState carrier(amps, 1e-9);

  NavigationPlan plan;
  plan.dim = n;
  plan.source = StateDescriptor::pure(QuantumState::basis(n, start));
  plan.target = StateDescriptor::mixed(rho_f);
  plan.tolerance = 1e-10;

  NavigationPlan lift =
      plan_pure_standard(QuantumState::basis(n, start), carrier);
  for (auto& s : lift.steps) plan.steps.emplace_back(std::move(s));

  Eigen::Index populated = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (r(i) > 1e-14) ++populated;
  if (populated > 1) plan.steps.emplace_back(Dephase{gamma, std::nullopt});

  NavigationPlan tail =
      plan_mixed(DensityMatrix::diagonal(r, 1e-12), rho_f, {}, variant, 1e-9);
  for (auto& s : tail.steps) plan.steps.emplace_back(std::move(s));
  return plan;
}

NavigationPlan plan_spontaneous_route(Eigen::Index start,
                                      const DensityMatrix& rho_f,
                                      Variant variant) {
  if (rho_f.dim() != 3)
    throw ValidationError("spontaneous route is defined for qutrits");
  if (start < 0 || start >= 3)
    throw ValidationError("start basis index out of range");

  const RealVector r = clean_spectrum(rho_f);
  const auto [p1, p2] = spontaneous_probabilities(r);

  NavigationPlan plan;
  plan.dim = 3;
  plan.source = StateDescriptor::pure(QuantumState::basis(3, start));
  plan.target = StateDescriptor::mixed(rho_f);
  plan.tolerance = 1e-10;

  if (start != 0) {
    Vector v = Vector::Zero(3);
    v(0) = 1.0 / std::sqrt(2.0);
    v(start) = -1.0 / std::sqrt(2.0);
    plan.steps.emplace_back(Reflection::standard(v, 1e-12));
  }

  // Track the populations analytically while emitting steps.
  RealVector s = RealVector::Zero(3);
  s(0) = 1.0;
  if (p1 > 1e-14) {
    plan.steps.emplace_back(ShortPulseDecay{0, p1});
    const double moved = p1 * s(0);
    s(0) -= moved;
    for (Eigen::Index i = 0; i < 3; ++i) s(i) += moved / 3.0;
  }
  if (s(2) > 1e-14) {
    plan.steps.emplace_back(LongDepletion{2});
    const double moved = s(2);
    s(2) = 0.0;
    s(0) += moved / 2.0;
    s(1) += moved / 2.0;
  }
  if (p2 > 1e-14) {
    plan.steps.emplace_back(ShortPulseDecay{0, p2});
    const double moved = p2 * s(0);
    s(0) -= moved;
    for (Eigen::Index i = 0; i < 3; ++i) s(i) += moved / 3.0;
  }
  if ((s - r).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("sculpted populations failed to match the spectrum");

  NavigationPlan tail =
      plan_mixed(DensityMatrix::diagonal(s, 1e-12), rho_f, {}, variant, 1e-9);
  for (auto& st : tail.steps) plan.steps.emplace_back(std::move(st));
  return plan;
}

}  // namespace qnav
