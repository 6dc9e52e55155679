#pragma once

// Shared test infrastructure: deterministic random generators, comparison
// helpers, independently implemented oracles, and the three-decimal
// reference values for the worked qutrit examples used by the regression
// suite.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qnav/types.hpp"

namespace testsup {

using qnav::Complex;
using qnav::DensityMatrix;
using qnav::kPi;
using qnav::Matrix;
using qnav::QuantumState;
using qnav::RealVector;
using qnav::Vector;

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// ---------------------------------------------------------------------------
// Random objects (all deterministic under a fixed seed).
// ---------------------------------------------------------------------------

inline Complex random_gaussian(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

inline Vector random_vector(Rng& rng, Eigen::Index dim) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = random_gaussian(rng);
  return v;
}

inline Vector random_unit_vector(Rng& rng, Eigen::Index dim) {
  Vector v = random_vector(rng, dim);
  while (v.norm() < 1e-6) v = random_vector(rng, dim);
  return v / v.norm();
}

inline QuantumState random_state(Rng& rng, Eigen::Index dim) {
  return QuantumState(random_unit_vector(rng, dim));
}

// Haar-distributed unitary: QR of a complex Gaussian matrix with the R
// diagonal's phases folded into Q.
inline Matrix random_unitary(Rng& rng, Eigen::Index dim) {
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = random_gaussian(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0.0) ? d / std::abs(d) : Complex(1.0);
  }
  return q;
}

// Uniform point on the probability simplex via normalized exponentials.
inline RealVector random_probabilities(Rng& rng, Eigen::Index dim) {
  std::exponential_distribution<double> e(1.0);
  RealVector p(dim);
  for (Eigen::Index i = 0; i < dim; ++i) p(i) = e(rng);
  return p / p.sum();
}

inline DensityMatrix random_density(Rng& rng, Eigen::Index dim) {
  const RealVector p = random_probabilities(rng, dim);
  const Matrix u = random_unitary(rng, dim);
  Matrix rho = u * p.asDiagonal().toDenseMatrix().cast<Complex>() * u.adjoint();
  return DensityMatrix(std::move(rho), 1e-9);
}

// ---------------------------------------------------------------------------
// Comparison helpers.
// ---------------------------------------------------------------------------

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
  return (a - b).norm();
}

// Distance between two angles on the circle.
inline double phase_distance(double a, double b) {
  return std::abs(qnav::reduce_phase(a - b));
}

// Residual after the best global-phase alignment of `a` onto `b`
// (vectors that differ only by e^{i theta} have residual ~0).
inline double aligned_distance(const Vector& a, const Vector& b) {
  const Complex overlap = b.dot(a);  // <b|a>
  Complex phase(1.0, 0.0);
  if (std::abs(overlap) > 0.0) phase = std::abs(overlap) / overlap;
  return (phase * a - b).norm();
}

inline double aligned_distance(const Matrix& a, const Matrix& b) {
  Eigen::Index rmax = 0, cmax = 0;
  a.cwiseAbs().maxCoeff(&rmax, &cmax);
  Complex phase(1.0, 0.0);
  if (std::abs(a(rmax, cmax)) > 0.0 && std::abs(b(rmax, cmax)) > 0.0)
    phase = (b(rmax, cmax) / a(rmax, cmax)) /
            std::abs(b(rmax, cmax) / a(rmax, cmax));
  return (phase * a - b).norm();
}

// ---------------------------------------------------------------------------
// Oracle: eigenvalues of a 3x3 Hermitian matrix from its characteristic
// cubic, solved in closed (trigonometric) form and Newton-polished.  This is
// deliberately independent of the library's eigensolver.
// ---------------------------------------------------------------------------

inline std::array<double, 3> cubic_hermitian_eigenvalues(const Matrix& m) {
  const double c2 = m.trace().real();
  const double c1 =
      0.5 * (c2 * c2 - (m * m).trace().real());
  const double c0 = m.determinant().real();

  // lambda = t + c2/3 turns det(lambda I - m) = 0 into t^3 + p t + q = 0.
  const double shift = c2 / 3.0;
  const double p = c1 - c2 * c2 / 3.0;
  const double q = -c0 + c1 * c2 / 3.0 - 2.0 * c2 * c2 * c2 / 27.0;

  std::array<double, 3> roots{};
  if (p > -1e-30) {
    roots = {shift, shift, shift};  // (near-)triple root
  } else {
    const double radius = 2.0 * std::sqrt(-p / 3.0);
    double cosarg = 3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p);
    cosarg = std::clamp(cosarg, -1.0, 1.0);
    const double theta = std::acos(cosarg);
    for (int k = 0; k < 3; ++k)
      roots[k] = shift + radius * std::cos((theta - 2.0 * kPi * k) / 3.0);
  }

  // Polish on the original characteristic polynomial.
  auto poly = [&](double x) {
    return ((x - c2) * x + c1) * x - c0;
  };
  auto dpoly = [&](double x) { return (3.0 * x - 2.0 * c2) * x + c1; };
  for (double& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const double d = dpoly(r);
      if (std::abs(d) < 1e-8) break;  // degenerate root: leave the closed form
      r -= poly(r) / d;
    }
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

// ---------------------------------------------------------------------------
// Oracle: composite Simpson quadrature.
// ---------------------------------------------------------------------------

template <class F>
double simpson(F f, double a, double b, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    s += f(a + i * h) * ((i % 2 != 0) ? 4.0 : 2.0);
  return s * h / 3.0;
}

// ---------------------------------------------------------------------------
// Oracle: iterated pump-and-decay depletion of one qutrit level.  Each round
// excites the level's full population to the ancilla, which decays back with
// equal branching 1/3 to every level (including the pumped one); rounds
// repeat until the pumped level is empty.  The closed form the library uses
// (x -> 0, x/2 to each other level) must agree with this geometric series.
// ---------------------------------------------------------------------------

inline RealVector iterated_depletion(RealVector pops, Eigen::Index level) {
  while (pops(level) > 1e-15) {
    const double x = pops(level);
    pops(level) = x / 3.0;
    for (Eigen::Index i = 0; i < pops.size(); ++i)
      if (i != level) pops(i) += x / 3.0;
  }
  pops(level) = 0.0;
  return pops;
}

// ---------------------------------------------------------------------------
// Oracle: Givens-style reduction baseline.  Zeroes the below-diagonal
// entries of a unitary column by column with two-level plane rotations; a
// unitary then collapses to a diagonal of phases.  Used as the operation-
// count comparison point: N(N-1)/2 two-level operations versus the plan
// emitter's reflection count.
// ---------------------------------------------------------------------------

struct GivensBaseline {
  int rotation_count = 0;
  double residual = 0.0;  // largest |off-diagonal| after the reduction
};

inline GivensBaseline givens_reduction(Matrix u) {
  const Eigen::Index n = u.rows();
  GivensBaseline out;
  for (Eigen::Index c = 0; c + 1 < n; ++c) {
    for (Eigen::Index r = n - 1; r > c; --r) {
      const Complex a = u(r - 1, c);
      const Complex b = u(r, c);
      const double norm = std::sqrt(std::norm(a) + std::norm(b));
      ++out.rotation_count;
      if (norm < 1e-300) continue;
      Matrix g = Matrix::Identity(n, n);
      g(r - 1, r - 1) = std::conj(a) / norm;
      g(r - 1, r) = std::conj(b) / norm;
      g(r, r - 1) = -b / norm;
      g(r, r) = a / norm;
      u = g * u;
    }
  }
  Matrix off = u;
  off.diagonal().setZero();
  out.residual = off.cwiseAbs().maxCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Reference values: the three-decimal worked qutrit examples that anchor the
// regression suite (single-reflection transfer to the uniform superposition,
// a two-reflection and a one-reflection pure transfer, a mixed-to-mixed pair
// with its two factorizations, and the mixed-state engineering example).
// ---------------------------------------------------------------------------

namespace ref {

inline Complex pc(double mag, double phase_in_pi) {
  return std::polar(mag, phase_in_pi * kPi);
}

// |1> -> (|1>+|2>+|3>)/sqrt(3) in one standard reflection; exact closed form.
inline Vector uniform_axis() {
  const double s3 = std::sqrt(3.0);
  Vector v(3);
  v << s3 - 1.0, -1.0, -1.0;
  return 0.5 * std::sqrt(1.0 + 1.0 / s3) * v;
}

inline Vector uniform_target() {
  Vector v(3);
  v << 1.0, 1.0, 1.0;
  return v / std::sqrt(3.0);
}

// Pure transfer endpoints: (|1>+|3>)/sqrt(2) -> (|1>+e^{i pi/3}|2>+e^{i pi/7}|3>)/sqrt(3).
inline Vector pure_source() {
  Vector v(3);
  v << 1.0, 0.0, 1.0;
  return v / std::sqrt(2.0);
}

inline Vector pure_target() {
  Vector v(3);
  v << Complex(1.0, 0.0), std::polar(1.0, kPi / 3.0), std::polar(1.0, kPi / 7.0);
  return v / std::sqrt(3.0);
}

// Two-reflection realization through |1>: printed axes.
inline Vector two_step_axis_in() {
  Vector v(3);
  v << -0.383, 0.0, 0.924;
  return v;
}

inline Vector two_step_axis_out() {
  Vector v(3);
  v << Complex(-0.460, 0.0), pc(0.628, 1.0 / 3.0), pc(0.628, 1.0 / 7.0);
  return v;
}

// One-reflection (generalized) realization of the same transfer.
inline Vector one_step_axis() {
  Vector v(3);
  v << pc(0.194, 0.213), pc(0.863, -0.454), pc(0.467, -0.083);
  return v;
}

inline constexpr double one_step_phase = 0.574 * kPi;

// Mixed-to-mixed endpoints (three-decimal entries; trace 1.001 before the
// constructor renormalizes).
inline Matrix rho_start() {
  Matrix m(3, 3);
  m << Complex(0.490, 0.0), pc(0.115, -0.789), pc(0.158, 0.107),
       pc(0.115, 0.789), Complex(0.336, 0.0), pc(0.018, -0.675),
       pc(0.158, -0.107), pc(0.018, 0.675), Complex(0.175, 0.0);
  return m;
}

inline Matrix rho_goal() {
  Matrix m(3, 3);
  m << Complex(0.298, 0.0), pc(0.022, 0.689), pc(0.033, 0.319),
       pc(0.022, -0.689), Complex(0.180, 0.0), pc(0.177, 0.909),
       pc(0.033, -0.319), pc(0.177, -0.909), Complex(0.523, 0.0);
  return m;
}

// Standard factorization of the connecting unitary: M(v1) M(v2) Phi.
inline Vector mixed_std_v1() {
  Vector v(3);
  v << pc(0.612, 0.532), pc(0.091, 0.211), pc(0.785, 0.690);
  return v;
}

inline Vector mixed_std_v2() {
  Vector v(3);
  v << Complex(0.0, 0.0), pc(0.533, -0.181), pc(0.846, 0.859);
  return v;
}

inline RealVector mixed_std_gate_phases() {
  RealVector p(3);
  p << -0.468 * kPi, 0.819 * kPi, -0.350 * kPi;
  return p;
}

// Generalized factorization: M(v1;phi1) M(v2;phi2) M(v3;phi3).
inline Vector mixed_gen_v1() {
  Vector v(3);
  v << pc(0.721, 0.659), pc(0.080, -0.209), pc(0.689, 0.270);
  return v;
}

inline Vector mixed_gen_v2() {
  Vector v(3);
  v << Complex(0.0, 0.0), pc(0.813, 0.469), pc(0.582, -0.261);
  return v;
}

inline Vector mixed_gen_v3() {
  Vector v(3);
  v << 0.0, 0.0, 1.0;
  return v;
}

inline constexpr double mixed_gen_phi1 = -0.841 * kPi;
inline constexpr double mixed_gen_phi2 = 0.969 * kPi;
inline constexpr double mixed_gen_phi3 = -0.128 * kPi;

// Mixed-state engineering via dephasing: the first reflection carries |1>
// into the superposition with populations (0.6, 0.3, 0.1) ...
inline Vector carrier_axis() {
  Vector v(3);
  v << -0.336, 0.816, 0.471;
  return v;
}

inline Matrix carrier_rho() {
  Matrix m(3, 3);
  m << 0.6, std::sqrt(0.18), std::sqrt(0.06),
       std::sqrt(0.18), 0.3, std::sqrt(0.03),
       std::sqrt(0.06), std::sqrt(0.03), 0.1;
  return m.cast<Complex>();
}

inline RealVector dephased_populations() {
  RealVector p(3);
  p << 0.6, 0.3, 0.1;
  return p;
}

// ... and the coherent tail carries diag(0.6, 0.3, 0.1) into rho_goal().
inline Vector tail_v1() {
  Vector v(3);
  v << pc(0.689, 0.454), pc(0.280, 0.436), pc(0.668, -0.477);
  return v;
}

inline Vector tail_v2() {
  Vector v(3);
  v << Complex(0.0, 0.0), pc(0.793, 0.740), pc(0.609, 0.025);
  return v;
}

inline constexpr double tail_phi1 = 0.950 * kPi;
inline constexpr double tail_phi2 = -0.760 * kPi;

// Detunings (in units of 1/width) quoted alongside the examples above.
inline constexpr double detuning_equal_superposition = 1.732;  // phi=pi, area 4*pi
inline constexpr double detuning_one_step = 0.791;             // phi=0.574*pi
inline constexpr double detuning_mixed_phi1 = -0.255;          // phi=-0.841*pi
inline constexpr double detuning_mixed_phi2 = 0.049;           // phi=0.969*pi
inline constexpr double detuning_tail_phi1 = 0.072;            // phi=0.950*pi (rounded; see note)
inline constexpr double detuning_tail_phi2 = -0.396;           // phi=-0.760*pi

}  // namespace ref

}  // namespace testsup
