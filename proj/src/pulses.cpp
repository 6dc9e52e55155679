#include "qnav/pulses.hpp"

#include <algorithm>
#include <cmath>

namespace qnav {

namespace {

// Unreduced accumulated phase: sum_k atan2(2k+1, x), strictly decreasing in x
// from l*pi (x -> -inf) to 0 (x -> +inf).
double phase_sum(double x, int l) {
  double s = 0.0;
  for (int k = 0; k < l; ++k) s += std::atan2(2.0 * k + 1.0, x);
  return s;
}

double phase_sum_derivative(double x, int l) {
  double s = 0.0;
  for (int k = 0; k < l; ++k) {
    const double c = 2.0 * k + 1.0;
    s -= c / (x * x + c * c);
  }
  return s;
}

// Solve phase_sum(x, l) = t by bracketed bisection plus Newton polish.
double solve_phase_sum(double t, int l) {
  double b = 64.0;
  while (phase_sum(-b, l) <= t || phase_sum(b, l) >= t) {
    b *= 8.0;
    if (b > 1e18) throw ValidationError("detuning root escaped the bracket");
  }
  double lo = -b, hi = b;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    (phase_sum(mid, l) > t ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double d = phase_sum_derivative(x, l);
    if (d == 0.0) break;
    x -= (phase_sum(x, l) - t) / d;
  }
  return x;
}

void check_compilable(const Reflection& r) {
  if (r.is_identity())
    throw ValidationError("identity step requires no pulse");
  if (!r.is_standard() && std::abs(r.phase()) < 1e-12)
    throw ValidationError(
        "reflection phase is 0 (identity): no pulse required");
}

void fill_couplings(PulseSet& p, const Vector& v) {
  const Eigen::Index n = v.size();
  p.chi = RealVector(n);
  p.beta = RealVector(n);
  const double mag = p.area / (kPi * p.width);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.chi(i) = std::abs(v(i)) * mag;
    p.beta(i) = arg_or_zero(v(i));
  }
}

}  // namespace

Vector PulseSet::coupling_vector() const {
  Vector v(dim());
  for (Eigen::Index i = 0; i < dim(); ++i)
    v(i) = chi(i) * std::exp(Complex(0.0, beta(i)));
  const double n = v.norm();
  if (n < 1e-300) throw ValidationError("pulse set has zero couplings");
  return v / n;
}

Vector PulseSet::drive(double t) const {
  const double env = 1.0 / std::cosh(t / width);
  Vector v(dim());
  for (Eigen::Index i = 0; i < dim(); ++i)
    v(i) = chi(i) * env * std::exp(Complex(0.0, beta(i)));
  return v;
}

double rz_phase(double x, int l) {
  if (l < 1) throw ValidationError("area index l must be >= 1");
  return reduce_phase(2.0 * phase_sum(x, l));
}

std::vector<double> solve_detuning(double phi, int l) {
  if (l < 1) throw ValidationError("area index l must be >= 1");
  phi = reduce_phase(phi);
  if (l == 1) {
    if (std::abs(phi) < 1e-15)
      throw ValidationError(
          "phase 0 has no detuning root at l = 1: the step is the identity "
          "and needs no pulse");
    return {phi == kPi ? 0.0 : 1.0 / std::tan(phi / 2.0)};
  }
  std::vector<double> roots;
  for (int m = -1; m <= l + 1; ++m) {
    const double t = phi / 2.0 + m * kPi;
    if (t < 1e-15 || t > l * kPi - 1e-15) continue;
    roots.push_back(solve_phase_sum(t, l));
  }
  if (roots.empty())
    throw ValidationError("no detuning root for this phase and area");
  // Magnitude-first ordering; near-ties (e.g. the symmetric +-x pair of a
  // phase-pi root set) resolve negative-first so the indexing is stable.
  std::sort(roots.begin(), roots.end(), [](double a, double b) {
    const double fa = std::abs(a), fb = std::abs(b);
    if (std::abs(fa - fb) > 1e-9 * std::max({1.0, fa, fb})) return fa < fb;
    return a < b;
  });
  return roots;
}

PulseSet compile_standard_resonant(const Reflection& r, int k, double width) {
  check_compilable(r);
  if (!r.is_standard())
    throw ValidationError(
        "resonant compilation applies to standard reflections; use the "
        "detuned compiler for a generalized one");
  if (k < 0) throw ValidationError("area index k must be >= 0");
  if (width <= 0.0) throw ValidationError("pulse width must be positive");
  PulseSet p;
  p.width = width;
  p.area = 2.0 * (2.0 * k + 1.0) * kPi;
  p.delta0 = 0.0;
  p.area_index = k;
  fill_couplings(p, r.axis());
  return p;
}

PulseSet compile_generalized(const Reflection& r, int l, int root_index,
                             double width) {
  check_compilable(r);
  if (l < 1) throw ValidationError("area index l must be >= 1");
  if (width <= 0.0) throw ValidationError("pulse width must be positive");
  const std::vector<double> roots = solve_detuning(r.phase(), l);
  if (root_index < 0 || static_cast<size_t>(root_index) >= roots.size())
    throw ValidationError("detuning root index out of range (" +
                          std::to_string(roots.size()) + " roots)");
  PulseSet p;
  p.width = width;
  p.area = 2.0 * kPi * l;
  p.delta0 = roots[static_cast<size_t>(root_index)] / width;
  p.area_index = l;
  fill_couplings(p, r.axis());
  return p;
}

PulseProgram compile_plan(const NavigationPlan& plan, const CompileOptions& opt) {
  PulseProgram prog;
  prog.dim = plan.dim;
  if (plan.source.has_value()) prog.source = plan.source;
  if (plan.target.has_value()) prog.target = plan.target;
  for (const auto& step : plan.steps) {
    if (const auto* r = std::get_if<Reflection>(&step)) {
      if (r->is_identity() ||
          (!r->is_standard() && std::abs(r->phase()) < 1e-12)) {
        prog.entries.emplace_back(NoPulse{});
      } else if (r->is_standard() && opt.l == 1) {
        // Minimal-area standard reflections drive on resonance; an explicit
        // larger area routes them through the detuned realization, which
        // covers phase pi like any other phase.
        prog.entries.emplace_back(
            compile_standard_resonant(*r, opt.k, opt.width));
      } else {
        prog.entries.emplace_back(
            compile_generalized(*r, opt.l, opt.root_index, opt.width));
      }
    } else if (const auto* g = std::get_if<PhaseGate>(&step)) {
      // A phase gate is a chain of generalized reflections about basis axes.
      for (Eigen::Index i = 0; i < g->dim(); ++i) {
        if (std::abs(g->phases()(i)) < 1e-12) continue;
        Vector e = Vector::Zero(g->dim());
        e(i) = 1.0;
        prog.entries.emplace_back(compile_generalized(
            Reflection::generalized(e, g->phases()(i), 1e-12), opt.l,
            opt.root_index, opt.width));
      }
    } else if (const auto* d = std::get_if<Dephase>(&step)) {
      prog.entries.emplace_back(*d);
    } else if (const auto* sp = std::get_if<ShortPulseDecay>(&step)) {
      prog.entries.emplace_back(*sp);
    } else if (const auto* ld = std::get_if<LongDepletion>(&step)) {
      prog.entries.emplace_back(*ld);
    }
  }
  return prog;
}

ReconstructedPlan reconstruct_plan(const PulseProgram& program) {
  if (program.dim < 2) throw ValidationError("pulse program: dim must be >= 2");
  ReconstructedPlan out;
  out.plan.dim = program.dim;
  out.plan.tolerance = 1e-9;
  if (program.source) out.plan.source = *program.source;
  if (program.target) out.plan.target = *program.target;
  for (const auto& entry : program.entries) {
    if (const auto* ps = std::get_if<PulseSet>(&entry)) {
      if (ps->dim() != program.dim)
        throw ValidationError("pulse set dimension mismatch");
      const Vector v = ps->coupling_vector();
      const int l = static_cast<int>(std::lround(ps->area / (2.0 * kPi)));
      if (l < 1 || std::abs(ps->area - 2.0 * kPi * l) > 1e-6)
        throw ValidationError("pulse area is not an integer multiple of 2 pi");
      const double x = ps->delta0 * ps->width;
      // Resonant: area 2 pi l returns phase l pi (pi for the odd multiples a
      // standard reflection uses, a full return for even ones).
      const double phi = (x == 0.0) ? (l % 2 == 1 ? kPi : 0.0) : rz_phase(x, l);
      out.plan.steps.emplace_back(Reflection::generalized(v, phi, 1e-9));
      out.pulses.emplace_back(*ps);
    } else if (std::holds_alternative<NoPulse>(entry)) {
      out.plan.steps.emplace_back(Reflection::identity(program.dim));
      out.pulses.emplace_back(std::nullopt);
    } else if (const auto* d = std::get_if<Dephase>(&entry)) {
      out.plan.steps.emplace_back(*d);
      out.pulses.emplace_back(std::nullopt);
    } else if (const auto* sp = std::get_if<ShortPulseDecay>(&entry)) {
      out.plan.steps.emplace_back(*sp);
      out.pulses.emplace_back(std::nullopt);
    } else if (const auto* ld = std::get_if<LongDepletion>(&entry)) {
      out.plan.steps.emplace_back(*ld);
      out.pulses.emplace_back(std::nullopt);
    }
  }
  return out;
}

}  // namespace qnav
