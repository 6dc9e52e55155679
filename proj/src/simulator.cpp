#include "qnav/simulator.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "qnav/synthesis.hpp"

namespace qnav {

namespace {

using Rhs = std::function<Matrix(double, const Matrix&)>;

// Dormand-Prince 5(4) embedded pair.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = kB1 - 5179.0 / 57600.0, kE3 = kB3 - 7571.0 / 16695.0,
                 kE4 = kB4 - 393.0 / 640.0, kE5 = kB5 + 92097.0 / 339200.0,
                 kE6 = kB6 - 187.0 / 2100.0, kE7 = -1.0 / 40.0;

// Advance y from t_from to t_to adaptively; h is carried between calls.
void integrate_to(const Rhs& f, Matrix& y, double t_from, double t_to,
                  double rtol, double atol, double& h) {
  double t = t_from;
  const double span = t_to - t_from;
  if (span <= 0.0) return;
  if (h <= 0.0 || h > span) h = span / 16.0;
  while (t < t_to) {
    const double hs = std::min(h, t_to - t);
    const Matrix k1 = f(t, y);
    const Matrix k2 = f(t + hs * 0.2, y + hs * (kA21 * k1));
    const Matrix k3 = f(t + hs * 0.3, y + hs * (kA31 * k1 + kA32 * k2));
    const Matrix k4 =
        f(t + hs * 0.8, y + hs * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Matrix k5 = f(t + hs * 8.0 / 9.0,
                        y + hs * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Matrix k6 = f(t + hs, y + hs * (kA61 * k1 + kA62 * k2 + kA63 * k3 +
                                          kA64 * k4 + kA65 * k5));
    const Matrix y5 =
        y + hs * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const Matrix k7 = f(t + hs, y5);
    const Matrix err_m = hs * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 +
                               kE6 * k6 + kE7 * k7);
    double err = 0.0;
    for (Eigen::Index c = 0; c < y.cols(); ++c)
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        const double scale =
            atol + rtol * std::max(std::abs(y(r, c)), std::abs(y5(r, c)));
        err = std::max(err, std::abs(err_m(r, c)) / scale);
      }
    if (err <= 1.0) {
      t += hs;
      y = y5;
      const double grow = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
      h = hs * std::min(5.0, std::max(0.2, grow));
    } else {
      h = hs * std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      std::ostringstream msg;
      msg << "integrator step size underflow at t = " << t
          << " (error estimate " << err << ")";
      throw IntegratorError(msg.str());
    }
  }
}

// Integrate over [t0, t1] recording `samples` equally spaced points
// (including both ends).
Trajectory sample_run(const Rhs& f, Matrix y, double t0, double t1,
                      double rtol, double atol, int samples,
                      const std::function<double(const Matrix&)>& ancilla) {
  if (samples < 2) samples = 2;
  Trajectory tr;
  tr.times.reserve(samples);
  tr.states.reserve(samples);
  tr.ancilla_population.reserve(samples);
  tr.times.push_back(t0);
  tr.states.push_back(y);
  tr.ancilla_population.push_back(ancilla(y));
  double h = 0.0;
  for (int i = 1; i < samples; ++i) {
    const double ts = t0 + (t1 - t0) * i / (samples - 1);
    integrate_to(f, y, tr.times.back(), ts, rtol, atol, h);
    tr.times.push_back(ts);
    tr.states.push_back(y);
    tr.ancilla_population.push_back(ancilla(y));
  }
  return tr;
}

// Lindblad right-hand side: coherent part plus pure qunit dephasing at
// `gd` and ancilla radiative decay at `gr` branching equally to all levels.
Matrix lindblad_rhs(const Matrix* h, const Matrix& rho, double gd, double gr) {
  const Eigen::Index d = rho.rows();
  const Eigen::Index n = d - 1;
  Matrix out;
  if (h) {
    out = Complex(0.0, -1.0) * ((*h) * rho - rho * (*h));
  } else {
    out = Matrix::Zero(d, d);
  }
  if (gd > 0.0) {
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c)
        if (r != c) out(r, c) -= gd * rho(r, c);
      out(r, n) -= 0.5 * gd * rho(r, n);
      out(n, r) -= 0.5 * gd * rho(n, r);
    }
  }
  if (gr > 0.0) {
    const Complex pe = rho(n, n);
    out(n, n) -= gr * pe;
    for (Eigen::Index r = 0; r < n; ++r) {
      out(r, r) += gr / static_cast<double>(n) * pe;
      out(r, n) -= 0.5 * gr * rho(r, n);
      out(n, r) -= 0.5 * gr * rho(n, r);
    }
  }
  return out;
}

Trajectory run_dissipative(const PulseSet* pulses, const Matrix& rho0,
                           double t0, double t1, double rtol, double atol,
                           double gd, double gr, int samples) {
  const Eigen::Index d = rho0.rows();
  Rhs f;
  if (pulses) {
    if (pulses->dim() + 1 != d)
      throw ValidationError("pulse set does not match the state dimension");
    f = [pulses, gd, gr](double t, const Matrix& rho) {
      const Matrix h = build_hamiltonian(*pulses, t);
      return lindblad_rhs(&h, rho, gd, gr);
    };
  } else {
    f = [gd, gr](double, const Matrix& rho) {
      return lindblad_rhs(nullptr, rho, gd, gr);
    };
  }
  const Eigen::Index n = d - 1;
  return sample_run(f, rho0, t0, t1, rtol, atol, samples,
                    [n](const Matrix& rho) { return rho(n, n).real(); });
}

}  // namespace

Matrix build_hamiltonian(const PulseSet& pulses, double t) {
  const Eigen::Index n = pulses.dim();
  Matrix h = Matrix::Zero(n + 1, n + 1);
  const Vector omega = pulses.drive(t);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, n) = 0.5 * omega(i);
    h(n, i) = 0.5 * std::conj(omega(i));
  }
  h(n, n) = pulses.delta0;
  return h;
}

std::pair<Matrix, Trajectory> propagate_unitary(const PulseSet& pulses,
                                                const SimConfig& cfg) {
  const Eigen::Index d = pulses.dim() + 1;
  const Eigen::Index n = pulses.dim();
  // The explicit return type materializes the product before the local
  // Hamiltonian goes out of scope (an expression template would dangle).
  const Rhs f = [&pulses](double t, const Matrix& u) -> Matrix {
    return Complex(0.0, -1.0) * (build_hamiltonian(pulses, t) * u);
  };
  Trajectory tr = sample_run(
      f, Matrix::Identity(d, d), cfg.t_start, cfg.t_end, cfg.rel_tol,
      cfg.abs_tol, cfg.samples, [n](const Matrix& u) {
        double worst = 0.0;
        for (Eigen::Index c = 0; c < n; ++c)
          worst = std::max(worst, std::norm(u(n, c)));
        return worst;
      });
  return {tr.states.back(), std::move(tr)};
}

Trajectory propagate_dissipative(const PulseSet* pulses,
                                 const DensityMatrix& rho0,
                                 const SimConfig& cfg) {
  if (rho0.dim() < 3)
    throw ValidationError("dissipative runs need the ancilla dimension");
  return run_dissipative(pulses, rho0.matrix(), cfg.t_start, cfg.t_end,
                         cfg.rel_tol, cfg.abs_tol, cfg.gamma_dephase,
                         cfg.gamma_decay, cfg.samples);
}

Trajectory flatten(const std::vector<Trajectory>& segments) {
  Trajectory out;
  for (const auto& s : segments) {
    out.times.insert(out.times.end(), s.times.begin(), s.times.end());
    out.states.insert(out.states.end(), s.states.begin(), s.states.end());
    out.ancilla_population.insert(out.ancilla_population.end(),
                                  s.ancilla_population.begin(),
                                  s.ancilla_population.end());
    out.mismatch.insert(out.mismatch.end(), s.mismatch.begin(),
                        s.mismatch.end());
  }
  return out;
}

namespace {

DensityMatrix analytic_execution(const NavigationPlan& plan,
                                 const DensityMatrix& rho0) {
  DensityMatrix state = rho0;
  for (const auto& step : plan.steps) {
    if (const auto* r = std::get_if<Reflection>(&step)) {
      if (r->is_identity()) continue;
      state = apply_unitary(r->matrix(), state);
    } else if (const auto* g = std::get_if<PhaseGate>(&step)) {
      state = apply_unitary(g->matrix(), state);
    } else if (std::get_if<Dephase>(&step)) {
      state = apply_dephasing_map(state);
    } else if (const auto* sp = std::get_if<ShortPulseDecay>(&step)) {
      state = apply_short_pulse_decay_map(state, sp->level, sp->p);
    } else if (const auto* ld = std::get_if<LongDepletion>(&step)) {
      state = apply_long_depletion_map(state, ld->level);
    }
  }
  return state;
}

// Pulse coupling `level` to the ancilla with transition probability p.
PulseSet sculpting_pulse(Eigen::Index dim, Eigen::Index level, double p,
                         double gamma_decay) {
  PulseSet ps;
  ps.width = 0.01 / gamma_decay;
  ps.area = 2.0 * std::asin(std::sqrt(std::clamp(p, 0.0, 1.0)));
  ps.delta0 = 0.0;
  ps.area_index = 0;
  ps.chi = RealVector::Zero(dim);
  ps.beta = RealVector::Zero(dim);
  ps.chi(level) = ps.area / (kPi * ps.width);
  return ps;
}

}  // namespace

ExecutionResult execute_plan(const NavigationPlan& plan,
                             const DensityMatrix& rho0, ExecutionMode mode,
                             const ExecutionConfig& cfg) {
  if (plan.dim != rho0.dim())
    throw ValidationError("plan and state dimensions differ");
  if (cfg.pulses && cfg.pulses->size() != plan.steps.size())
    throw ValidationError("precompiled pulses are not aligned with the plan");

  if (mode == ExecutionMode::Analytic)
    return ExecutionResult{analytic_execution(plan, rho0), {}};

  const Eigen::Index n = plan.dim;
  Matrix p = Matrix::Zero(n + 1, n + 1);
  p.topLeftCorner(n, n) = rho0.matrix();

  std::optional<Matrix> target;
  double denom = 0.0;
  if (plan.source.has_value() && plan.target.has_value()) {
    target = plan.target.as_density().matrix();
    denom =
        (plan.source.as_density().matrix() - *target).cwiseAbs().sum();
  }

  std::vector<Trajectory> segments;
  double t_off = 0.0;

  const auto run = [&](const PulseSet* ps, double t0, double t1, double gd,
                       double gr) {
    Trajectory tr = run_dissipative(ps, p, t0, t1, cfg.rel_tol, cfg.abs_tol,
                                    gd, gr, cfg.samples);
    p = tr.states.back();
    for (auto& t : tr.times) t = t_off + (t - t0);
    t_off += t1 - t0;
    if (target) {
      tr.mismatch.reserve(tr.states.size());
      for (const auto& s : tr.states) {
        const double num =
            (s.topLeftCorner(n, n) - *target).cwiseAbs().sum();
        tr.mismatch.push_back(denom > 0.0 ? num / denom : 0.0);
      }
    }
    segments.push_back(std::move(tr));
  };

  const auto run_pulse = [&](const PulseSet& ps) {
    run(&ps, cfg.t_start * ps.width, cfg.t_end * ps.width, 0.0, 0.0);
  };

  for (size_t idx = 0; idx < plan.steps.size(); ++idx) {
    const PlanStep& step = plan.steps[idx];
    if (const auto* r = std::get_if<Reflection>(&step)) {
      if (r->is_identity() ||
          (!r->is_standard() && std::abs(r->phase()) < 1e-12)) {
        continue;
      }
      if (cfg.pulses && (*cfg.pulses)[idx]) {
        run_pulse(*(*cfg.pulses)[idx]);
      } else if (r->is_standard()) {
        run_pulse(compile_standard_resonant(*r, cfg.compile.k,
                                            cfg.compile.width));
      } else {
        run_pulse(compile_generalized(*r, cfg.compile.l,
                                      cfg.compile.root_index,
                                      cfg.compile.width));
      }
    } else if (const auto* g = std::get_if<PhaseGate>(&step)) {
      for (Eigen::Index i = 0; i < g->dim(); ++i) {
        if (std::abs(g->phases()(i)) < 1e-12) continue;
        Vector e = Vector::Zero(g->dim());
        e(i) = 1.0;
        run_pulse(compile_generalized(
            Reflection::generalized(e, g->phases()(i), 1e-12), cfg.compile.l,
            cfg.compile.root_index, cfg.compile.width));
      }
    } else if (const auto* d = std::get_if<Dephase>(&step)) {
      const double gd = cfg.gamma_dephase_override.value_or(d->gamma);
      if (gd <= 0.0) throw ValidationError("dephasing rate must be positive");
      const double dur = d->duration.value_or(14.0 / gd);
      run(nullptr, 0.0, dur, gd, 0.0);
    } else if (const auto* sp = std::get_if<ShortPulseDecay>(&step)) {
      if (n != 3)
        throw ValidationError("decay sculpting steps are defined for qutrits");
      if (cfg.gamma_decay <= 0.0)
        throw ValidationError("ancilla decay rate must be positive");
      if (sp->p > 1e-14) {
        const PulseSet ps =
            sculpting_pulse(n, sp->level, sp->p, cfg.gamma_decay);
        run(&ps, -10.0 * ps.width, 10.0 * ps.width, 0.0, cfg.gamma_decay);
        run(nullptr, 0.0, 20.0 / cfg.gamma_decay, 0.0, cfg.gamma_decay);
      }
    } else if (const auto* ld = std::get_if<LongDepletion>(&step)) {
      if (n != 3)
        throw ValidationError("decay sculpting steps are defined for qutrits");
      if (cfg.gamma_decay <= 0.0)
        throw ValidationError("ancilla decay rate must be positive");
      bool drained = false;
      for (int cycle = 0; cycle < 400; ++cycle) {
        if (p(ld->level, ld->level).real() < 1e-10) {
          drained = true;
          break;
        }
        const PulseSet ps =
            sculpting_pulse(n, ld->level, 1.0, cfg.gamma_decay);
        run(&ps, -10.0 * ps.width, 10.0 * ps.width, 0.0, cfg.gamma_decay);
        run(nullptr, 0.0, 20.0 / cfg.gamma_decay, 0.0, cfg.gamma_decay);
      }
      if (!drained && p(ld->level, ld->level).real() >= 1e-10)
        throw IntegratorError("level failed to drain during depletion");
    }

    const double leak = p(n, n).real();
    if (leak > 1e-6) {
      std::ostringstream msg;
      msg << "ancilla retained population " << leak << " after step "
          << (idx + 1) << "; refusing to continue";
      throw IntegratorError(msg.str());
    }
    p.row(n).setZero();
    p.col(n).setZero();
    p /= p.trace().real();
  }

  DensityMatrix final_state(p.topLeftCorner(n, n), 1e-6);
  return ExecutionResult{std::move(final_state), std::move(segments)};
}

}  // namespace qnav
