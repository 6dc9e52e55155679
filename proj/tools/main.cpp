#include <CLI11.hpp>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "qnav/io.hpp"
#include "qnav/navigation.hpp"
#include "qnav/pulses.hpp"
#include "qnav/simulator.hpp"
#include "qnav/synthesis.hpp"

namespace {

using namespace qnav;

// Verification found an endpoint error above tolerance.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  std::ostringstream o;
  o << std::setprecision(9) << x;
  return o.str();
}

std::string phase_str(double phi) { return num(phi / kPi) + " pi"; }

std::string vector_str(const Vector& v) {
  std::ostringstream o;
  o << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) o << ", ";
    o << num(std::abs(v(i))) << " @ " << phase_str(arg_or_zero(v(i)));
  }
  o << "]";
  return o.str();
}

std::string real_vector_str(const RealVector& v) {
  std::ostringstream o;
  o << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) o << ", ";
    o << num(v(i));
  }
  o << "]";
  return o.str();
}

void print_step(std::ostream& os, size_t idx, const PlanStep& step) {
  os << "  step " << (idx + 1) << ": ";
  if (const auto* r = std::get_if<Reflection>(&step)) {
    if (r->is_identity()) {
      os << "identity (no operation)\n";
    } else if (r->is_standard()) {
      os << "standard reflection\n    axis " << vector_str(r->axis()) << "\n";
    } else {
      os << "generalized reflection, phase " << phase_str(r->phase())
         << "\n    axis " << vector_str(r->axis()) << "\n";
    }
  } else if (const auto* g = std::get_if<PhaseGate>(&step)) {
    os << "phase gate, phases/pi " << real_vector_str(g->phases() / kPi)
       << "\n";
  } else if (const auto* d = std::get_if<Dephase>(&step)) {
    os << "dephase, gamma " << num(d->gamma);
    if (d->duration)
      os << ", duration " << num(*d->duration) << "\n";
    else
      os << " (to completion)\n";
  } else if (const auto* sp = std::get_if<ShortPulseDecay>(&step)) {
    os << "short decay pulse on level " << (sp->level + 1) << ", p "
       << num(sp->p) << "\n";
  } else if (const auto* ld = std::get_if<LongDepletion>(&step)) {
    os << "deplete level " << (ld->level + 1) << " through the ancilla\n";
  }
}

void print_plan(const NavigationPlan& plan) {
  std::cout << "plan: " << plan.dim << "-level system, " << plan.size()
            << (plan.size() == 1 ? " step" : " steps") << " ("
            << plan.reflection_count() << " reflections)\n";
  for (size_t i = 0; i < plan.steps.size(); ++i)
    print_step(std::cout, i, plan.steps[i]);
  if (plan.empty()) std::cout << "  (source already matches the target)\n";
}

void print_program(const PulseProgram& prog) {
  std::cout << "pulse program: " << prog.dim << "-level system, "
            << prog.entries.size() << " entries\n";
  for (size_t i = 0; i < prog.entries.size(); ++i) {
    std::cout << "  entry " << (i + 1) << ": ";
    const ProgramEntry& e = prog.entries[i];
    if (const auto* ps = std::get_if<PulseSet>(&e)) {
      std::cout << "pulse, area " << num(ps->area / kPi) << " pi ("
                << (ps->delta0 == 0.0 ? "k" : "l") << "=" << ps->area_index
                << "), delta0*T " << num(ps->delta0 * ps->width) << ", width "
                << num(ps->width) << "\n    chi*T " << real_vector_str(
                       ps->chi * ps->width)
                << "\n    beta/pi " << real_vector_str(ps->beta / kPi) << "\n";
    } else if (std::holds_alternative<NoPulse>(e)) {
      std::cout << "no pulse required\n";
    } else if (const auto* d = std::get_if<Dephase>(&e)) {
      print_step(std::cout, i, PlanStep(*d));
      continue;
    } else if (const auto* sp = std::get_if<ShortPulseDecay>(&e)) {
      print_step(std::cout, i, PlanStep(*sp));
      continue;
    } else if (const auto* ld = std::get_if<LongDepletion>(&e)) {
      print_step(std::cout, i, PlanStep(*ld));
      continue;
    }
  }
}

int root_index_from(const std::string& sel, int l) {
  if (sel == "smallest") return 0;
  if (sel == "largest") return l - 1;
  try {
    return std::stoi(sel);
  } catch (const std::exception&) {
    throw ValidationError(
        "--root-index must be 'smallest', 'largest', or an integer");
  }
}

struct PlanPureArgs {
  std::string initial, final_, method = "generalized", out;
  int basis = 1;
  double tol = 1e-9;
};

int run_plan_pure(const PlanPureArgs& a) {
  const StateDescriptor si = io::load_state(a.initial, a.tol);
  const StateDescriptor sf = io::load_state(a.final_, a.tol);
  if (!si.is_pure() || !sf.is_pure())
    throw ValidationError("plan pure expects pure endpoint states");
  NavigationPlan plan;
  if (a.method == "standard") {
    if (a.basis < 1 || a.basis > si.dim())
      throw ValidationError("--basis-index out of range");
    plan = plan_pure_standard(si.pure_state(), sf.pure_state(), a.basis - 1);
  } else if (a.method == "generalized") {
    plan = plan_pure_generalized(si.pure_state(), sf.pure_state());
  } else {
    throw ValidationError("--method must be 'standard' or 'generalized'");
  }
  print_plan(plan);
  if (!a.out.empty()) {
    io::save_plan(a.out, plan);
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

struct PlanMixedArgs {
  std::string initial, final_, variant = "generalized", out;
  double tol = 1e-9;
};

int run_plan_mixed(const PlanMixedArgs& a) {
  const DensityMatrix ri = io::load_state(a.initial, a.tol).as_density();
  const DensityMatrix rf = io::load_state(a.final_, a.tol).as_density();
  const Variant v = a.variant == "standard" ? Variant::Standard
                    : a.variant == "generalized"
                        ? Variant::Generalized
                        : throw ValidationError(
                              "--variant must be 'standard' or 'generalized'");
  NavigationPlan plan = plan_mixed(ri, rf, {}, v, a.tol);
  print_plan(plan);
  if (!a.out.empty()) {
    io::save_plan(a.out, plan);
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

struct SynthArgs {
  std::string route, target, variant = "generalized", out;
  int start = 1;
  double gamma = 2.0;
  double tol = 1e-9;
};

int run_plan_synthesize(const SynthArgs& a) {
  const DensityMatrix rf = io::load_state(a.target, a.tol).as_density();
  if (a.start < 1 || a.start > rf.dim())
    throw ValidationError("--start-index out of range");
  const Variant v = a.variant == "standard" ? Variant::Standard
                    : a.variant == "generalized"
                        ? Variant::Generalized
                        : throw ValidationError(
                              "--variant must be 'standard' or 'generalized'");
  NavigationPlan plan;
  if (a.route == "dephasing")
    plan = plan_dephasing_route(a.start - 1, rf, a.gamma, v);
  else if (a.route == "spontaneous")
    plan = plan_spontaneous_route(a.start - 1, rf, v);
  else
    throw ValidationError("--route must be 'dephasing' or 'spontaneous'");
  print_plan(plan);
  if (!a.out.empty()) {
    io::save_plan(a.out, plan);
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

struct CompileArgs {
  std::string plan, root = "smallest", out;
  int l = 1, k = 0;
  double width = 1.0;
  double tol = 1e-9;
};

int run_compile(const CompileArgs& a) {
  const NavigationPlan plan = io::load_plan(a.plan, a.tol);
  CompileOptions opt;
  opt.l = a.l;
  opt.k = a.k;
  opt.width = a.width;
  opt.root_index = root_index_from(a.root, a.l);
  const PulseProgram prog = compile_plan(plan, opt);
  print_program(prog);
  if (!a.out.empty()) {
    io::save_program(a.out, prog);
    std::cout << "wrote " << a.out << "\n";
  }
  return 0;
}

struct SimulateArgs {
  std::string plan, pulses, initial, target, out, save_state;
  std::vector<double> tspan;
  double rtol = 1e-10, atol = 1e-12;
  int samples = 400;
  double gamma_decay = 1.0;
  double gamma_dephase = -1.0;  // <0: use the plan's rates
  std::string root = "smallest";
  int l = 1, k = 0;
  double width = 1.0;
  double tol = 1e-9;
};

int run_simulate(const SimulateArgs& a) {
  if (a.plan.empty() == a.pulses.empty())
    throw ValidationError("pass exactly one of --plan or --pulses");
  const DensityMatrix rho0 = io::load_state(a.initial, a.tol).as_density();

  NavigationPlan plan;
  std::vector<std::optional<PulseSet>> pulses;
  bool have_pulses = false;
  if (!a.plan.empty()) {
    plan = io::load_plan(a.plan, a.tol);
  } else {
    ReconstructedPlan rec = reconstruct_plan(io::load_program(a.pulses, a.tol));
    plan = std::move(rec.plan);
    pulses = std::move(rec.pulses);
    have_pulses = true;
  }
  if (plan.dim != rho0.dim())
    throw ValidationError("initial state dimension does not match the plan");

  if (!a.target.empty())
    plan.target = io::load_state(a.target, a.tol);
  if (!plan.source.has_value()) plan.source = StateDescriptor::mixed(rho0);
  if (!plan.target.has_value()) {
    // Mismatch is measured against the exact endpoint of the steps.
    ExecutionResult analytic =
        execute_plan(plan, rho0, ExecutionMode::Analytic);
    plan.target = StateDescriptor::mixed(analytic.final_state);
  }

  ExecutionConfig cfg;
  if (!a.tspan.empty()) {
    if (a.tspan.size() != 2 || a.tspan[0] >= a.tspan[1])
      throw ValidationError("--tspan needs two increasing times");
    cfg.t_start = a.tspan[0];
    cfg.t_end = a.tspan[1];
  }
  cfg.rel_tol = a.rtol;
  cfg.abs_tol = a.atol;
  cfg.samples = a.samples;
  cfg.gamma_decay = a.gamma_decay;
  if (a.gamma_dephase > 0.0) cfg.gamma_dephase_override = a.gamma_dephase;
  cfg.compile.l = a.l;
  cfg.compile.k = a.k;
  cfg.compile.width = a.width;
  cfg.compile.root_index = root_index_from(a.root, a.l);
  if (have_pulses) cfg.pulses = &pulses;

  const ExecutionResult res =
      execute_plan(plan, rho0, ExecutionMode::Dynamic, cfg);
  const Trajectory flat = flatten(res.segments);

  double peak_ancilla = 0.0;
  for (double v : flat.ancilla_population)
    peak_ancilla = std::max(peak_ancilla, v);

  std::cout << "simulated " << res.segments.size() << " segments, "
            << flat.times.size() << " samples, total time "
            << num(flat.times.empty() ? 0.0 : flat.times.back()) << "\n";
  std::cout << "final populations " << real_vector_str(
                   res.final_state.populations())
            << "\n";
  std::cout << "peak ancilla population " << num(peak_ancilla) << "\n";
  if (!flat.mismatch.empty())
    std::cout << "final mismatch D " << num(flat.mismatch.back()) << "\n";
  const double drift = std::abs(res.final_state.matrix().trace().real() - 1.0);
  std::cout << "final trace drift " << num(drift) << "\n";

  if (!a.out.empty()) {
    io::save_trajectory_csv(a.out, flat, plan.dim);
    std::cout << "wrote " << a.out << "\n";
  }
  if (!a.save_state.empty()) {
    io::save_state(a.save_state, StateDescriptor::mixed(res.final_state));
    std::cout << "wrote " << a.save_state << "\n";
  }
  return 0;
}

struct VerifyArgs {
  std::string plan, initial, final_;
  double tol = -1.0;  // <0: use the plan's own tolerance
  double parse_tol = 1e-9;
};

int run_verify(const VerifyArgs& a) {
  const double ptol = a.tol > 0.0 ? std::max(a.tol, a.parse_tol) : a.parse_tol;
  NavigationPlan plan = io::load_plan(a.plan, ptol);
  if (!a.initial.empty()) plan.source = io::load_state(a.initial, ptol);
  if (!a.final_.empty()) plan.target = io::load_state(a.final_, ptol);
  if (!plan.source.has_value() || !plan.target.has_value())
    throw ValidationError(
        "verification needs endpoints: plan metadata or --initial/--final");

  const DensityMatrix rho0 = plan.source.as_density();
  const DensityMatrix rho_f = plan.target.as_density();

  double worst_unitarity = 0.0;
  for (const auto& step : plan.steps) {
    if (const auto* r = std::get_if<Reflection>(&step)) {
      if (!r->is_identity())
        worst_unitarity =
            std::max(worst_unitarity, unitarity_deviation(r->matrix()));
    } else if (const auto* g = std::get_if<PhaseGate>(&step)) {
      worst_unitarity =
          std::max(worst_unitarity, unitarity_deviation(g->matrix()));
    }
  }

  const ExecutionResult res =
      execute_plan(plan, rho0, ExecutionMode::Analytic);
  const double err = (res.final_state.matrix() - rho_f.matrix()).norm();
  const RealVector ev_out = spectrum(res.final_state).eigenvalues;
  const RealVector ev_want = spectrum(rho_f).eigenvalues;
  const double spect_dev = (ev_out - ev_want).cwiseAbs().maxCoeff();
  const double d_val = mismatch(res.final_state, rho0, rho_f);
  const double accept = a.tol > 0.0 ? a.tol : plan.tolerance;

  std::cout << "verify: " << plan.size() << " steps on a " << plan.dim
            << "-level system\n";
  std::cout << "  worst coherent-step unitarity deviation "
            << num(worst_unitarity) << "\n";
  std::cout << "  endpoint error (Frobenius) " << num(err) << "\n";
  std::cout << "  endpoint spectrum deviation " << num(spect_dev) << "\n";
  std::cout << "  endpoint mismatch D " << num(d_val) << "\n";
  std::cout << "  tolerance " << num(accept) << "\n";
  if (err > accept)
    throw VerificationFailure("endpoint error " + num(err) +
                              " exceeds tolerance " + num(accept));
  std::cout << "verification passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Plan, compile, simulate, and verify reflection-based state "
      "transfers on an N-level system with a shared ancilla"};
  app.require_subcommand(1);

  PlanPureArgs pure_args;
  PlanMixedArgs mixed_args;
  SynthArgs synth_args;
  CompileArgs compile_args;
  SimulateArgs sim_args;
  VerifyArgs verify_args;

  CLI::App* plan = app.add_subcommand("plan", "Build a navigation plan");
  plan->require_subcommand(1);

  CLI::App* pure = plan->add_subcommand("pure", "Pure state to pure state");
  pure->add_option("--initial", pure_args.initial, "Initial state file")
      ->required();
  pure->add_option("--final", pure_args.final_, "Final state file")->required();
  pure->add_option("--method", pure_args.method,
                   "standard | generalized (default)");
  pure->add_option("--basis-index", pure_args.basis,
                   "1-based intermediate basis state (standard method)");
  pure->add_option("--tol", pure_args.tol, "Input repair tolerance");
  pure->add_option("--out", pure_args.out, "Write the plan here");

  CLI::App* mixed = plan->add_subcommand("mixed",
                                         "Mixed state to mixed state "
                                         "(equal spectra)");
  mixed->add_option("--initial", mixed_args.initial, "Initial state file")
      ->required();
  mixed->add_option("--final", mixed_args.final_, "Final state file")
      ->required();
  mixed->add_option("--variant", mixed_args.variant,
                    "standard | generalized (default)");
  mixed->add_option("--tol", mixed_args.tol,
                    "Spectrum agreement and input repair tolerance");
  mixed->add_option("--out", mixed_args.out, "Write the plan here");

  CLI::App* synth = plan->add_subcommand(
      "synthesize", "Reach a mixed state from a basis state incoherently");
  synth->add_option("--route", synth_args.route,
                    "dephasing | spontaneous")
      ->required();
  synth->add_option("--target", synth_args.target, "Target state file")
      ->required();
  synth->add_option("--start-index", synth_args.start,
                    "1-based initial basis state");
  synth->add_option("--gamma-dephase", synth_args.gamma,
                    "Dephasing rate (dephasing route)");
  synth->add_option("--variant", synth_args.variant,
                    "Coherent tail: standard | generalized (default)");
  synth->add_option("--tol", synth_args.tol, "Input repair tolerance");
  synth->add_option("--out", synth_args.out, "Write the plan here");

  CLI::App* compile =
      app.add_subcommand("compile", "Lower a plan to pulse parameters");
  compile->add_option("--plan", compile_args.plan, "Plan file")->required();
  compile->add_option("--l", compile_args.l,
                      "Area index for generalized reflections (area 2 pi l)");
  compile->add_option("--k", compile_args.k,
                      "Area index for standard reflections (area 2(2k+1) pi)");
  compile->add_option("--root-index", compile_args.root,
                      "Detuning root: smallest | largest | <int>");
  compile->add_option("--width", compile_args.width, "Pulse width T");
  compile->add_option("--tol", compile_args.tol, "Input repair tolerance");
  compile->add_option("--out", compile_args.out, "Write the pulse program here");

  CLI::App* sim = app.add_subcommand(
      "simulate", "Integrate a plan or pulse program in the time domain");
  sim->add_option("--plan", sim_args.plan, "Plan file");
  sim->add_option("--pulses", sim_args.pulses, "Pulse program file");
  sim->add_option("--initial", sim_args.initial, "Initial state file")
      ->required();
  sim->add_option("--target", sim_args.target,
                  "Override the mismatch target state");
  sim->add_option("--tspan", sim_args.tspan,
                  "Coherent-pulse window in widths (two numbers)")
      ->expected(2);
  sim->add_option("--rtol", sim_args.rtol, "Integrator relative tolerance");
  sim->add_option("--atol", sim_args.atol, "Integrator absolute tolerance");
  sim->add_option("--samples", sim_args.samples, "Samples per segment");
  sim->add_option("--gamma-decay", sim_args.gamma_decay,
                  "Ancilla decay rate for sculpting steps");
  sim->add_option("--gamma-dephase", sim_args.gamma_dephase,
                  "Override the dephasing rate of dephase steps");
  sim->add_option("--l", sim_args.l, "Area index for generalized reflections");
  sim->add_option("--k", sim_args.k, "Area index for standard reflections");
  sim->add_option("--root-index", sim_args.root,
                  "Detuning root: smallest | largest | <int>");
  sim->add_option("--width", sim_args.width, "Pulse width T");
  sim->add_option("--tol", sim_args.tol, "Input repair tolerance");
  sim->add_option("--out", sim_args.out, "Write the trajectory CSV here");
  sim->add_option("--save-state", sim_args.save_state,
                  "Write the final state here");

  CLI::App* verify = app.add_subcommand(
      "verify", "Check a plan's endpoint accuracy analytically");
  verify->add_option("--plan", verify_args.plan, "Plan file")->required();
  verify->add_option("--initial", verify_args.initial,
                     "Override the plan's source state");
  verify->add_option("--final", verify_args.final_,
                     "Override the plan's target state");
  verify->add_option("--tol", verify_args.tol,
                     "Acceptance tolerance (default: the plan's)");

  try {
    app.parse(argc, argv);
    if (pure->parsed()) return run_plan_pure(pure_args);
    if (mixed->parsed()) return run_plan_mixed(mixed_args);
    if (synth->parsed()) return run_plan_synthesize(synth_args);
    if (compile->parsed()) return run_compile(compile_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (verify->parsed()) return run_verify(verify_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const InvariantMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "  initial spectrum:";
    for (double v : e.initial_spectrum) std::cerr << " " << num(v);
    std::cerr << "\n  final spectrum:  ";
    for (double v : e.final_spectrum) std::cerr << " " << num(v);
    std::cerr << "\nhint: eigenvalues are conserved by coherent steps; use "
                 "'plan synthesize' to change the spectrum incoherently\n";
    return 2;
  } catch (const IntegratorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification FAILED: " << e.what() << "\n";
    return 4;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
