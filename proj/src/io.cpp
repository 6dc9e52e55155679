#include "qnav/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace qnav::io {

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ValidationError("missing field '" + std::string(key) + "' in " +
                          where);
  return *it;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("expected [re, im] pair in " + where);
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
  return a;
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ValidationError("expected a nonempty array in " + where);
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) =
        complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

json real_vector_to_json(const RealVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

RealVector real_vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ValidationError("expected a nonempty numeric array in " + where);
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ValidationError("expected a number in " + where + "[" +
                            std::to_string(i) + "]");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ValidationError("expected a matrix (array of rows) in " + where);
  const Eigen::Index n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ValidationError("row " + std::to_string(r) + " in " + where +
                            " must have " + std::to_string(n) + " entries");
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = complex_from_json(row[static_cast<size_t>(c)],
                                  where + " row " + std::to_string(r));
  }
  return m;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("'" + path + "': " + e.what());
  }
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace

json state_to_json(const StateDescriptor& s) {
  json j;
  if (s.is_pure()) {
    j["kind"] = "pure";
    j["amplitudes"] = vector_to_json(s.pure_state().amplitudes());
  } else {
    j["kind"] = "mixed";
    j["rho"] = matrix_to_json(s.density().matrix());
  }
  return j;
}

StateDescriptor state_from_json(const json& j, double tol) {
  const std::string kind = require(j, "kind", "state").get<std::string>();
  if (kind == "pure") {
    const Vector amps =
        vector_from_json(require(j, "amplitudes", "state"), "amplitudes");
    return StateDescriptor::pure(QuantumState(amps, tol));
  }
  if (kind == "mixed") {
    const Matrix rho = matrix_from_json(require(j, "rho", "state"), "rho");
    return StateDescriptor::mixed(DensityMatrix(rho, tol));
  }
  throw ValidationError("state kind must be 'pure' or 'mixed', got '" + kind +
                        "'");
}

StateDescriptor load_state(const std::string& path, double tol) {
  return state_from_json(read_file(path), tol);
}

void save_state(const std::string& path, const StateDescriptor& s) {
  write_file(path, state_to_json(s));
}

namespace {

json step_to_json(const PlanStep& step) {
  json j;
  if (const auto* r = std::get_if<Reflection>(&step)) {
    j["type"] = "reflection";
    if (r->is_identity()) {
      j["kind"] = "identity";
    } else if (r->is_standard()) {
      j["kind"] = "standard";
      j["axis"] = vector_to_json(r->axis());
    } else {
      j["kind"] = "generalized";
      j["axis"] = vector_to_json(r->axis());
      j["phase"] = r->phase();
    }
  } else if (const auto* g = std::get_if<PhaseGate>(&step)) {
    j["type"] = "phase_gate";
    j["phases"] = real_vector_to_json(g->phases());
  } else if (const auto* d = std::get_if<Dephase>(&step)) {
    j["type"] = "dephase";
    j["gamma"] = d->gamma;
    if (d->duration) j["duration"] = *d->duration;
  } else if (const auto* sp = std::get_if<ShortPulseDecay>(&step)) {
    j["type"] = "short_pulse_decay";
    j["level"] = sp->level + 1;  // 1-based on disk
    j["p"] = sp->p;
  } else if (const auto* ld = std::get_if<LongDepletion>(&step)) {
    j["type"] = "long_depletion";
    j["level"] = ld->level + 1;
  }
  return j;
}

Eigen::Index level_from_json(const json& j, Eigen::Index dim,
                             const std::string& where) {
  const json& lv = require(j, "level", where);
  if (!lv.is_number_integer())
    throw ValidationError("'level' must be an integer in " + where);
  const auto level = lv.get<Eigen::Index>();
  if (level < 1 || level > dim)
    throw ValidationError("'level' out of range 1.." + std::to_string(dim) +
                          " in " + where);
  return level - 1;
}

PlanStep step_from_json(const json& j, Eigen::Index dim, double tol,
                        const std::string& where) {
  const std::string type = require(j, "type", where).get<std::string>();
  if (type == "reflection") {
    const std::string kind = require(j, "kind", where).get<std::string>();
    if (kind == "identity") return Reflection::identity(dim);
    const Vector axis = vector_from_json(require(j, "axis", where), where);
    if (axis.size() != dim)
      throw ValidationError("axis dimension mismatch in " + where);
    if (kind == "standard") return Reflection::standard(axis, tol);
    if (kind == "generalized")
      return Reflection::generalized(
          axis, require(j, "phase", where).get<double>(), tol);
    throw ValidationError("unknown reflection kind '" + kind + "' in " + where);
  }
  if (type == "phase_gate") {
    const RealVector phases =
        real_vector_from_json(require(j, "phases", where), where);
    if (phases.size() != dim)
      throw ValidationError("phase gate dimension mismatch in " + where);
    return PhaseGate(phases);
  }
  if (type == "dephase") {
    Dephase d;
    d.gamma = require(j, "gamma", where).get<double>();
    if (d.gamma <= 0.0)
      throw ValidationError("'gamma' must be positive in " + where);
    if (j.contains("duration")) d.duration = j["duration"].get<double>();
    return d;
  }
  if (type == "short_pulse_decay") {
    ShortPulseDecay sp;
    sp.level = level_from_json(j, dim, where);
    sp.p = require(j, "p", where).get<double>();
    if (sp.p < 0.0 || sp.p > 1.0)
      throw ValidationError("'p' must lie in [0, 1] in " + where);
    return sp;
  }
  if (type == "long_depletion") {
    LongDepletion ld;
    ld.level = level_from_json(j, dim, where);
    return ld;
  }
  throw ValidationError("unknown step type '" + type + "' in " + where);
}

}  // namespace

json plan_to_json(const NavigationPlan& plan) {
  json j;
  j["dim"] = plan.dim;
  j["tolerance"] = plan.tolerance;
  if (plan.source.has_value()) j["source"] = state_to_json(plan.source);
  if (plan.target.has_value()) j["target"] = state_to_json(plan.target);
  json steps = json::array();
  for (const auto& s : plan.steps) steps.push_back(step_to_json(s));
  j["steps"] = std::move(steps);
  return j;
}

NavigationPlan plan_from_json(const json& j, double tol) {
  NavigationPlan plan;
  plan.dim = require(j, "dim", "plan").get<Eigen::Index>();
  if (plan.dim < 2) throw ValidationError("plan 'dim' must be >= 2");
  if (j.contains("tolerance")) plan.tolerance = j["tolerance"].get<double>();
  if (j.contains("source")) plan.source = state_from_json(j["source"], tol);
  if (j.contains("target")) plan.target = state_from_json(j["target"], tol);
  if (plan.source.has_value() && plan.source.dim() != plan.dim)
    throw ValidationError("plan source dimension mismatch");
  if (plan.target.has_value() && plan.target.dim() != plan.dim)
    throw ValidationError("plan target dimension mismatch");
  const json& steps = require(j, "steps", "plan");
  if (!steps.is_array()) throw ValidationError("'steps' must be an array");
  for (size_t i = 0; i < steps.size(); ++i)
    plan.steps.push_back(step_from_json(
        steps[i], plan.dim, tol, "plan step " + std::to_string(i + 1)));
  return plan;
}

NavigationPlan load_plan(const std::string& path, double tol) {
  return plan_from_json(read_file(path), tol);
}

void save_plan(const std::string& path, const NavigationPlan& plan) {
  write_file(path, plan_to_json(plan));
}

namespace {

json entry_to_json(const ProgramEntry& entry) {
  json j;
  if (const auto* ps = std::get_if<PulseSet>(&entry)) {
    j["type"] = "pulse_set";
    j["chi"] = real_vector_to_json(ps->chi);
    j["beta"] = real_vector_to_json(ps->beta);
    j["width"] = ps->width;
    j["area"] = ps->area;
    j["delta0"] = ps->delta0;
    j["l_or_k"] = ps->area_index;
    j["shape"] = ps->shape;
  } else if (std::holds_alternative<NoPulse>(entry)) {
    j["type"] = "no_pulse";
  } else if (const auto* d = std::get_if<Dephase>(&entry)) {
    j = step_to_json(PlanStep(*d));
  } else if (const auto* sp = std::get_if<ShortPulseDecay>(&entry)) {
    j = step_to_json(PlanStep(*sp));
  } else if (const auto* ld = std::get_if<LongDepletion>(&entry)) {
    j = step_to_json(PlanStep(*ld));
  }
  return j;
}

ProgramEntry entry_from_json(const json& j, Eigen::Index dim, double tol,
                             const std::string& where) {
  const std::string type = require(j, "type", where).get<std::string>();
  if (type == "pulse_set") {
    PulseSet ps;
    ps.chi = real_vector_from_json(require(j, "chi", where), where + " chi");
    ps.beta = real_vector_from_json(require(j, "beta", where), where + " beta");
    if (ps.chi.size() != dim || ps.beta.size() != dim)
      throw ValidationError("pulse channel count mismatch in " + where);
    for (Eigen::Index i = 0; i < ps.chi.size(); ++i)
      if (ps.chi(i) < 0.0)
        throw ValidationError("couplings must be nonnegative in " + where);
    ps.width = require(j, "width", where).get<double>();
    if (ps.width <= 0.0)
      throw ValidationError("'width' must be positive in " + where);
    ps.area = require(j, "area", where).get<double>();
    if (ps.area <= 0.0)
      throw ValidationError("'area' must be positive in " + where);
    ps.delta0 = require(j, "delta0", where).get<double>();
    ps.area_index = require(j, "l_or_k", where).get<int>();
    ps.shape = require(j, "shape", where).get<std::string>();
    if (ps.shape != "sech")
      throw ValidationError("unsupported pulse shape '" + ps.shape + "' in " +
                            where);
    return ps;
  }
  if (type == "no_pulse") return NoPulse{};
  const PlanStep step = step_from_json(j, dim, tol, where);
  if (const auto* d = std::get_if<Dephase>(&step)) return *d;
  if (const auto* sp = std::get_if<ShortPulseDecay>(&step)) return *sp;
  if (const auto* ld = std::get_if<LongDepletion>(&step)) return *ld;
  throw ValidationError("entry type '" + type + "' not allowed in " + where);
}

}  // namespace

json program_to_json(const PulseProgram& prog) {
  json j;
  j["dim"] = prog.dim;
  if (prog.source) j["source"] = state_to_json(*prog.source);
  if (prog.target) j["target"] = state_to_json(*prog.target);
  json entries = json::array();
  for (const auto& e : prog.entries) entries.push_back(entry_to_json(e));
  j["entries"] = std::move(entries);
  return j;
}

PulseProgram program_from_json(const json& j, double tol) {
  PulseProgram prog;
  prog.dim = require(j, "dim", "pulse program").get<Eigen::Index>();
  if (prog.dim < 2) throw ValidationError("program 'dim' must be >= 2");
  if (j.contains("source")) prog.source = state_from_json(j["source"], tol);
  if (j.contains("target")) prog.target = state_from_json(j["target"], tol);
  const json& entries = require(j, "entries", "pulse program");
  if (!entries.is_array()) throw ValidationError("'entries' must be an array");
  for (size_t i = 0; i < entries.size(); ++i)
    prog.entries.push_back(entry_from_json(
        entries[i], prog.dim, tol, "program entry " + std::to_string(i + 1)));
  return prog;
}

PulseProgram load_program(const std::string& path, double tol) {
  return program_from_json(read_file(path), tol);
}

void save_program(const std::string& path, const PulseProgram& prog) {
  write_file(path, program_to_json(prog));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr,
                          Eigen::Index dim) {
  const bool coherences = dim <= 6;
  const bool mm = tr.mismatch.size() == tr.times.size();
  os << "t";
  for (Eigen::Index i = 0; i < dim; ++i) os << ",P" << (i + 1);
  os << ",Pe";
  if (coherences)
    for (Eigen::Index m = 0; m < dim; ++m)
      for (Eigen::Index c = m + 1; c < dim; ++c)
        os << ",re_rho_" << (m + 1) << (c + 1) << ",im_rho_" << (m + 1)
           << (c + 1);
  if (mm) os << ",D";
  os << "\n";
  os << std::setprecision(12);
  for (size_t i = 0; i < tr.times.size(); ++i) {
    os << tr.times[i];
    const Matrix& s = tr.states[i];
    for (Eigen::Index r = 0; r < dim; ++r) os << "," << s(r, r).real();
    os << "," << tr.ancilla_population[i];
    if (coherences)
      for (Eigen::Index m = 0; m < dim; ++m)
        for (Eigen::Index c = m + 1; c < dim; ++c)
          os << "," << s(m, c).real() << "," << s(m, c).imag();
    if (mm) os << "," << tr.mismatch[i];
    os << "\n";
  }
}

void save_trajectory_csv(const std::string& path, const Trajectory& tr,
                         Eigen::Index dim) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  write_trajectory_csv(out, tr, dim);
}

}  // namespace qnav::io
