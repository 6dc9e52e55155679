#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qnav/simulator.hpp"

namespace qnav::io {

using json = nlohmann::json;

// States: {"kind": "pure", "amplitudes": [[re, im], ...]} or
// {"kind": "mixed", "rho": [[[re, im], ...], ...]}.  `tol` bounds how far
// from normalized/Hermitian hand-entered data may be; it is repaired on load.
json state_to_json(const StateDescriptor& s);
StateDescriptor state_from_json(const json& j, double tol = 1e-9);
StateDescriptor load_state(const std::string& path, double tol = 1e-9);
void save_state(const std::string& path, const StateDescriptor& s);

// Plans: dim, tolerance, optional endpoints, ordered steps.  Level and basis
// indices are 1-based on disk.
json plan_to_json(const NavigationPlan& plan);
NavigationPlan plan_from_json(const json& j, double tol = 1e-9);
NavigationPlan load_plan(const std::string& path, double tol = 1e-9);
void save_plan(const std::string& path, const NavigationPlan& plan);

// Pulse programs: ordered entries (pulse sets, markers, incoherent steps).
json program_to_json(const PulseProgram& prog);
PulseProgram program_from_json(const json& j, double tol = 1e-9);
PulseProgram load_program(const std::string& path, double tol = 1e-9);
void save_program(const std::string& path, const PulseProgram& prog);

// CSV table: t, qunit populations, ancilla population, qunit coherences
// (dim <= 6), and mismatch when present.
void write_trajectory_csv(std::ostream& os, const Trajectory& tr,
                          Eigen::Index dim);
void save_trajectory_csv(const std::string& path, const Trajectory& tr,
                         Eigen::Index dim);

}  // namespace qnav::io
