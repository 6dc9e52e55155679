#pragma once

#include <utility>

#include "qnav/navigation.hpp"

namespace qnav {

// Complete dephasing: kill every off-diagonal element, keep populations.
DensityMatrix apply_dephasing_map(const DensityMatrix& rho);

// Population map of a weak pulse (transition probability p) coupling `level`
// of a qutrit to an ancilla that decays back with equal branching 1/3:
// the level keeps x(1 - 2p/3) and each other level gains p x / 3.
// Input must be diagonal.
DensityMatrix apply_short_pulse_decay_map(const DensityMatrix& rho,
                                          Eigen::Index level, double p);

// Population map of fully draining `level` through the ancilla: iterating
// pump-and-decay cycles moves all of x off the level, half to each other
// level.  Input must be diagonal (qutrit).
DensityMatrix apply_long_depletion_map(const DensityMatrix& rho,
                                       Eigen::Index level);

// Pulse probabilities (p1, p2) that sculpt the spectrum {r1 >= r2 >= r3}
// (summing to 1) out of a single populated level: p1 = 2 (r2 - r3),
// p2 = 3 r3 / (r1 + 2 r3).
std::pair<double, double> spontaneous_probabilities(const RealVector& r);

// Plan from basis state `start` to the mixed target via one reflection into
// the superposition carrying the target's spectrum, complete dephasing at
// rate `gamma`, and a coherent tail.
NavigationPlan plan_dephasing_route(Eigen::Index start,
                                    const DensityMatrix& rho_f,
                                    double gamma = 2.0,
                                    Variant variant = Variant::Generalized);

// Qutrit plan from basis state `start` via spontaneous-decay sculpting:
// short pulse (p1), full depletion of the third level, short pulse (p2),
// then a coherent tail.
NavigationPlan plan_spontaneous_route(Eigen::Index start,
                                      const DensityMatrix& rho_f,
                                      Variant variant = Variant::Generalized);

}  // namespace qnav
