#pragma once

#include "ecofire/simulation.hpp"

#include <ostream>
#include <span>
#include <string>

namespace ecofire {

// 17 significant digits, "%.17g" style.
std::string format_double(double x);

// Columns t,f,v,w.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// Long form, columns t,x,f,v,w; one row per grid point per snapshot.
void write_fields_csv(std::ostream& os, std::span<const FieldState> snapshots);

}  // namespace ecofire
