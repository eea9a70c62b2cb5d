#pragma once

#include <span>
#include <vector>

#include "mfg/field.hpp"
#include "mfg/grid.hpp"

namespace mfg {

/// du/dE at every node: centred differences inside, three-point one-sided
/// stencils at the ends. Exact for quadratics on a uniform mesh.
std::vector<double> node_derivative(std::span<const double> u, const SpaceGrid& grid);

/// Difference quotients (u_{i+1} - u_i)/h_i, one per node interval.
std::vector<double> edge_derivative(std::span<const double> u, const SpaceGrid& grid);

/// Abatement feedback rule: the optimal control is the negative emission
/// gradient of the value level.
std::vector<double> drift_from_value(std::span<const double> value_level, const SpaceGrid& grid);

/// Apply the feedback rule to every level of a value field, producing both
/// node and edge control samples.
ControlField control_from_value(const Field& value, const SpaceGrid& grid);

} // namespace mfg
