#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfg/diagnostics.hpp"
#include "mfg/field.hpp"
#include "mfg/fitted_fvm.hpp"
#include "mfg/grid.hpp"
#include "mfg/hjb_solver.hpp"
#include "mfg/kfp_solver.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// Discretization and fixed-point knobs. theta = 1/2 is the second-order
/// scheme, theta = 1 the fully implicit one.
struct SolverConfig {
    std::size_t n_space = 64; // node intervals
    std::size_t n_time = 64;  // time steps
    double theta = 0.5;
    double tolerance = 1e-6;       // sup-norm control update that counts as converged
    std::size_t max_iterations = 100;
    double relaxation = 1.0;       // damping of the control update, in (0, 1]
    double initial_control = 0.0;  // constant control seeding the first iteration
    ControlSource control_source = ControlSource::lagged;
    BoundaryClosure density_closure = BoundaryClosure::zero_flux;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class SolveStatus { converged, max_iterations_reached, non_finite };

/// Output of the coupled solve. The density, value, and control fields all
/// span every time level; errors[j] is the sup-norm control update of
/// iteration j, so a converged run ends with errors.back() <= tolerance.
struct EquilibriumSolution {
    Field m;
    Field v;
    ControlField tau;
    std::vector<double> errors;
    std::size_t iterations = 0;
    SolveStatus status = SolveStatus::max_iterations_reached;
    std::string failure_detail;
    SolveDiagnostics diagnostics;

    bool converged() const { return status == SolveStatus::converged; }
};

/// Sup-norm over node samples of the difference of two control fields.
/// Throws std::invalid_argument on shape mismatch.
double iteration_error(const ControlField& a, const ControlField& b);

/// Damped fixed-point iteration over the control: march the density forward
/// under the current control, the value backward against that density, read
/// the next control off the value gradient, and stop once the control stops
/// moving. Never throws for non-convergence; inspect status instead.
EquilibriumSolution solve_equilibrium(const SolverConfig& solver, const ModelParams& params,
                                      const PriceSchedule& schedule, const InitialDensity& initial);

} // namespace mfg
