#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mfg/coupling.hpp"
#include "mfg/field.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// Cell-weighted L1 distance between two node-sampled densities.
double l1_distance(std::span<const double> a, std::span<const double> b, const SpaceGrid& grid);

struct ConvergenceLevel {
    int exponent = 0;          // grid has 2^exponent intervals and time steps
    std::size_t intervals = 0;
    double h = 0.0;            // mesh width (E_max - E_min) / intervals
    double error = 0.0;        // sup-norm of v(0, .) against the restricted reference
    bool converged = false;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    int reference_exponent = 0;
    double fitted_order = 0.0; // least-squares slope of log2(error) against exponent, negated
    bool all_converged = false;
};

/// Solve the coupled system on nested dyadic grids and compare the value
/// surface at t = 0 of each level against the restriction of a finer
/// reference run. Levels whose equilibrium solve fails keep error = NaN and
/// are excluded from the fit.
ConvergenceReport convergence_study(int exp_min, int exp_max, int exp_ref,
                                    const SolverConfig& base, const ModelParams& params,
                                    const PriceSchedule& schedule, const InitialDensity& initial);

struct McOptions {
    std::size_t chunk_size = 8192;
    unsigned jobs = 1;
};

struct McResult {
    std::vector<double> density;    // dual-cell density at the horizon
    std::vector<long long> counts;  // per-cell particle counts at the horizon
    std::size_t particles = 0;
    std::uint64_t seed = 0;
    int substeps = 0;
};

/// Euler-Maruyama particle simulation of the controlled emission dynamics,
/// reflected at both ends of the band. The control field is piecewise
/// constant in time (held over each solver step, taken from the level at the
/// step's start) and linearly interpolated in space. Each particle owns an
/// RNG stream derived from (seed, particle index) and results are reduced
/// through integer per-cell counts, so the output is bit-identical for any
/// chunk size and any number of jobs.
McResult simulate_particles(const Field& tau, const InitialDensity& initial,
                            std::size_t particles, int substeps_per_level, std::uint64_t seed,
                            const SpaceGrid& grid, const TimeGrid& times,
                            const ModelParams& params, const McOptions& options = {});

/// Population-average discounted flow payoff of a solved equilibrium:
/// trapezoid rule in time over the cell-weighted spatial sums of
/// running_payoff * m.
double discounted_payoff(const Field& m, const Field& tau_nodes, const PriceSchedule& schedule,
                         const SpaceGrid& grid, const TimeGrid& times, const ModelParams& params);

/// Share of the final density's mass sitting strictly below the given
/// emission level.
double mass_below(std::span<const double> m, double threshold, const SpaceGrid& grid);

} // namespace mfg
