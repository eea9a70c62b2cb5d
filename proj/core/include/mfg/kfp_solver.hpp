#pragma once

#include <span>

#include "mfg/diagnostics.hpp"
#include "mfg/field.hpp"
#include "mfg/fitted_fvm.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// Control samples of one time level, as the forward solver needs them: the
/// edge values drive the flux, the node values only supply the face drift
/// when the advective boundary closure is selected.
struct DriftLevel {
    std::span<const double> tau_nodes;
    std::span<const double> tau_edges;
};

struct KfpOptions {
    double theta = 0.5;
    BoundaryClosure closure = BoundaryClosure::zero_flux;
    SolveDiagnostics* diagnostics = nullptr;
};

/// One forward stage: density at time t to density at t + step (step > 0).
/// The implicit side of the theta scheme uses at_later. The raw solution is
/// returned without sign fixups; out_time_level only labels diagnostics.
std::vector<double> kfp_step(std::span<const double> m_earlier, const DriftLevel& at_earlier,
                             const DriftLevel& at_later, double theta, double step,
                             const SpaceGrid& grid, const ModelParams& params,
                             BoundaryClosure closure = BoundaryClosure::zero_flux,
                             SolveDiagnostics* diagnostics = nullptr, std::size_t out_time_level = 0);

/// Forward sweep from the initial density (stored at the last time level,
/// t = 0) to the horizon (level 0). Negative samples are clipped to zero and
/// the level renormalized, with every incident counted in the diagnostics;
/// the sweep never rejects a level for small undershoots. Throws SolverError
/// if a level loses all mass or a stage is singular.
Field solve_kfp(const ControlField& tau, std::span<const double> m0, const SpaceGrid& grid,
                const TimeGrid& times, const ModelParams& params, const KfpOptions& options = {});

/// Cell-weighted total mass of one density level.
double total_mass(std::span<const double> m, const SpaceGrid& grid);

} // namespace mfg
