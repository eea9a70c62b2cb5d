#pragma once

#include <functional>
#include <span>

#include "mfg/diagnostics.hpp"
#include "mfg/field.hpp"
#include "mfg/fitted_fvm.hpp"
#include "mfg/grid.hpp"
#include "mfg/model.hpp"

namespace mfg {

/// Everything one stage of a theta step needs to know about a time level.
struct LevelCoeffs {
    double t = 0.0;
    std::span<const double> tau_nodes;
    std::span<const double> tau_edges;
    std::span<const double> m_nodes;
    double price = 0.0;
};

/// Source term f(t, E, tau, m, S). An empty function means the model's
/// adjoint source; tests substitute simple closed forms here.
using SourceFn = std::function<double(double t, double e, double tau, double m, double price)>;

/// Where the backward march takes its drift/reaction coefficients from.
///  - lagged: rebuild the control from the newest computed value level at
///    every step, so the march is self-contained. The quadratic control cost
///    makes the one-step lag a second-order perturbation, and the zero
///    terminal value makes the lag exact at the horizon.
///  - frozen: use the caller's control iterate verbatim at every stage.
enum class ControlSource { lagged, frozen };

struct HjbOptions {
    double theta = 0.5;
    ControlSource control_source = ControlSource::lagged;
    SourceFn source;
    SolveDiagnostics* diagnostics = nullptr;
};

/// One backward stage: given the value level at time t_in, produce the level
/// at t_out = t_in - step (step > 0). The implicit side of the theta scheme
/// uses coeffs_out, the explicit side coeffs_in. out_time_level only labels
/// diagnostics.
std::vector<double> hjb_step(std::span<const double> v_in, const LevelCoeffs& coeffs_in,
                             const LevelCoeffs& coeffs_out, double theta, double step,
                             const SpaceGrid& grid, const ModelParams& params,
                             const SourceFn& source = {}, SolveDiagnostics* diagnostics = nullptr,
                             std::size_t out_time_level = 0);

/// Backward sweep from the zero terminal condition over all time levels.
/// m supplies the crowd density entering the source term; tau is only read
/// in frozen mode. Throws SolverError on a singular stage.
Field solve_hjb(const Field& m, const ControlField& tau, const PriceSchedule& schedule,
                const SpaceGrid& grid, const TimeGrid& times, const ModelParams& params,
                const HjbOptions& options = {});

} // namespace mfg
