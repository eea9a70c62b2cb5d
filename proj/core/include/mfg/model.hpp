#pragma once

#include <variant>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Economic and noise constants of the producers' game.
///
/// A producer at emission level E earns revenue (vertex*E - E^2/2) damped by
/// the crowd through the factor 1/(scale + congestion*m), pays tau^2/2 to
/// abate at rate tau, and pays price*(E - quota) for allowances. Defaults
/// are the baseline experiment's values; the revenue vertex coincides with
/// the upper end of the emission band so revenue is increasing across it.
struct ModelParams {
    double e_min = 1.0;
    double e_max = 5.0;
    double horizon = 1.0;       // planning horizon T
    double sigma = 0.3;         // emission volatility
    double rate = 0.1;          // discount rate
    double revenue_scale = 10.0;
    double congestion = 0.1;
    double quota = 1.0;         // freely allocated allowance level
    double revenue_vertex = 5.0;

    double diffusion() const { return 0.5 * sigma * sigma; }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    static ModelParams baseline() { return ModelParams{}; }
};

/// Allowance price path S(t) on [0, horizon].
struct ConstantPrice {
    double value = 0.2;
};

/// Zero until t_start, linear up to s_max at t_end, flat after.
struct RampPrice {
    double t_start = 0.1;
    double t_end = 0.5;
    double s_max = 2.0;
};

using PriceSchedule = std::variant<ConstantPrice, RampPrice>;

/// Price at time t; throws std::domain_error for t outside [0, horizon].
double price_at(const PriceSchedule& schedule, double t, double horizon);

/// Throws std::invalid_argument on a malformed schedule (e.g. ramp with
/// t_start >= t_end, or knots outside [0, horizon]).
void validate(const PriceSchedule& schedule, double horizon);

/// Gaussian bump restricted to the emission band.
struct TruncatedNormal {
    double mean = 3.0;
    double variance = 0.35;
};

/// Piecewise-linear hat: zero at both ends of the band, apex in between.
struct Tent {
    double apex = 2.0;
};

using InitialDensity = std::variant<TruncatedNormal, Tent>;

/// Node samples of the initial density, rescaled so the cell-weighted total
/// mass is one.
std::vector<double> sample_initial_density(const InitialDensity& kind, const SpaceGrid& grid);

void validate(const InitialDensity& kind, const ModelParams& params);

/// Instantaneous revenue at emission level e against crowd density m.
double revenue(double e, double m, const ModelParams& params);

/// Running cost of abating at rate tau.
inline double abatement_cost(double tau) { return 0.5 * tau * tau; }

/// Net allowance expenditure at emission level e under price s.
double trading_cost(double e, double s, const ModelParams& params);

/// revenue - abatement - trading: the flow payoff a producer collects.
double running_payoff(double e, double tau, double m, double s, const ModelParams& params);

/// Source term of the backward equation: the flow payoff plus the crowd's
/// marginal revenue effect m * d(revenue)/dm, which prices in how a denser
/// crowd erodes everyone's margin.
double adjoint_source(double e, double tau, double m, double s, const ModelParams& params);

} // namespace mfg
