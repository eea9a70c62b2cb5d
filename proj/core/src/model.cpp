#include "mfg/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mfg {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) bad(std::string(name) + " must be finite");
}

} // namespace

void ModelParams::validate() const {
    require_finite(e_min, "e_min");
    require_finite(e_max, "e_max");
    require_finite(horizon, "horizon");
    require_finite(sigma, "sigma");
    require_finite(rate, "rate");
    require_finite(revenue_scale, "revenue_scale");
    require_finite(congestion, "congestion");
    require_finite(quota, "quota");
    require_finite(revenue_vertex, "revenue_vertex");
    if (!(e_min < e_max)) bad("e_min must be below e_max");
    if (!(horizon > 0.0)) bad("horizon must be positive");
    if (!(sigma > 0.0)) bad("sigma must be positive");
    if (rate < 0.0) bad("rate must be nonnegative");
    if (!(revenue_scale > 0.0)) bad("revenue_scale must be positive");
    if (congestion < 0.0) bad("congestion must be nonnegative");
}

double price_at(const PriceSchedule& schedule, double t, double horizon) {
    if (!(t >= 0.0 && t <= horizon)) throw std::domain_error("price_at: time outside [0, horizon]");
    if (const auto* c = std::get_if<ConstantPrice>(&schedule)) return c->value;
    const auto& r = std::get<RampPrice>(schedule);
    if (t <= r.t_start) return 0.0;
    if (t >= r.t_end) return r.s_max;
    return r.s_max * (t - r.t_start) / (r.t_end - r.t_start);
}

void validate(const PriceSchedule& schedule, double horizon) {
    if (const auto* c = std::get_if<ConstantPrice>(&schedule)) {
        if (!std::isfinite(c->value)) bad("price must be finite");
        return;
    }
    const auto& r = std::get<RampPrice>(schedule);
    if (!std::isfinite(r.t_start) || !std::isfinite(r.t_end) || !std::isfinite(r.s_max))
        bad("ramp parameters must be finite");
    if (!(r.t_start < r.t_end)) bad("ramp t_start must be below t_end");
    if (r.t_start < 0.0 || r.t_end > horizon) bad("ramp must lie inside [0, horizon]");
}

std::vector<double> sample_initial_density(const InitialDensity& kind, const SpaceGrid& grid) {
    const std::size_t n = grid.num_nodes();
    std::vector<double> m(n);
    if (const auto* g = std::get_if<TruncatedNormal>(&kind)) {
        const double inv2v = 1.0 / (2.0 * g->variance);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = grid.nodes[i] - g->mean;
            m[i] = std::exp(-d * d * inv2v);
        }
    } else {
        const auto& t = std::get<Tent>(kind);
        for (std::size_t i = 0; i < n; ++i) {
            const double e = grid.nodes[i];
            m[i] = e <= t.apex ? (e - grid.lower()) / (t.apex - grid.lower())
                               : (grid.upper() - e) / (grid.upper() - t.apex);
        }
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += grid.cell_widths[i] * m[i];
    if (!(mass > 0.0)) bad("initial density has no mass on the grid");
    for (double& v : m) v /= mass;
    return m;
}

void validate(const InitialDensity& kind, const ModelParams& params) {
    if (const auto* g = std::get_if<TruncatedNormal>(&kind)) {
        if (!std::isfinite(g->mean)) bad("initial density mean must be finite");
        if (!(g->variance > 0.0) || !std::isfinite(g->variance)) bad("initial density variance must be positive");
        return;
    }
    const auto& t = std::get<Tent>(kind);
    if (!(t.apex > params.e_min && t.apex < params.e_max))
        bad("tent apex must lie strictly inside the emission band");
}

double revenue(double e, double m, const ModelParams& params) {
    return (params.revenue_vertex * e - 0.5 * e * e) / (params.revenue_scale + params.congestion * m);
}

double trading_cost(double e, double s, const ModelParams& params) { return s * (e - params.quota); }

double running_payoff(double e, double tau, double m, double s, const ModelParams& params) {
    return revenue(e, m, params) - abatement_cost(tau) - trading_cost(e, s, params);
}

double adjoint_source(double e, double tau, double m, double s, const ModelParams& params) {
    const double gross = params.revenue_vertex * e - 0.5 * e * e;
    const double damp = params.revenue_scale + params.congestion * m;
    const double crowd_term = params.congestion * m * gross / (damp * damp);
    return running_payoff(e, tau, m, s, params) - crowd_term;
}

} // namespace mfg
