#include "mfg/hjb_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "mfg/gradient.hpp"
#include "step_common.hpp"

namespace mfg {

namespace {

void require_theta(double theta) {
    if (!(theta >= 0.5 && theta <= 1.0))
        throw std::invalid_argument("theta must lie in [0.5, 1]");
}

/// Drift -tau at the edges and reaction r - dtau/dE at the nodes, with the
/// derivative taken as the discrete divergence of the same edge drifts the
/// flux uses. The matching makes constants see exactly the rate r (row sums
/// r*l_i), so gradient noise in a lagged control cannot feed the mean value
/// back into the ripple, and the operator is the exact transpose of the
/// forward one for constant control.
OperatorAssembly backward_operator(std::span<const double> tau_edges, const SpaceGrid& grid,
                                   const ModelParams& params, SolveDiagnostics* diag,
                                   std::size_t time_level) {
    const std::size_t n = grid.num_intervals();
    std::vector<double> drift(n);
    for (std::size_t i = 0; i < n; ++i) drift[i] = -tau_edges[i];
    std::vector<double> reaction(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double out_high = i < n ? drift[i] : 0.0;
        const double out_low = i > 0 ? drift[i - 1] : 0.0;
        reaction[i] = params.rate + (out_high - out_low) / grid.cell_widths[i];
    }
    if (diag != nullptr) {
        for (std::size_t i = 0; i <= n; ++i)
            if (reaction[i] < 0.0) {
                diag->record_negative_reaction({diag->iteration_tag, time_level, i, reaction[i]});
                log::debug("negative reaction coefficient %.3e at time level %zu, node %zu",
                           reaction[i], time_level, i);
            }
    }
    return assemble_operator(drift, reaction, params.diffusion(), grid);
}

double default_source(double /*t*/, double e, double tau, double m, double price,
                      const ModelParams& params) {
    return adjoint_source(e, tau, m, price, params);
}

} // namespace

std::vector<double> hjb_step(std::span<const double> v_in, const LevelCoeffs& coeffs_in,
                             const LevelCoeffs& coeffs_out, double theta, double step,
                             const SpaceGrid& grid, const ModelParams& params,
                             const SourceFn& source, SolveDiagnostics* diagnostics,
                             std::size_t out_time_level) {
    const std::size_t n = grid.num_intervals();
    require_theta(theta);
    if (!(step > 0.0)) throw std::invalid_argument("hjb_step: step must be positive");
    if (v_in.size() != n + 1) throw std::invalid_argument("hjb_step: value size does not match grid");
    if (coeffs_out.tau_nodes.size() != n + 1 || coeffs_out.tau_edges.size() != n ||
        coeffs_out.m_nodes.size() != n + 1)
        throw std::invalid_argument("hjb_step: coefficient sizes do not match grid");

    const auto f = [&](double t, double e, double tau, double m, double price) {
        return source ? source(t, e, tau, m, price) : default_source(t, e, tau, m, price, params);
    };

    const OperatorAssembly d_out =
        backward_operator(coeffs_out.tau_edges, grid, params, diagnostics, out_time_level);
    const TridiagonalMatrix lhs = implicit_matrix(d_out, grid, step, theta);
    detail::check_implicit_matrix(lhs, diagnostics, out_time_level);

    std::vector<double> rhs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double l = grid.cell_widths[i];
        rhs[i] = l / step * v_in[i] +
                 theta * l *
                     f(coeffs_out.t, grid.nodes[i], coeffs_out.tau_nodes[i], coeffs_out.m_nodes[i],
                       coeffs_out.price);
    }
    if (theta < 1.0) {
        if (coeffs_in.tau_nodes.size() != n + 1 || coeffs_in.tau_edges.size() != n ||
            coeffs_in.m_nodes.size() != n + 1)
            throw std::invalid_argument("hjb_step: coefficient sizes do not match grid");
        const OperatorAssembly d_in =
            backward_operator(coeffs_in.tau_edges, grid, params, nullptr, 0);
        const std::vector<double> dv = apply_operator(d_in, v_in);
        const double w = 1.0 - theta;
        for (std::size_t i = 0; i <= n; ++i) {
            const double l = grid.cell_widths[i];
            rhs[i] += -w * dv[i] + w * l *
                                       f(coeffs_in.t, grid.nodes[i], coeffs_in.tau_nodes[i],
                                         coeffs_in.m_nodes[i], coeffs_in.price);
        }
    }
    return solve_tridiagonal({lhs, rhs});
}

Field solve_hjb(const Field& m, const ControlField& tau, const PriceSchedule& schedule,
                const SpaceGrid& grid, const TimeGrid& times, const ModelParams& params,
                const HjbOptions& options) {
    const std::size_t n = grid.num_intervals();
    const std::size_t k_steps = times.num_steps();
    require_theta(options.theta);
    if (m.num_levels() != k_steps + 1 || m.num_nodes() != n + 1)
        throw std::invalid_argument("solve_hjb: density field does not match the grids");
    const bool frozen = options.control_source == ControlSource::frozen;
    if (frozen &&
        (tau.nodes.num_levels() != k_steps + 1 || tau.nodes.num_nodes() != n + 1))
        throw std::invalid_argument("solve_hjb: control field does not match the grids");

    Field v(FieldKind::value, k_steps + 1, n + 1, 0.0); // zero terminal value at the horizon

    std::vector<double> lag_nodes, lag_edges;
    for (std::size_t k = 0; k < k_steps; ++k) {
        const double step = times.levels[k] - times.levels[k + 1];
        LevelCoeffs in;
        LevelCoeffs out;
        in.t = times.levels[k];
        out.t = times.levels[k + 1];
        in.m_nodes = m.level(k);
        out.m_nodes = m.level(k + 1);
        in.price = price_at(schedule, in.t, times.horizon());
        out.price = price_at(schedule, out.t, times.horizon());
        if (frozen) {
            in.tau_nodes = tau.nodes.level(k);
            in.tau_edges = tau.edge_level(k);
            out.tau_nodes = tau.nodes.level(k + 1);
            out.tau_edges = tau.edge_level(k + 1);
        } else {
            // Feedback control from the newest level, used at both stages.
            // The envelope property of the quadratic control cost keeps the
            // one-step lag within the scheme's second-order accuracy.
            lag_nodes = drift_from_value(v.level(k), grid);
            lag_edges = edge_derivative(v.level(k), grid);
            for (double& d : lag_edges) d = -d;
            in.tau_nodes = lag_nodes;
            in.tau_edges = lag_edges;
            out.tau_nodes = lag_nodes;
            out.tau_edges = lag_edges;
        }
        const std::vector<double> next =
            hjb_step(v.level(k), in, out, options.theta, step, grid, params, options.source,
                     options.diagnostics, k + 1);
        auto dst = v.level(k + 1);
        std::copy(next.begin(), next.end(), dst.begin());
    }
    return v;
}

} // namespace mfg
