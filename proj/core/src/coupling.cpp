#include "mfg/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mfg/errors.hpp"
#include "mfg/gradient.hpp"
#include "mfg/log.hpp"

namespace mfg {

void SolverConfig::validate() const {
    if (n_space < 2) throw std::invalid_argument("n_space must be at least 2");
    if (n_time < 1) throw std::invalid_argument("n_time must be at least 1");
    if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0.5, 1]");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (!(relaxation > 0.0 && relaxation <= 1.0))
        throw std::invalid_argument("relaxation must lie in (0, 1]");
    if (!std::isfinite(initial_control)) throw std::invalid_argument("initial_control must be finite");
}

double iteration_error(const ControlField& a, const ControlField& b) {
    if (a.nodes.num_levels() != b.nodes.num_levels() || a.nodes.num_nodes() != b.nodes.num_nodes())
        throw std::invalid_argument("iteration_error: control fields have different shapes");
    double worst = 0.0;
    const auto fa = a.nodes.flat();
    const auto fb = b.nodes.flat();
    for (std::size_t i = 0; i < fa.size(); ++i) worst = std::max(worst, std::abs(fa[i] - fb[i]));
    return worst;
}

namespace {

/// First non-finite sample, rendered for the failure report.
bool describe_non_finite(const Field& f, const char* name, std::size_t iteration,
                         std::string* detail) {
    const auto bad = f.first_non_finite();
    if (!bad) return false;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "non-finite %s sample at iteration %zu, time level %zu, node %zu (%g)", name,
                  iteration, bad->level, bad->node, bad->value);
    *detail = buf;
    return true;
}

} // namespace

EquilibriumSolution solve_equilibrium(const SolverConfig& solver, const ModelParams& params,
                                      const PriceSchedule& schedule, const InitialDensity& initial) {
    solver.validate();
    params.validate();
    validate(schedule, params.horizon);
    validate(initial, params);

    const SpaceGrid grid = make_space_grid(solver.n_space, params.e_min, params.e_max);
    const TimeGrid times = make_time_grid(solver.n_time, params.horizon);
    const std::vector<double> m0 = sample_initial_density(initial, grid);

    EquilibriumSolution out;
    out.tau = ControlField(times.num_levels(), grid.num_nodes(), solver.initial_control);

    KfpOptions kfp_options;
    kfp_options.theta = solver.theta;
    kfp_options.closure = solver.density_closure;
    kfp_options.diagnostics = &out.diagnostics;

    HjbOptions hjb_options;
    hjb_options.theta = solver.theta;
    hjb_options.control_source = solver.control_source;
    hjb_options.diagnostics = &out.diagnostics;

    for (std::size_t it = 0; it < solver.max_iterations; ++it) {
        out.diagnostics.iteration_tag = it;
        try {
            out.m = solve_kfp(out.tau, m0, grid, times, params, kfp_options);
            out.v = solve_hjb(out.m, out.tau, schedule, grid, times, params, hjb_options);
        } catch (const SolverError& e) {
            out.iterations = it + 1;
            out.status = SolveStatus::non_finite;
            out.failure_detail = e.what();
            return out;
        }
        if (describe_non_finite(out.m, "density", it, &out.failure_detail) ||
            describe_non_finite(out.v, "value", it, &out.failure_detail)) {
            out.iterations = it + 1;
            out.status = SolveStatus::non_finite;
            return out;
        }

        const ControlField candidate = control_from_value(out.v, grid);
        if (describe_non_finite(candidate.nodes, "control", it, &out.failure_detail)) {
            out.iterations = it + 1;
            out.status = SolveStatus::non_finite;
            return out;
        }

        ControlField next(times.num_levels(), grid.num_nodes());
        const double w = solver.relaxation;
        {
            const auto prev_nodes = out.tau.nodes.flat();
            const auto cand_nodes = candidate.nodes.flat();
            auto next_nodes = next.nodes.flat();
            for (std::size_t i = 0; i < prev_nodes.size(); ++i)
                next_nodes[i] = (1.0 - w) * prev_nodes[i] + w * cand_nodes[i];
            for (std::size_t i = 0; i < out.tau.edges.size(); ++i)
                next.edges[i] = (1.0 - w) * out.tau.edges[i] + w * candidate.edges[i];
        }

        const double err = iteration_error(next, out.tau);
        out.errors.push_back(err);
        out.tau = std::move(next);
        out.iterations = it + 1;
        log::info("iteration %zu: control update %.3e", it, err);

        if (err <= solver.tolerance) {
            out.status = SolveStatus::converged;
            return out;
        }
    }
    out.status = SolveStatus::max_iterations_reached;
    char buf[96];
    std::snprintf(buf, sizeof buf, "control update still %.3e after %zu iterations",
                  out.errors.empty() ? 0.0 : out.errors.back(), out.iterations);
    out.failure_detail = buf;
    return out;
}

} // namespace mfg
