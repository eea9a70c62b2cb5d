#include "mfg/kfp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfg/errors.hpp"
#include "step_common.hpp"

namespace mfg {

namespace {

OperatorAssembly forward_operator(const DriftLevel& level, const SpaceGrid& grid,
                                  const ModelParams& params, BoundaryClosure closure) {
    // Drift +tau: abatement moves emissions downward, so under the sign
    // convention of the flux J = a u' + b u the density advects toward e_min.
    const std::vector<double> reaction(grid.num_nodes(), 0.0);
    std::pair<double, double> face_drift{0.0, 0.0};
    if (closure == BoundaryClosure::advective_boundary && !level.tau_nodes.empty())
        face_drift = {level.tau_nodes.front(), level.tau_nodes.back()};
    return assemble_operator(level.tau_edges, reaction, params.diffusion(), grid, closure,
                             face_drift);
}

} // namespace

std::vector<double> kfp_step(std::span<const double> m_earlier, const DriftLevel& at_earlier,
                             const DriftLevel& at_later, double theta, double step,
                             const SpaceGrid& grid, const ModelParams& params,
                             BoundaryClosure closure, SolveDiagnostics* diagnostics,
                             std::size_t out_time_level) {
    const std::size_t n = grid.num_intervals();
    if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0.5, 1]");
    if (!(step > 0.0)) throw std::invalid_argument("kfp_step: step must be positive");
    if (m_earlier.size() != n + 1)
        throw std::invalid_argument("kfp_step: density size does not match grid");
    if (at_later.tau_edges.size() != n)
        throw std::invalid_argument("kfp_step: drift sizes do not match grid");

    const OperatorAssembly d_later = forward_operator(at_later, grid, params, closure);
    const TridiagonalMatrix lhs = implicit_matrix(d_later, grid, step, theta);
    detail::check_implicit_matrix(lhs, diagnostics, out_time_level);

    std::vector<double> rhs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) rhs[i] = grid.cell_widths[i] / step * m_earlier[i];
    if (theta < 1.0) {
        if (at_earlier.tau_edges.size() != n)
            throw std::invalid_argument("kfp_step: drift sizes do not match grid");
        const OperatorAssembly d_earlier = forward_operator(at_earlier, grid, params, closure);
        const std::vector<double> dm = apply_operator(d_earlier, m_earlier);
        for (std::size_t i = 0; i <= n; ++i) rhs[i] -= (1.0 - theta) * dm[i];
    }
    return solve_tridiagonal({lhs, rhs});
}

double total_mass(std::span<const double> m, const SpaceGrid& grid) {
    if (m.size() != grid.num_nodes()) throw std::invalid_argument("total_mass: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += grid.cell_widths[i] * m[i];
    return s;
}

Field solve_kfp(const ControlField& tau, std::span<const double> m0, const SpaceGrid& grid,
                const TimeGrid& times, const ModelParams& params, const KfpOptions& options) {
    const std::size_t n = grid.num_intervals();
    const std::size_t k_steps = times.num_steps();
    if (m0.size() != n + 1) throw std::invalid_argument("solve_kfp: initial density does not match grid");
    if (tau.nodes.num_levels() != k_steps + 1 || tau.nodes.num_nodes() != n + 1)
        throw std::invalid_argument("solve_kfp: control field does not match the grids");

    SolveDiagnostics* diag = options.diagnostics;
    Field m(FieldKind::density, k_steps + 1, n + 1, 0.0);
    {
        auto dst = m.level(k_steps);
        std::copy(m0.begin(), m0.end(), dst.begin());
    }
    if (diag != nullptr)
        diag->max_mass_drift = std::max(diag->max_mass_drift, std::abs(total_mass(m0, grid) - 1.0));

    // Level k sits earlier in physical time than level k-1.
    for (std::size_t k = k_steps; k-- > 0;) {
        const double step = times.levels[k] - times.levels[k + 1];
        const DriftLevel earlier{tau.nodes.level(k + 1), tau.edge_level(k + 1)};
        const DriftLevel later{tau.nodes.level(k), tau.edge_level(k)};
        std::vector<double> next = kfp_step(m.level(k + 1), earlier, later, options.theta, step,
                                            grid, params, options.closure, diag, k);

        double undershoot = 0.0;
        long clipped = 0;
        for (double& x : next) {
            if (x < 0.0) {
                undershoot = std::min(undershoot, x);
                x = 0.0;
                ++clipped;
            }
        }
        if (clipped > 0) {
            const double mass = total_mass(next, grid);
            if (!(mass > 0.0)) throw SolverError("solve_kfp: density level lost all mass");
            for (double& x : next) x /= mass;
            if (diag != nullptr) {
                diag->clip_count += clipped;
                diag->worst_undershoot = std::min(diag->worst_undershoot, undershoot);
            }
            log::debug("clipped %ld negative density samples at time level %zu (worst %.3e)",
                       clipped, k, undershoot);
        }
        if (diag != nullptr)
            diag->max_mass_drift = std::max(diag->max_mass_drift, std::abs(total_mass(next, grid) - 1.0));
        auto dst = m.level(k);
        std::copy(next.begin(), next.end(), dst.begin());
    }
    return m;
}

} // namespace mfg
