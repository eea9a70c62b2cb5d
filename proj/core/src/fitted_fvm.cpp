#include "mfg/fitted_fvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mfg/errors.hpp"

namespace mfg {

double bernoulli(double x) {
    // Below 1e-6 the quadratic Taylor truncation error is ~x^4/720 < 1e-27,
    // far under double precision, and the branch removes the 0/0 at x = 0.
    if (std::abs(x) < 1e-6) return 1.0 - 0.5 * x + x * x / 12.0;
    return x / std::expm1(x);
}

EdgeFluxCoeffs edge_flux_coeffs(double b_edge, double a, double h) {
    if (!(a > 0.0)) throw std::invalid_argument("edge_flux_coeffs: diffusion must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("edge_flux_coeffs: edge length must be positive");
    const double x = b_edge * h / a;
    const double scale = a / h;
    return {scale * bernoulli(x), scale * bernoulli(-x)};
}

OperatorAssembly assemble_operator(std::span<const double> drift_edges,
                                   std::span<const double> reaction_nodes, double diffusion,
                                   const SpaceGrid& grid, BoundaryClosure closure,
                                   std::pair<double, double> face_drift) {
    const std::size_t n = grid.num_intervals();
    if (drift_edges.size() != n)
        throw std::invalid_argument("assemble_operator: drift sample count does not match edges");
    if (reaction_nodes.size() != n + 1)
        throw std::invalid_argument("assemble_operator: reaction sample count does not match nodes");
    if (!(diffusion > 0.0)) throw std::invalid_argument("assemble_operator: diffusion must be positive");

    OperatorAssembly op;
    op.diffusion = diffusion;
    op.drift_edges.assign(drift_edges.begin(), drift_edges.end());
    op.reaction_nodes.assign(reaction_nodes.begin(), reaction_nodes.end());
    op.sub.assign(n, 0.0);
    op.diag.assign(n + 1, 0.0);
    op.sup.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const auto [w_low, w_high] = edge_flux_coeffs(drift_edges[i], diffusion, grid.steps[i]);
        // Flux out through the upper face of cell i and in through the lower
        // face of cell i+1.
        op.diag[i] += w_low;
        op.sup[i] = -w_high;
        op.sub[i] = -w_low;
        op.diag[i + 1] += w_high;
    }
    for (std::size_t i = 0; i <= n; ++i) op.diag[i] += reaction_nodes[i] * grid.cell_widths[i];

    if (closure == BoundaryClosure::advective_boundary) {
        // Drift still crosses the closing faces: flux b*u_0 through the lower
        // face enters cell 0's balance with a plus sign, b*u_N through the
        // upper face with a minus sign.
        op.diag.front() += face_drift.first;
        op.diag.back() -= face_drift.second;
    }
    return op;
}

std::vector<double> apply_operator(const OperatorAssembly& op, std::span<const double> u) {
    const std::size_t n = op.size();
    if (u.size() != n) throw std::invalid_argument("apply_operator: size mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = op.diag[i] * u[i];
        if (i > 0) s += op.sub[i - 1] * u[i - 1];
        if (i + 1 < n) s += op.sup[i] * u[i + 1];
        y[i] = s;
    }
    return y;
}

TridiagonalMatrix implicit_matrix(const OperatorAssembly& op, const SpaceGrid& grid, double step,
                                  double theta) {
    if (!(step > 0.0)) throw std::invalid_argument("implicit_matrix: step must be positive");
    const std::size_t n = op.size();
    if (grid.num_nodes() != n) throw std::invalid_argument("implicit_matrix: grid does not match operator");
    TridiagonalMatrix m;
    m.sub.resize(n - 1);
    m.diag.resize(n);
    m.sup.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m.sub[i] = theta * op.sub[i];
        m.sup[i] = theta * op.sup[i];
    }
    for (std::size_t i = 0; i < n; ++i) m.diag[i] = theta * op.diag[i] + grid.cell_widths[i] / step;
    return m;
}

std::vector<double> apply(const TridiagonalMatrix& m, std::span<const double> x) {
    const std::size_t n = m.size();
    if (x.size() != n) throw std::invalid_argument("apply: size mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = m.diag[i] * x[i];
        if (i > 0) s += m.sub[i - 1] * x[i - 1];
        if (i + 1 < n) s += m.sup[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

MMatrixReport is_m_matrix(const TridiagonalMatrix& m) {
    const std::size_t n = m.size();
    MMatrixReport r;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(m.diag[i]));
    for (std::size_t i = 0; i + 1 < n; ++i)
        scale = std::max({scale, std::abs(m.sub[i]), std::abs(m.sup[i])});
    const double slack = 1e-12 * scale;

    r.worst_off_diagonal = 0.0;
    r.off_diagonal_ok = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (m.sup[i] > r.worst_off_diagonal) {
            r.worst_off_diagonal = m.sup[i];
            r.worst_off_diagonal_at = i;
        }
        if (m.sub[i] > r.worst_off_diagonal) {
            r.worst_off_diagonal = m.sub[i];
            r.worst_off_diagonal_at = i + 1;
        }
    }
    r.off_diagonal_ok = r.worst_off_diagonal <= slack;

    r.min_diagonal = m.diag[0];
    r.min_diagonal_at = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (m.diag[i] < r.min_diagonal) {
            r.min_diagonal = m.diag[i];
            r.min_diagonal_at = i;
        }
    r.diagonal_ok = r.min_diagonal > 0.0;

    bool any_strict = false;
    r.min_column_margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        double margin = m.diag[j];
        if (j > 0) margin += m.sup[j - 1];
        if (j + 1 < n) margin += m.sub[j];
        if (margin < r.min_column_margin) {
            r.min_column_margin = margin;
            r.min_column_margin_at = j;
        }
        if (margin > slack) any_strict = true;
    }
    r.dominance_ok = r.min_column_margin >= -slack && any_strict;
    return r;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
    const auto& m = system.matrix;
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("solve_tridiagonal: empty system");
    if (m.sub.size() != n - 1 || m.sup.size() != n - 1 || system.rhs.size() != n)
        throw std::invalid_argument("solve_tridiagonal: inconsistent band sizes");

    std::vector<double> c(n - 1), d(n);
    double pivot = m.diag[0];
    if (!(std::abs(pivot) > 0.0)) throw SolverError("solve_tridiagonal: zero pivot at row 0");
    if (n > 1) c[0] = m.sup[0] / pivot;
    d[0] = system.rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = m.diag[i] - m.sub[i - 1] * c[i - 1];
        if (!(std::abs(pivot) > 0.0))
            throw SolverError("solve_tridiagonal: zero pivot at row " + std::to_string(i));
        if (i + 1 < n) c[i] = m.sup[i] / pivot;
        d[i] = (system.rhs[i] - m.sub[i - 1] * d[i - 1]) / pivot;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

} // namespace mfg
