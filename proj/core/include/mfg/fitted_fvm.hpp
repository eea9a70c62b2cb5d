#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// B(x) = x / (e^x - 1), continuously extended by B(0) = 1. Strictly
/// positive, and B(-x) - B(x) = x for every x.
double bernoulli(double x);

/// Exponentially fitted flux weights for one dual edge: the flux of
/// J = a u' + b u across the edge between nodes i and i+1 is
/// w_high * u_{i+1} - w_low * u_i. Both weights are positive and their
/// difference equals b, so constants are advected exactly and the scheme
/// upwinds automatically when |b| h >> a.
struct EdgeFluxCoeffs {
    double w_low;
    double w_high;
};

EdgeFluxCoeffs edge_flux_coeffs(double b_edge, double a, double h);

/// How the two closing faces of the domain are treated.
///  - zero_flux: no flux of any kind crosses e_min or e_max (conservative;
///    the density solver's default).
///  - advective_boundary: the diffusive flux is suppressed at the faces but
///    the drift term b*u still crosses them, using the face drift values
///    supplied to assemble_operator.
enum class BoundaryClosure { zero_flux, advective_boundary };

/// Cell-integrated spatial operator D with rows
///   (D u)_i = -(flux out of cell i) + c_i l_i u_i,
/// stored as tridiagonal bands. sub[i] is row i+1/column i, sup[i] is row
/// i/column i+1. Column j of D sums to c_j l_j exactly, which is what makes
/// the forward solver conserve mass when c = 0.
struct OperatorAssembly {
    std::vector<double> sub;  // size N
    std::vector<double> diag; // size N+1
    std::vector<double> sup;  // size N

    std::vector<double> drift_edges;    // the b values used, size N
    std::vector<double> reaction_nodes; // the c values used, size N+1
    double diffusion = 0.0;

    std::size_t size() const { return diag.size(); }
};

OperatorAssembly assemble_operator(std::span<const double> drift_edges,
                                   std::span<const double> reaction_nodes, double diffusion,
                                   const SpaceGrid& grid,
                                   BoundaryClosure closure = BoundaryClosure::zero_flux,
                                   std::pair<double, double> face_drift = {0.0, 0.0});

/// (D u) for the assembled operator.
std::vector<double> apply_operator(const OperatorAssembly& op, std::span<const double> u);

struct TridiagonalMatrix {
    std::vector<double> sub;  // size n-1, row i+1/column i
    std::vector<double> diag; // size n
    std::vector<double> sup;  // size n-1, row i/column i+1

    std::size_t size() const { return diag.size(); }
};

/// theta * D + diag(l_i / step): the matrix each implicit stage inverts.
/// step is the positive time-step magnitude.
TridiagonalMatrix implicit_matrix(const OperatorAssembly& op, const SpaceGrid& grid, double step,
                                  double theta);

std::vector<double> apply(const TridiagonalMatrix& m, std::span<const double> x);

/// Structural M-matrix test: nonpositive off-diagonals, positive diagonal,
/// and weak column diagonal dominance with at least one strict column.
/// Dominance margins within 1e-12 of the largest matrix entry are treated
/// as zero to absorb assembly roundoff.
struct MMatrixReport {
    bool off_diagonal_ok = false;
    bool diagonal_ok = false;
    bool dominance_ok = false;

    double worst_off_diagonal = 0.0; // largest off-diagonal entry
    std::size_t worst_off_diagonal_at = 0;
    double min_diagonal = 0.0;
    std::size_t min_diagonal_at = 0;
    double min_column_margin = 0.0; // smallest column sum
    std::size_t min_column_margin_at = 0;

    bool pass() const { return off_diagonal_ok && diagonal_ok && dominance_ok; }
};

MMatrixReport is_m_matrix(const TridiagonalMatrix& m);

struct TridiagonalSystem {
    TridiagonalMatrix matrix;
    std::vector<double> rhs;
};

/// Thomas elimination. Throws SolverError on a vanishing pivot; the M-matrix
/// property of the stepping matrices rules that out in normal operation.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

} // namespace mfg
