#pragma once

#include <cstddef>
#include <vector>

namespace mfg {

/// Primal nodes plus the dual control-volume mesh on [e_min, e_max].
///
/// Nodes E_0 < ... < E_N carry the unknowns. Dual edges sit at the midpoints
/// of adjacent nodes and the mesh is closed by E_{-1/2} = e_min and
/// E_{N+1/2} = e_max, so node i owns the cell [edges[i], edges[i+1]] of width
/// l_i and the cells tile the domain exactly. On a uniform mesh the two
/// boundary cells have width h/2 and the interior ones width h.
struct SpaceGrid {
    std::vector<double> nodes;       // size N+1
    std::vector<double> edges;       // size N+2; edges[i] is the lower face of cell i
    std::vector<double> cell_widths; // size N+1; l_i = edges[i+1] - edges[i]
    std::vector<double> steps;       // size N;   h_i = nodes[i+1] - nodes[i]

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_intervals() const { return steps.size(); }
    double lower() const { return nodes.front(); }
    double upper() const { return nodes.back(); }

    /// Index of the cell [edges[i], edges[i+1]) containing e; the upper
    /// boundary belongs to the last cell. Requires e in [lower(), upper()].
    std::size_t cell_index(double e) const;
};

/// Uniform mesh with n_intervals node spacings on [e_min, e_max].
SpaceGrid make_space_grid(std::size_t n_intervals, double e_min, double e_max);

/// Time levels running backward: levels[0] = horizon, levels[K] = 0, so the
/// step t_{k+1} - t_k is negative. Backward (value) sweeps walk k = 0..K-1
/// forward through this array; forward (density) sweeps walk it in reverse.
struct TimeGrid {
    std::vector<double> levels; // size K+1, strictly decreasing
    std::vector<double> steps;  // size K, all negative

    std::size_t num_levels() const { return levels.size(); }
    std::size_t num_steps() const { return steps.size(); }
    double horizon() const { return levels.front(); }
};

TimeGrid make_time_grid(std::size_t n_steps, double horizon);

} // namespace mfg
