#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfg {

std::size_t SpaceGrid::cell_index(double e) const {
    if (!(e >= lower() && e <= upper())) throw std::domain_error("cell_index: point outside the grid");
    // First edge strictly above e, minus one; edges[0] = lower() so the
    // iterator is always past the first element.
    auto it = std::upper_bound(edges.begin(), edges.end(), e);
    std::size_t i = static_cast<std::size_t>(it - edges.begin()) - 1;
    return std::min(i, num_nodes() - 1);
}

SpaceGrid make_space_grid(std::size_t n_intervals, double e_min, double e_max) {
    if (n_intervals < 2) throw std::invalid_argument("make_space_grid: need at least 2 intervals");
    if (!(e_min < e_max)) throw std::invalid_argument("make_space_grid: e_min must be below e_max");

    SpaceGrid g;
    const std::size_t n = n_intervals;
    const double h = (e_max - e_min) / static_cast<double>(n);

    g.nodes.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g.nodes[i] = e_min + h * static_cast<double>(i);
    g.nodes.back() = e_max;

    g.edges.resize(n + 2);
    g.edges.front() = e_min;
    g.edges.back() = e_max;
    for (std::size_t i = 1; i <= n; ++i) g.edges[i] = 0.5 * (g.nodes[i - 1] + g.nodes[i]);

    g.steps.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.steps[i] = g.nodes[i + 1] - g.nodes[i];

    g.cell_widths.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g.cell_widths[i] = g.edges[i + 1] - g.edges[i];

    return g;
}

TimeGrid make_time_grid(std::size_t n_steps, double horizon) {
    if (n_steps < 1) throw std::invalid_argument("make_time_grid: need at least 1 step");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("make_time_grid: horizon must be positive and finite");

    TimeGrid g;
    const std::size_t k = n_steps;
    g.levels.resize(k + 1);
    for (std::size_t j = 0; j <= k; ++j)
        g.levels[j] = horizon * (1.0 - static_cast<double>(j) / static_cast<double>(k));
    g.levels.front() = horizon;
    g.levels.back() = 0.0;

    g.steps.resize(k);
    for (std::size_t j = 0; j < k; ++j) g.steps[j] = g.levels[j + 1] - g.levels[j];
    return g;
}

} // namespace mfg
