#include "mfg/gradient.hpp"

#include <stdexcept>

namespace mfg {

std::vector<double> node_derivative(std::span<const double> u, const SpaceGrid& grid) {
    const std::size_t n = grid.num_intervals();
    if (u.size() != n + 1) throw std::invalid_argument("node_derivative: sample count does not match grid");
    std::vector<double> d(n + 1);
    for (std::size_t i = 1; i < n; ++i)
        d[i] = (u[i + 1] - u[i - 1]) / (grid.steps[i - 1] + grid.steps[i]);
    const double h0 = grid.steps.front();
    const double hn = grid.steps.back();
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h0);
    d[n] = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * hn);
    return d;
}

std::vector<double> edge_derivative(std::span<const double> u, const SpaceGrid& grid) {
    const std::size_t n = grid.num_intervals();
    if (u.size() != n + 1) throw std::invalid_argument("edge_derivative: sample count does not match grid");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (u[i + 1] - u[i]) / grid.steps[i];
    return d;
}

std::vector<double> drift_from_value(std::span<const double> value_level, const SpaceGrid& grid) {
    std::vector<double> tau = node_derivative(value_level, grid);
    for (double& t : tau) t = -t;
    return tau;
}

ControlField control_from_value(const Field& value, const SpaceGrid& grid) {
    ControlField tau(value.num_levels(), value.num_nodes());
    for (std::size_t k = 0; k < value.num_levels(); ++k) {
        const auto v = value.level(k);
        const std::vector<double> nodes = drift_from_value(v, grid);
        auto out_nodes = tau.nodes.level(k);
        std::copy(nodes.begin(), nodes.end(), out_nodes.begin());
        auto out_edges = tau.edge_level(k);
        for (std::size_t i = 0; i < tau.num_edges; ++i)
            out_edges[i] = -(v[i + 1] - v[i]) / grid.steps[i];
    }
    return tau;
}

} // namespace mfg
