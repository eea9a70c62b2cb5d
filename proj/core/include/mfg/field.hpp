#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mfg {

enum class FieldKind { density, value, control };

/// Space-time sample array, one row per time level. Row 0 holds the terminal
/// time (the horizon) and the last row holds t = 0, matching TimeGrid.
class Field {
  public:
    Field() = default;
    Field(FieldKind kind, std::size_t num_levels, std::size_t num_nodes, double fill = 0.0)
        : kind_(kind), levels_(num_levels), nodes_(num_nodes), data_(num_levels * num_nodes, fill) {}

    double& operator()(std::size_t level, std::size_t node) { return data_[level * nodes_ + node]; }
    double operator()(std::size_t level, std::size_t node) const { return data_[level * nodes_ + node]; }

    std::span<double> level(std::size_t k) { return {data_.data() + k * nodes_, nodes_}; }
    std::span<const double> level(std::size_t k) const { return {data_.data() + k * nodes_, nodes_}; }

    std::size_t num_levels() const { return levels_; }
    std::size_t num_nodes() const { return nodes_; }
    FieldKind kind() const { return kind_; }
    std::span<const double> flat() const { return data_; }
    std::span<double> flat() { return data_; }

    struct BadSample {
        std::size_t level;
        std::size_t node;
        double value;
    };

    /// First NaN/Inf in level order, if any.
    std::optional<BadSample> first_non_finite() const;

  private:
    FieldKind kind_ = FieldKind::value;
    std::size_t levels_ = 0;
    std::size_t nodes_ = 0;
    std::vector<double> data_;
};

/// Control samples at the nodes together with the edge-centred drift values
/// the flux assembly consumes. Edge row k has one entry per node interval.
struct ControlField {
    Field nodes;               // (K+1) x (N+1)
    std::vector<double> edges; // (K+1) x N, row-major
    std::size_t num_edges = 0;

    ControlField() = default;
    ControlField(std::size_t num_levels, std::size_t num_nodes, double fill = 0.0)
        : nodes(FieldKind::control, num_levels, num_nodes, fill),
          edges(num_levels * (num_nodes - 1), fill),
          num_edges(num_nodes - 1) {}

    std::span<double> edge_level(std::size_t k) { return {edges.data() + k * num_edges, num_edges}; }
    std::span<const double> edge_level(std::size_t k) const {
        return {edges.data() + k * num_edges, num_edges};
    }
};

} // namespace mfg
