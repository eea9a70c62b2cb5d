#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mfg/coupling.hpp"
#include "mfg/field.hpp"
#include "mfg/grid.hpp"
#include "mfg/validation.hpp"

namespace mfg {

/// 17 significant digits: enough for exact double round-trips, so repeated
/// runs produce byte-identical files.
std::string format_double(double x);

/// Long format, time ascending: header "t,E,<value_name>" then one row per
/// (time level, node).
void write_field_csv(const std::filesystem::path& path, const Field& field,
                     const TimeGrid& times, const SpaceGrid& grid, std::string_view value_name);

/// Header "iteration,epsilon", one row per fixed-point iteration.
void write_trace_csv(const std::filesystem::path& path, const std::vector<double>& errors);

/// Header "n,h,error", one row per study level.
void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report);

/// Generic numeric table with a caller-supplied header line.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Human-oriented key: value run report.
void write_summary(const std::filesystem::path& path, const EquilibriumSolution& solution,
                   double payoff, double wall_seconds);

} // namespace mfg
