#include "mfg/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mfg {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

const char* status_name(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations_reached: return "max_iterations_reached";
        case SolveStatus::non_finite: return "non_finite";
    }
    return "unknown";
}

} // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_field_csv(const std::filesystem::path& path, const Field& field,
                     const TimeGrid& times, const SpaceGrid& grid, std::string_view value_name) {
    if (field.num_levels() != times.num_levels() || field.num_nodes() != grid.num_nodes())
        throw std::invalid_argument("write_field_csv: field does not match the grids");
    std::ofstream out = open_for_write(path);
    out << "t,E," << value_name << "\n";
    for (std::size_t k = field.num_levels(); k-- > 0;) {
        const std::string t = format_double(times.levels[k]);
        for (std::size_t i = 0; i < field.num_nodes(); ++i)
            out << t << ',' << format_double(grid.nodes[i]) << ',' << format_double(field(k, i))
                << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<double>& errors) {
    std::ofstream out = open_for_write(path);
    out << "iteration,epsilon\n";
    for (std::size_t i = 0; i < errors.size(); ++i)
        out << i + 1 << ',' << format_double(errors[i]) << '\n';
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report) {
    std::ofstream out = open_for_write(path);
    out << "n,h,error\n";
    for (const auto& level : report.levels)
        out << level.exponent << ',' << format_double(level.h) << ','
            << format_double(level.error) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_for_write(path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw std::invalid_argument("write_csv: ragged row");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
}

void write_summary(const std::filesystem::path& path, const EquilibriumSolution& solution,
                   double payoff, double wall_seconds) {
    std::ofstream out = open_for_write(path);
    out << "status: " << status_name(solution.status) << '\n';
    out << "iterations: " << solution.iterations << '\n';
    out << "final_error: "
        << format_double(solution.errors.empty() ? 0.0 : solution.errors.back()) << '\n';
    out << "wall_time_seconds: " << format_double(wall_seconds) << '\n';
    out << "max_mass_drift: " << format_double(solution.diagnostics.max_mass_drift) << '\n';
    out << "m_matrix_checked: " << solution.diagnostics.systems_checked << '\n';
    out << "m_matrix_passed: " << solution.diagnostics.systems_passed << '\n';
    out << "m_matrix_pass_rate: " << format_double(solution.diagnostics.pass_rate()) << '\n';
    out << "negative_reaction_events: " << solution.diagnostics.negative_reaction_count << '\n';
    out << "density_clip_events: " << solution.diagnostics.clip_count << '\n';
    out << "worst_density_undershoot: " << format_double(solution.diagnostics.worst_undershoot)
        << '\n';
    out << "discounted_payoff: " << format_double(payoff) << '\n';
    if (!solution.failure_detail.empty()) out << "detail: " << solution.failure_detail << '\n';
}

} // namespace mfg
