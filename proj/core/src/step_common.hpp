#pragma once

#include <cstddef>

#include "mfg/diagnostics.hpp"
#include "mfg/fitted_fvm.hpp"
#include "mfg/log.hpp"

namespace mfg::detail {

/// Run the structural M-matrix test on an implicit stepping matrix and fold
/// the outcome into the diagnostics, keeping the worst violation's location.
inline void check_implicit_matrix(const TridiagonalMatrix& matrix, SolveDiagnostics* diag,
                                  std::size_t time_level) {
    if (diag == nullptr) return;
    const MMatrixReport report = is_m_matrix(matrix);
    ++diag->systems_checked;
    if (report.pass()) {
        ++diag->systems_passed;
        return;
    }
    DiagnosticEvent e;
    e.iteration = diag->iteration_tag;
    e.time_level = time_level;
    if (!report.off_diagonal_ok) {
        e.node = report.worst_off_diagonal_at;
        e.value = report.worst_off_diagonal;
    } else if (!report.diagonal_ok) {
        e.node = report.min_diagonal_at;
        e.value = report.min_diagonal;
    } else {
        e.node = report.min_column_margin_at;
        e.value = report.min_column_margin;
    }
    diag->record_m_matrix_failure(e);
    log::debug("M-matrix check failed: iteration %zu, time level %zu, node %zu, value %.3e",
               e.iteration, e.time_level, e.node, e.value);
}

} // namespace mfg::detail
