#pragma once

#include <cstddef>
#include <vector>

namespace mfg {

/// Location of a numerical incident inside a space-time sweep.
struct DiagnosticEvent {
    std::size_t iteration = 0;  // outer fixed-point iteration
    std::size_t time_level = 0; // row of the field being produced
    std::size_t node = 0;
    double value = 0.0; // offending quantity (margin, coefficient, sample)
};

/// Counters and event logs shared by the two marching solvers and aggregated
/// across fixed-point iterations. Event vectors stop growing at event_cap but
/// the counters keep counting, so rates stay exact on pathological runs.
struct SolveDiagnostics {
    std::size_t iteration_tag = 0; // stamped onto new events by the solvers

    long systems_checked = 0;
    long systems_passed = 0;

    long m_matrix_failure_count = 0;
    std::vector<DiagnosticEvent> m_matrix_failures;

    // Nodes where the reaction coefficient of the backward operator dipped
    // below zero. This breaks a sufficient hypothesis for the M-matrix
    // property, not the property itself, so it is tracked separately.
    long negative_reaction_count = 0;
    std::vector<DiagnosticEvent> negative_reaction;

    double max_mass_drift = 0.0;    // worst |cell-weighted mass - 1| over stored density levels
    long clip_count = 0;            // negative density samples clipped to zero
    double worst_undershoot = 0.0;  // most negative raw density sample seen

    std::size_t event_cap = 4096;

    double pass_rate() const {
        return systems_checked > 0 ? static_cast<double>(systems_passed) / static_cast<double>(systems_checked)
                                   : 1.0;
    }

    void record_m_matrix_failure(const DiagnosticEvent& e) {
        ++m_matrix_failure_count;
        if (m_matrix_failures.size() < event_cap) m_matrix_failures.push_back(e);
    }

    void record_negative_reaction(const DiagnosticEvent& e) {
        ++negative_reaction_count;
        if (negative_reaction.size() < event_cap) negative_reaction.push_back(e);
    }
};

} // namespace mfg
