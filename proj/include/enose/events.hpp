#ifndef ENOSE_EVENTS_HPP
#define ENOSE_EVENTS_HPP

#include <array>
#include <optional>

#include "frontend.hpp"
#include "types.hpp"

namespace enose {

// Time between the enabling pulse's rising edge and the EM pulse's rising edge.
// Absent (no EM pulse) is a value, not an error.
using DeltaT = std::optional<double>;

// Per-sensor delta-t tuple for one stimulus presentation.
struct ConcentrationVector {
    std::array<DeltaT, 3> per_sensor;
    std::optional<Stimulus> stimulus; // metadata when known
    int trial_index = -1;
};

// Single-sensor code: first Out_EM rising minus first Out_CD rising.
inline DeltaT delta_t_single(const EventLog& log) {
    auto cd = log.first_rising("Out_CD");
    auto em = log.first_rising("Out_EM");
    if (!cd || !em) return std::nullopt;
    return *em - *cd;
}

// Array code: per sensor, first EM_i rising minus the Q_out rising edge.
inline ConcentrationVector concentration_vector(const EventLog& log) {
    ConcentrationVector v;
    auto q = log.first_rising("Q_out");
    if (!q) return v;
    static const char* kEmNames[3] = {"EM1", "EM2", "EM3"};
    for (int s = 0; s < 3; ++s) {
        auto em = log.first_rising(kEmNames[s]);
        if (em) v.per_sensor[s] = *em - *q;
    }
    return v;
}

inline DeltaT inverse(DeltaT dt) {
    if (!dt) return std::nullopt;
    return 1.0 / *dt;
}

// Elementwise 1/dt with absent entries preserved.
inline std::array<DeltaT, 3> inverse_code(const ConcentrationVector& v) {
    return {inverse(v.per_sensor[0]), inverse(v.per_sensor[1]), inverse(v.per_sensor[2])};
}

} // namespace enose

#endif
