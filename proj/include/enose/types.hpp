#ifndef ENOSE_TYPES_HPP
#define ENOSE_TYPES_HPP

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace enose {

// Gas label. The default campaign uses EB, Eu and IA but any label works.
struct GasId {
    std::string label;

    friend bool operator==(const GasId& a, const GasId& b) { return a.label == b.label; }
    friend auto operator<=>(const GasId& a, const GasId& b) { return a.label <=> b.label; }
};

// Concentration level C1..C5, 20% steps relative to the full concentration.
struct ConcentrationLevel {
    int level = 1;
    double relative_concentration = 0.2;

    static ConcentrationLevel of_level(int level) {
        if (level < 1 || level > 5)
            throw std::invalid_argument("concentration level must be in 1..5");
        return {level, 0.2 * level};
    }
};

// One gas presentation: a rectangular pulse of gas embedded in constant airflow.
struct Stimulus {
    GasId gas;
    ConcentrationLevel level;
    double onset_s = 0.0;
    double duration_s = 1.0;
};

// Uniformly sampled load-resistor voltage of one MOx sensor over one trial.
struct SensorTrace {
    int sensor_id = 1; // 1..3
    double dt_s = 1e-3;
    double t_start_s = 0.0;
    std::vector<double> samples;

    double time_at(std::size_t i) const { return t_start_s + static_cast<double>(i) * dt_s; }

    void validate() const {
        if (sensor_id < 1 || sensor_id > 3)
            throw std::invalid_argument("sensor_id must be in 1..3");
        if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
        if (samples.empty()) throw std::invalid_argument("trace has no samples");
        for (double v : samples)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample in trace");
    }
};

// Parametric first-order response model of one MOx sensor.
// Load voltage rises toward baseline + sensitivity*relative_concentration during
// exposure and relaxes back afterwards. Per-gas time constants capture that the
// three sensors respond at different speeds.
struct SensorModelParams {
    int sensor_id = 1;
    double baseline_v = 0.2;
    std::map<std::string, double> sensitivity_v;  // volts at relative concentration 1.0
    std::map<std::string, double> tau_rise_s;
    std::map<std::string, double> tau_decay_s;
    double noise_sigma_v = 0.0;
    double load_resistance_ohm = 27000.0; // metadata only

    double lookup(const std::map<std::string, double>& table, const GasId& gas) const {
        auto it = table.find(gas.label);
        if (it == table.end())
            throw std::invalid_argument("no model entry for gas '" + gas.label + "'");
        return it->second;
    }

    void validate() const {
        if (!(baseline_v >= 0.0) || !std::isfinite(baseline_v))
            throw std::invalid_argument("baseline_v must be finite and >= 0");
        if (!(noise_sigma_v >= 0.0) || !std::isfinite(noise_sigma_v))
            throw std::invalid_argument("noise_sigma_v must be finite and >= 0");
        for (auto& [g, v] : sensitivity_v)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("sensitivity must be finite and >= 0 (" + g + ")");
        for (auto* table : {&tau_rise_s, &tau_decay_s})
            for (auto& [g, tau] : *table)
                if (!(tau > 0.0) || !std::isfinite(tau))
                    throw std::invalid_argument("time constants must be finite and > 0 (" + g + ")");
    }
};

// One campaign entry: a stimulus plus the three simultaneous sensor traces.
struct Trial {
    Stimulus stimulus;
    int trial_index = 0;
    std::array<SensorTrace, 3> traces;
};

} // namespace enose

#endif
