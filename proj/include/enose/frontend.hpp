#ifndef ENOSE_FRONTEND_HPP
#define ENOSE_FRONTEND_HPP

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blocks.hpp"
#include "types.hpp"

namespace enose {

// Timestamped rising/falling edges of every named pulse signal in one run.
// Timestamps are the timestep at which a comparator output changed; there is
// no sub-step interpolation, so event resolution equals dt.
class EventLog {
  public:
    struct Edge {
        double t_s;
        bool rising;
    };

    void declare(const std::string& name) { signals_.try_emplace(name); }

    void record(const std::string& name, double t_s, bool rising) {
        auto& edges = signals_[name];
        if (!edges.empty()) {
            if (edges.back().rising == rising)
                throw std::logic_error("event log: non-alternating edges on " + name);
            if (!(t_s > edges.back().t_s))
                throw std::logic_error("event log: non-increasing timestamps on " + name);
        } else if (!rising) {
            throw std::logic_error("event log: signal " + name + " starts with a falling edge");
        }
        edges.push_back({t_s, rising});
    }

    // Record edges implied by a level change between consecutive timesteps.
    void record_level(const std::string& name, double t_s, bool previous, bool current) {
        if (current != previous) record(name, t_s, current);
    }

    const std::map<std::string, std::vector<Edge>>& signals() const { return signals_; }

    const std::vector<Edge>& edges(const std::string& name) const {
        auto it = signals_.find(name);
        if (it == signals_.end()) throw std::out_of_range("no signal named " + name);
        return it->second;
    }

    std::optional<double> first_rising(const std::string& name) const {
        for (const auto& e : edges(name))
            if (e.rising) return e.t_s;
        return std::nullopt;
    }

    // Complete (rising, falling) pulse pairs of one signal.
    std::vector<std::pair<double, double>> pulses(const std::string& name) const {
        std::vector<std::pair<double, double>> out;
        const auto& es = edges(name);
        for (std::size_t i = 0; i + 1 < es.size(); i += 2)
            out.emplace_back(es[i].t_s, es[i + 1].t_s);
        return out;
    }

    std::size_t total_edges() const {
        std::size_t n = 0;
        for (const auto& [name, es] : signals_) n += es.size();
        return n;
    }

    // debugging aid, populated only on request
    std::map<std::string, std::vector<double>> waveforms;

  private:
    std::map<std::string, std::vector<Edge>> signals_;
};

// Change-detection stage parameters for one sensor. The comparator acts on the
// downward swing of the inverting band-pass output (dc_offset - output), so
// threshold_v is the swing, in volts, that starts a CD pulse.
struct CdConfig {
    BandPassDiff::Params bandpass;
    double threshold_v = 0.03;
    double hysteresis_v = 0.0;
};

// Exposure-measurement stage parameters for one sensor.
struct EmConfig {
    double reset_value_v = 0.05;
    double gain_per_s = 2.0;
    double threshold_v = 0.15;
    double hysteresis_v = 0.0;
};

// Timer stage: SR latch plus constant-current ramp; Q_out width is
// ramp_threshold_v / ramp_rate_v_per_s regardless of the stimulus.
struct TimerConfig {
    double ramp_rate_v_per_s = 0.3;
    double ramp_threshold_v = 0.9;
    double vpulse_duration_s = 0.005;
};

struct CircuitConfig {
    std::array<CdConfig, 3> cd;
    double hpf_tau_s = 2.0;
    std::array<EmConfig, 3> em;
    TimerConfig timer;
    Rails rails;
    double dt_s = 1e-3;

    void validate() const {
        rails.validate();
        if (!(dt_s > 0.0)) throw std::invalid_argument("config dt_s must be positive");
        if (!(timer.vpulse_duration_s > 0.0))
            throw std::invalid_argument("vpulse_duration_s must be positive");
        if (!(timer.vpulse_duration_s < timer.ramp_threshold_v / timer.ramp_rate_v_per_s))
            throw std::invalid_argument("vpulse_duration_s must be shorter than the ramp width");
        for (const auto& c : cd)
            if (c.threshold_v < rails.v_low || c.threshold_v > rails.v_high)
                throw std::invalid_argument("cd threshold outside rails");
        for (const auto& e : em)
            if (e.threshold_v < rails.v_low || e.threshold_v > rails.v_high)
                throw std::invalid_argument("em threshold outside rails");
        if (!(hpf_tau_s > 0.0)) throw std::invalid_argument("hpf tau must be positive");
    }
};

// Shipped defaults, tuned so the whole default synthetic campaign yields
// complete pulse sets with the EM integrators clear of the positive rail.
inline CircuitConfig default_circuit_config() {
    CircuitConfig cfg;
    for (auto& c : cfg.cd) c = CdConfig{{5.0, 0.05, 1.0, 0.9}, 0.03, 0.0};
    cfg.hpf_tau_s = 2.0;
    cfg.em[0] = EmConfig{0.05, 1.0, 0.15, 0.0};
    cfg.em[1] = EmConfig{0.05, 1.6, 0.15, 0.0};
    cfg.em[2] = EmConfig{0.05, 3.8, 0.15, 0.0};
    cfg.timer = TimerConfig{0.3, 0.9, 0.005};
    return cfg;
}

namespace detail {

// One sensor's CD path: inverting band-pass stage plus a comparator watching
// its downward swing.
class CdPath {
  public:
    CdPath(const CdConfig& cfg, const Rails& rails, double settle_v)
        : cfg_(cfg), bandpass_(cfg.bandpass, rails),
          comparator_(cfg.threshold_v, cfg.hysteresis_v, rails) {
        bandpass_.settle(settle_v);
    }

    bool step(double input_v, double dt_s) {
        const double out = bandpass_.step(input_v, dt_s);
        comparator_.step(cfg_.bandpass.dc_offset_v - out);
        return comparator_.is_high();
    }

  private:
    CdConfig cfg_;
    BandPassDiff bandpass_;
    Comparator comparator_;
};

// One sensor's EM path: high-pass filter, pass-gated integrator, comparator.
class EmPath {
  public:
    EmPath(const EmConfig& cfg, double hpf_tau_s, const Rails& rails, double settle_v)
        : cfg_(cfg), hpf_(hpf_tau_s), integrator_(cfg.gain_per_s, cfg.reset_value_v, rails),
          comparator_(cfg.threshold_v, cfg.hysteresis_v, rails) {
        hpf_.settle(settle_v);
    }

    bool step(double input_v, bool enable, double dt_s) {
        const double hp_out = hpf_.step(input_v, dt_s);
        // pass-gate output: high-pass filtered signal shifted by the X3 offset,
        // held at the offset while the gate is closed
        last_acc_ = integrator_.step(hp_out + cfg_.reset_value_v, enable, dt_s);
        comparator_.step(last_acc_);
        return comparator_.is_high();
    }

    double integrator_output() const { return last_acc_; }

  private:
    EmConfig cfg_;
    HighPass hpf_;
    GatedIntegrator integrator_;
    Comparator comparator_;
    double last_acc_ = 0.0;
};

} // namespace detail

// Single-sensor pipeline: CD pulse gates the exposure measurement directly.
inline EventLog run_single_sensor(const SensorTrace& trace, const CircuitConfig& config,
                                  bool capture_waveforms = false) {
    config.validate();
    trace.validate();
    if (std::abs(trace.dt_s - config.dt_s) > 1e-12)
        throw std::invalid_argument("trace dt does not match config dt; resample upstream");

    const int s = trace.sensor_id - 1;
    const double dt = config.dt_s;
    detail::CdPath cd(config.cd[s], config.rails, trace.samples.front());
    detail::EmPath em(config.em[s], config.hpf_tau_s, config.rails, trace.samples.front());

    EventLog log;
    log.declare("Out_CD");
    log.declare("Out_EM");

    bool prev_cd = false, prev_em = false;
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const double t = trace.time_at(i);
        const double v = trace.samples[i];
        const bool cd_high = cd.step(v, dt);
        const bool em_high = em.step(v, cd_high, dt);
        log.record_level("Out_CD", t, prev_cd, cd_high);
        log.record_level("Out_EM", t, prev_em, em_high);
        prev_cd = cd_high;
        prev_em = em_high;
        if (capture_waveforms) log.waveforms["integrator"].push_back(em.integrator_output());
    }
    return log;
}

// Array pipeline: three CD paths feed an OR gate; the SR-latch/ramp timer turns
// the first CD pulse into a fixed-width global trigger Q_out that gates all
// three exposure measurements simultaneously.
inline EventLog run_array(const std::array<SensorTrace, 3>& traces, const CircuitConfig& config,
                          bool capture_waveforms = false) {
    config.validate();
    for (const auto& t : traces) t.validate();
    const auto n = traces[0].samples.size();
    for (const auto& t : traces) {
        if (t.samples.size() != n || std::abs(t.dt_s - config.dt_s) > 1e-12 ||
            std::abs(t.t_start_s - traces[0].t_start_s) > 1e-12)
            throw std::invalid_argument("array traces must share length, dt and time axis");
    }

    const double dt = config.dt_s;
    const double t0 = traces[0].t_start_s;

    std::array<std::optional<detail::CdPath>, 3> cd;
    std::array<std::optional<detail::EmPath>, 3> em;
    for (int s = 0; s < 3; ++s) {
        cd[s].emplace(config.cd[s], config.rails, traces[s].samples.front());
        em[s].emplace(config.em[s], config.hpf_tau_s, config.rails, traces[s].samples.front());
    }
    SrLatch latch;
    RampGenerator ramp(config.timer.ramp_rate_v_per_s, config.rails);
    Comparator ramp_comparator(config.timer.ramp_threshold_v, 0.0, config.rails);

    EventLog log;
    static const char* kCdNames[3] = {"CD1", "CD2", "CD3"};
    static const char* kEmNames[3] = {"EM1", "EM2", "EM3"};
    for (auto* name : kCdNames) log.declare(name);
    log.declare("CD_out");
    log.declare("Q_out");
    for (auto* name : kEmNames) log.declare(name);

    std::array<bool, 3> prev_cd{}, prev_em{};
    bool prev_cd_out = false, prev_q = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = traces[0].time_at(i);

        std::array<bool, 3> cd_high{};
        for (int s = 0; s < 3; ++s) cd_high[s] = cd[s]->step(traces[s].samples[i], dt);
        const bool cd_out = or_gate({cd_high[0], cd_high[1], cd_high[2]});

        // V_pulse holds the latch in reset for a few milliseconds at startup
        const bool v_pulse = (t - t0) < config.timer.vpulse_duration_s;
        ramp_comparator.step(ramp.cap_voltage());
        const bool set = cd_out && !prev_cd_out;
        const bool reset = or_gate({v_pulse, ramp_comparator.is_high()});
        const bool q = latch.step(set, reset);
        ramp.step(q, dt);

        std::array<bool, 3> em_high{};
        for (int s = 0; s < 3; ++s) em_high[s] = em[s]->step(traces[s].samples[i], q, dt);

        for (int s = 0; s < 3; ++s) log.record_level(kCdNames[s], t, prev_cd[s], cd_high[s]);
        log.record_level("CD_out", t, prev_cd_out, cd_out);
        log.record_level("Q_out", t, prev_q, q);
        for (int s = 0; s < 3; ++s) log.record_level(kEmNames[s], t, prev_em[s], em_high[s]);

        prev_cd = cd_high;
        prev_cd_out = cd_out;
        prev_q = q;
        prev_em = em_high;
        if (capture_waveforms) {
            log.waveforms["ramp"].push_back(ramp.cap_voltage());
            for (int s = 0; s < 3; ++s)
                log.waveforms[std::string("integrator") + kEmNames[s][2]].push_back(
                    em[s]->integrator_output());
        }
    }
    return log;
}

// Width of the first complete Q_out pulse.
inline double q_out_width(const EventLog& log) {
    auto pulses = log.pulses("Q_out");
    if (pulses.empty()) throw std::runtime_error("no complete Q_out pulse in event log");
    return pulses.front().second - pulses.front().first;
}

} // namespace enose

#endif
