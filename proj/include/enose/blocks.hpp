#ifndef ENOSE_BLOCKS_HPP
#define ENOSE_BLOCKS_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

namespace enose {

// Supply rails. Every block output is clamped into [v_low, v_high].
struct Rails {
    double v_low = 0.0;
    double v_high = 1.8;

    double clamp(double v) const { return std::clamp(v, v_low, v_high); }

    void validate() const {
        if (!(v_low < v_high)) throw std::invalid_argument("rails: v_low must be < v_high");
    }
};

namespace detail {
inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite ") + what);
}
// exponential-Euler low-pass update, exact for an input held constant over dt
inline double lp_update(double state, double input, double tau_s, double dt_s) {
    const double a = std::exp(-dt_s / tau_s);
    return a * state + (1.0 - a) * input;
}
} // namespace detail

// Inverting band-pass difference stage: one high-pass pole (tau_fall_s, sets how
// fast the output reverts once the input stops moving) followed by one low-pass
// pole (tau_rise_s, smooths the output rise). Output sits at dc_offset_v for DC
// input and swings below it while the input rises.
class BandPassDiff {
  public:
    struct Params {
        double gain = 5.0;
        double tau_rise_s = 0.05;
        double tau_fall_s = 1.0;
        double dc_offset_v = 0.9;
    };

    BandPassDiff(const Params& p, const Rails& rails) : p_(p), rails_(rails) {
        if (!(p.gain > 0.0)) throw std::invalid_argument("bandpass gain must be > 0");
        if (!(p.tau_rise_s > 0.0 && p.tau_fall_s > 0.0))
            throw std::invalid_argument("bandpass time constants must be > 0");
        rails.validate();
    }

    // Initialize both filter memories so a constant input produces no transient.
    void settle(double input_v) {
        hp_track_ = input_v;
        lp_state_ = 0.0;
    }

    double step(double input_v, double dt_s) {
        detail::require_finite(input_v, "bandpass input");
        if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
        hp_track_ = detail::lp_update(hp_track_, input_v, p_.tau_fall_s, dt_s);
        const double hp_out = input_v - hp_track_;
        lp_state_ = detail::lp_update(lp_state_, hp_out, p_.tau_rise_s, dt_s);
        return rails_.clamp(p_.dc_offset_v - p_.gain * lp_state_);
    }

    const Params& params() const { return p_; }

  private:
    Params p_;
    Rails rails_;
    double hp_track_ = 0.0; // high-pass memory
    double lp_state_ = 0.0; // low-pass memory
};

// Threshold comparator with optional hysteresis, output at rail levels.
class Comparator {
  public:
    Comparator(double threshold_v, double hysteresis_v, const Rails& rails)
        : threshold_(threshold_v), hysteresis_(hysteresis_v), rails_(rails), output_(rails.v_low) {
        if (!(hysteresis_v >= 0.0)) throw std::invalid_argument("hysteresis must be >= 0");
        rails.validate();
    }

    double step(double input_v) {
        detail::require_finite(input_v, "comparator input");
        if (input_v > threshold_ + 0.5 * hysteresis_) output_ = rails_.v_high;
        else if (input_v < threshold_ - 0.5 * hysteresis_) output_ = rails_.v_low;
        return output_;
    }

    bool is_high() const { return output_ == rails_.v_high; }

  private:
    double threshold_;
    double hysteresis_;
    Rails rails_;
    double output_;
};

// First-order high-pass: unity gain at high frequency, zero DC gain.
class HighPass {
  public:
    explicit HighPass(double tau_s) : tau_(tau_s) {
        if (!(tau_s > 0.0)) throw std::invalid_argument("highpass tau must be > 0");
    }

    void settle(double input_v) { track_ = input_v; }

    double step(double input_v, double dt_s) {
        detail::require_finite(input_v, "highpass input");
        if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
        track_ = detail::lp_update(track_, input_v, tau_, dt_s);
        return input_v - track_;
    }

  private:
    double tau_;
    double track_ = 0.0; // slow tracking memory; output is input minus this
};

// Integrator with an enable gate. Disabled, it is held at the reset level;
// enabled, it accumulates gain_per_s * (input - reset_value) and clamps at the rails.
class GatedIntegrator {
  public:
    GatedIntegrator(double gain_per_s, double reset_value_v, const Rails& rails)
        : gain_(gain_per_s), reset_value_(reset_value_v), rails_(rails),
          accumulator_(rails.clamp(reset_value_v)) {
        rails.validate();
    }

    double step(double input_v, bool enable, double dt_s) {
        detail::require_finite(input_v, "integrator input");
        if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
        if (enable)
            accumulator_ = rails_.clamp(accumulator_ + gain_ * (input_v - reset_value_) * dt_s);
        else
            accumulator_ = rails_.clamp(reset_value_);
        return accumulator_;
    }

    double output() const { return accumulator_; }

  private:
    double gain_;
    double reset_value_;
    Rails rails_;
    double accumulator_;
};

// Set/reset latch. Simultaneous assertion is a configuration bug, not a state.
class SrLatch {
  public:
    bool step(bool set, bool reset) {
        if (set && reset) throw std::logic_error("latch race: S and R asserted together");
        if (set) q_ = true;
        else if (reset) q_ = false;
        return q_;
    }

    bool q() const { return q_; }

  private:
    bool q_ = false;
};

// Constant-current ramp on a capacitor: charges while enabled, discharges
// instantaneously when disabled.
class RampGenerator {
  public:
    RampGenerator(double ramp_rate_v_per_s, const Rails& rails)
        : rate_(ramp_rate_v_per_s), rails_(rails) {
        if (!(ramp_rate_v_per_s > 0.0)) throw std::invalid_argument("ramp rate must be > 0");
        rails.validate();
    }

    double step(bool enable, double dt_s) {
        if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
        if (enable)
            cap_voltage_ = std::min(cap_voltage_ + rate_ * dt_s, rails_.v_high);
        else
            cap_voltage_ = 0.0;
        return cap_voltage_;
    }

    double cap_voltage() const { return cap_voltage_; }

  private:
    double rate_;
    Rails rails_;
    double cap_voltage_ = 0.0;
};

inline bool or_gate(std::initializer_list<bool> inputs) {
    for (bool b : inputs)
        if (b) return true;
    return false;
}

} // namespace enose

#endif
