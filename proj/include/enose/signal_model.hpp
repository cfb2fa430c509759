#ifndef ENOSE_SIGNAL_MODEL_HPP
#define ENOSE_SIGNAL_MODEL_HPP

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace enose {

// Noiseless model value at time t: first-order charge toward
// baseline + A during exposure, first-order discharge afterwards.
inline double model_value(const SensorModelParams& params, const Stimulus& stim, double t) {
    const double amplitude =
        params.lookup(params.sensitivity_v, stim.gas) * stim.level.relative_concentration;
    const double tau_rise = params.lookup(params.tau_rise_s, stim.gas);
    const double tau_decay = params.lookup(params.tau_decay_s, stim.gas);
    const double offset_t = stim.onset_s + stim.duration_s;

    if (t <= stim.onset_s) return params.baseline_v;
    if (t <= offset_t)
        return params.baseline_v + amplitude * (1.0 - std::exp(-(t - stim.onset_s) / tau_rise));
    const double v_off = amplitude * (1.0 - std::exp(-stim.duration_s / tau_rise));
    return params.baseline_v + v_off * std::exp(-(t - offset_t) / tau_decay);
}

inline SensorTrace synthesize_trace(const SensorModelParams& params, const Stimulus& stim,
                                    double dt_s, double t_start_s, double t_end_s,
                                    std::uint64_t seed) {
    params.validate();
    if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
    if (!(t_start_s < stim.onset_s && stim.onset_s < t_end_s))
        throw std::invalid_argument("stimulus onset must lie strictly inside the time window");
    if (!(stim.duration_s > 0.0)) throw std::invalid_argument("stimulus duration must be positive");

    SensorTrace trace;
    trace.sensor_id = params.sensor_id;
    trace.dt_s = dt_s;
    trace.t_start_s = t_start_s;

    const auto n = static_cast<std::size_t>(std::floor((t_end_s - t_start_s) / dt_s)) + 1;
    trace.samples.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        double v = model_value(params, stim, trace.time_at(i));
        if (params.noise_sigma_v > 0.0) v += params.noise_sigma_v * rng.next_gauss();
        trace.samples.push_back(v);
    }
    trace.validate();
    return trace;
}

// Shipped parameter table. Sensor 1 is the fastest and most sensitive, sensor 3
// the slowest and least sensitive, so the array slopes come out ordered 1 > 2 > 3.
// Absolute volts are a free calibration, not a hardware match.
inline std::array<SensorModelParams, 3> default_sensor_params(double noise_sigma_v = 0.002) {
    std::array<SensorModelParams, 3> p;
    p[0] = SensorModelParams{
        1, 0.20,
        {{"EB", 1.00}, {"Eu", 0.85}, {"IA", 0.90}},
        {{"EB", 0.30}, {"Eu", 0.35}, {"IA", 0.32}},
        {{"EB", 2.0}, {"Eu", 2.2}, {"IA", 2.1}},
        noise_sigma_v, 27000.0};
    p[1] = SensorModelParams{
        2, 0.20,
        {{"EB", 0.55}, {"Eu", 0.60}, {"IA", 0.60}},
        {{"EB", 0.60}, {"Eu", 0.55}, {"IA", 0.65}},
        {{"EB", 3.0}, {"Eu", 2.8}, {"IA", 3.2}},
        noise_sigma_v, 6800.0};
    p[2] = SensorModelParams{
        3, 0.20,
        {{"EB", 0.35}, {"Eu", 0.30}, {"IA", 0.40}},
        {{"EB", 1.10}, {"Eu", 1.25}, {"IA", 1.15}},
        {{"EB", 5.0}, {"Eu", 5.5}, {"IA", 5.2}},
        noise_sigma_v, 27000.0};
    return p;
}

struct CampaignSpec {
    std::vector<GasId> gases{{"EB"}, {"Eu"}, {"IA"}};
    std::vector<int> levels{1, 2, 3, 4, 5};
    int n_trials = 20;
    double dt_s = 1e-3;
    double t_start_s = -1.0;
    double t_end_s = 10.0;
    double onset_s = 0.0;
    double duration_s = 1.0;
};

// Full randomized campaign: every (gas, level) pair appears exactly n_trials
// times, presentation order is a seeded permutation, each trial gets its own
// derived noise seed.
inline std::vector<Trial> campaign(const CampaignSpec& spec,
                                   const std::array<SensorModelParams, 3>& params,
                                   std::uint64_t schedule_seed) {
    if (spec.gases.empty() || spec.levels.empty())
        throw std::invalid_argument("campaign needs at least one gas and one level");
    if (spec.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");

    std::vector<Stimulus> order;
    for (const auto& gas : spec.gases)
        for (int level : spec.levels)
            for (int k = 0; k < spec.n_trials; ++k)
                order.push_back({gas, ConcentrationLevel::of_level(level), spec.onset_s,
                                 spec.duration_s});

    // Fisher-Yates with the project RNG; std::shuffle is not stable across stdlibs.
    Rng rng(mix_seed(schedule_seed, 0xC0FFEEULL));
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = rng.next_below(i);
        std::swap(order[i - 1], order[j]);
    }

    std::vector<Trial> trials;
    trials.reserve(order.size());
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
        Trial trial;
        trial.stimulus = order[idx];
        trial.trial_index = static_cast<int>(idx);
        for (int s = 0; s < 3; ++s) {
            std::uint64_t seed = mix_seed(schedule_seed, idx * 8 + static_cast<std::uint64_t>(s) + 1);
            trial.traces[s] = synthesize_trace(params[s], trial.stimulus, spec.dt_s,
                                               spec.t_start_s, spec.t_end_s, seed);
        }
        trials.push_back(std::move(trial));
    }
    return trials;
}

// ---------------------------------------------------------------------------
// CSV trial files.
//
// One file per trial:
//   # gas=EB level=1 trial=0 dt_s=0.001
//   t_s,s1_v,s2_v,s3_v
//   -1,0.2,0.2,0.2
//   ...
// Floats use shortest round-trip formatting, so load(save(x)) == x exactly.

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::runtime_error("malformed number '" + std::string(s) + "'");
    return v;
}

inline void save_trial_csv(const Trial& trial, std::ostream& out) {
    for (const auto& t : trial.traces) t.validate();
    const auto& t0 = trial.traces[0];
    if (trial.traces[1].samples.size() != t0.samples.size() ||
        trial.traces[2].samples.size() != t0.samples.size())
        throw std::runtime_error("traces of one trial must share the time axis");

    out << "# gas=" << trial.stimulus.gas.label << " level=" << trial.stimulus.level.level
        << " trial=" << trial.trial_index << " dt_s=" << format_double(t0.dt_s) << "\n";
    out << "t_s,s1_v,s2_v,s3_v\n";
    for (std::size_t i = 0; i < t0.samples.size(); ++i) {
        out << format_double(t0.time_at(i));
        for (int s = 0; s < 3; ++s) out << ',' << format_double(trial.traces[s].samples[i]);
        out << '\n';
    }
}

inline Trial load_trial_csv(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("#"))
        throw std::runtime_error(origin + ": missing preamble comment line");

    Trial trial;
    double dt_s = 0.0;
    {
        std::istringstream header(line.substr(1));
        std::string token;
        int level = 0;
        while (header >> token) {
            auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            std::string key = token.substr(0, eq), value = token.substr(eq + 1);
            if (key == "gas") trial.stimulus.gas.label = value;
            else if (key == "level") level = std::stoi(value);
            else if (key == "trial") trial.trial_index = std::stoi(value);
            else if (key == "dt_s") dt_s = parse_double(value);
        }
        if (trial.stimulus.gas.label.empty() || level == 0 || !(dt_s > 0.0))
            throw std::runtime_error(origin + ": preamble must carry gas, level and dt_s");
        trial.stimulus.level = ConcentrationLevel::of_level(level);
    }

    if (!std::getline(in, line) || line != "t_s,s1_v,s2_v,s3_v")
        throw std::runtime_error(origin + ": bad header row");

    std::vector<double> times;
    std::array<std::vector<double>, 3> cols;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string_view, 4> fields;
        std::string_view sv = line;
        for (int f = 0; f < 4; ++f) {
            auto comma = sv.find(',');
            if ((comma == std::string_view::npos) != (f == 3))
                throw std::runtime_error(origin + ": malformed row '" + line + "'");
            fields[f] = sv.substr(0, comma);
            if (f < 3) sv.remove_prefix(comma + 1);
        }
        times.push_back(parse_double(fields[0]));
        for (int s = 0; s < 3; ++s) cols[s].push_back(parse_double(fields[s + 1]));
    }
    if (times.size() < 2) throw std::runtime_error(origin + ": trial needs at least two samples");

    // Uniform sampling is a hard precondition; no resampling here.
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs((times[i] - times[i - 1]) - dt_s) > 1e-9 * std::max(1.0, std::abs(dt_s)))
            throw std::runtime_error(origin + ": non-uniform sampling");

    for (int s = 0; s < 3; ++s) {
        trial.traces[s].sensor_id = s + 1;
        trial.traces[s].dt_s = dt_s;
        trial.traces[s].t_start_s = times.front();
        trial.traces[s].samples = std::move(cols[s]);
        trial.traces[s].validate();
    }
    return trial;
}

inline std::filesystem::path trial_file_name(const std::filesystem::path& dir, int index) {
    char name[32];
    std::snprintf(name, sizeof(name), "trial_%04d.csv", index);
    return dir / name;
}

inline void save_trials(const std::vector<Trial>& trials, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& trial : trials) {
        auto path = trial_file_name(dir, trial.trial_index);
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        save_trial_csv(trial, out);
    }
}

inline std::vector<Trial> load_trials(const std::filesystem::path& path) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::directory_iterator(path))
            if (entry.path().extension() == ".csv") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    } else if (std::filesystem::exists(path)) {
        files.push_back(path);
    } else {
        throw std::runtime_error("no such campaign: " + path.string());
    }

    std::vector<Trial> trials;
    trials.reserve(files.size());
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot read " + file.string());
        trials.push_back(load_trial_csv(in, file.filename().string()));
    }
    std::sort(trials.begin(), trials.end(),
              [](const Trial& a, const Trial& b) { return a.trial_index < b.trial_index; });
    return trials;
}

} // namespace enose

#endif
