#ifndef ENOSE_HARNESS_HPP
#define ENOSE_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "config_io.hpp"
#include "decoder.hpp"
#include "events.hpp"
#include "frontend.hpp"
#include "signal_model.hpp"

namespace enose {

// Deterministic parallel map over trial indices: workers pull indices from a
// shared counter but write into slot i, so results do not depend on the
// worker count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

struct TrialResult {
    Stimulus stimulus;
    int trial_index = 0;
    ConcentrationVector vector;
    std::array<bool, 3> simulated{}; // which sensor slots were actually run
};

inline std::vector<TrialResult> run_campaign_array(const std::vector<Trial>& trials,
                                                   const CircuitConfig& config,
                                                   unsigned jobs = 1) {
    std::vector<TrialResult> results(trials.size());
    parallel_for(trials.size(), jobs, [&](std::size_t i) {
        auto log = run_array(trials[i].traces, config);
        auto vec = concentration_vector(log);
        vec.stimulus = trials[i].stimulus;
        vec.trial_index = trials[i].trial_index;
        results[i] = {trials[i].stimulus, trials[i].trial_index, std::move(vec),
                      {true, true, true}};
    });
    return results;
}

inline std::vector<TrialResult> run_campaign_single(const std::vector<Trial>& trials,
                                                    int sensor_id, const CircuitConfig& config,
                                                    unsigned jobs = 1) {
    if (sensor_id < 1 || sensor_id > 3) throw std::invalid_argument("sensor_id must be in 1..3");
    std::vector<TrialResult> results(trials.size());
    parallel_for(trials.size(), jobs, [&](std::size_t i) {
        auto log = run_single_sensor(trials[i].traces[sensor_id - 1], config);
        ConcentrationVector vec;
        vec.per_sensor[sensor_id - 1] = delta_t_single(log);
        vec.stimulus = trials[i].stimulus;
        vec.trial_index = trials[i].trial_index;
        TrialResult r{trials[i].stimulus, trials[i].trial_index, std::move(vec), {}};
        r.simulated[sensor_id - 1] = true;
        results[i] = std::move(r);
    });
    return results;
}

// ---------------------------------------------------------------------------
// Results table: one row per (trial, simulated sensor) with dt and 1/dt,
// empty fields for absent pulses. This is the data behind the
// concentration-trend plots.

inline void write_results_csv(const std::vector<TrialResult>& results, std::ostream& out) {
    out << "gas,level,trial,sensor,dt_s,inv_dt_per_s\n";
    for (const auto& r : results) {
        for (int s = 0; s < 3; ++s) {
            if (!r.simulated[s]) continue;
            const auto& dt = r.vector.per_sensor[s];
            out << r.stimulus.gas.label << ',' << r.stimulus.level.level << ',' << r.trial_index
                << ',' << (s + 1) << ',';
            if (dt) out << format_double(*dt) << ',' << format_double(1.0 / *dt);
            else out << ',';
            out << '\n';
        }
    }
}

inline std::vector<TrialResult> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "gas,level,trial,sensor,dt_s,inv_dt_per_s")
        throw std::runtime_error("results csv: bad header");

    std::map<std::pair<std::string, std::pair<int, int>>, TrialResult> by_trial;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string, 6> f;
        std::string_view sv = line;
        for (int i = 0; i < 6; ++i) {
            auto comma = sv.find(',');
            if ((comma == std::string_view::npos) != (i == 5))
                throw std::runtime_error("results csv: malformed row '" + line + "'");
            f[i] = std::string(sv.substr(0, comma));
            if (i < 5) sv.remove_prefix(comma + 1);
        }
        const int level = std::stoi(f[1]);
        const int trial = std::stoi(f[2]);
        const int sensor = std::stoi(f[3]);
        if (sensor < 1 || sensor > 3)
            throw std::runtime_error("results csv: sensor out of range in '" + line + "'");

        auto key = std::make_pair(f[0], std::make_pair(level, trial));
        auto [it, inserted] = by_trial.try_emplace(key);
        auto& r = it->second;
        if (inserted) {
            r.stimulus = {{f[0]}, ConcentrationLevel::of_level(level)};
            r.trial_index = trial;
            r.vector.stimulus = r.stimulus;
            r.vector.trial_index = trial;
        }
        r.simulated[sensor - 1] = true;
        if (!f[4].empty()) r.vector.per_sensor[sensor - 1] = parse_double(f[4]);
    }

    std::vector<TrialResult> results;
    results.reserve(by_trial.size());
    for (auto& [key, r] : by_trial) results.push_back(std::move(r));
    std::sort(results.begin(), results.end(),
              [](const TrialResult& a, const TrialResult& b) {
                  return a.trial_index < b.trial_index;
              });
    return results;
}

// ---------------------------------------------------------------------------
// Summary: mean/std of per-trial 1/dt per (gas, level, sensor). The mean is
// taken over per-trial reciprocals, matching error bars computed over trials.

struct SummaryRow {
    std::string gas;
    int level = 0;
    int sensor = 0;
    int n_trials = 0;
    int n_present = 0;
    double mean_inv_dt = 0.0;
    double std_inv_dt = 0.0;
};

inline std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results) {
    std::map<std::tuple<std::string, int, int>, std::pair<std::vector<double>, int>> groups;
    for (const auto& r : results) {
        for (int s = 0; s < 3; ++s) {
            if (!r.simulated[s]) continue;
            auto& [values, n] = groups[{r.stimulus.gas.label, r.stimulus.level.level, s + 1}];
            ++n;
            if (r.vector.per_sensor[s]) values.push_back(1.0 / *r.vector.per_sensor[s]);
        }
    }
    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, group] : groups) {
        const auto& [values, n] = group;
        SummaryRow row{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                       n, static_cast<int>(values.size()), 0.0, 0.0};
        if (!values.empty()) {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(values.size());
            row.mean_inv_dt = mean;
            row.std_inv_dt = std::sqrt(var);
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
    out << "gas,level,sensor,n_trials,n_present,mean_inv_dt_per_s,std_inv_dt_per_s\n";
    for (const auto& r : rows) {
        out << r.gas << ',' << r.level << ',' << r.sensor << ',' << r.n_trials << ','
            << r.n_present << ',';
        if (r.n_present > 0)
            out << format_double(r.mean_inv_dt) << ',' << format_double(r.std_inv_dt);
        else
            out << ',';
        out << '\n';
    }
}

// Least-squares slope of mean 1/dt against concentration level, per sensor.
inline double level_slope(const std::vector<SummaryRow>& rows, const std::string& gas,
                          int sensor) {
    std::vector<std::pair<double, double>> points;
    for (const auto& r : rows)
        if (r.gas == gas && r.sensor == sensor && r.n_present > 0)
            points.emplace_back(static_cast<double>(r.level), r.mean_inv_dt);
    if (points.size() < 2) throw std::runtime_error("level_slope: fewer than two levels present");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<std::pair<Stimulus, ConcentrationVector>>
labeled_vectors(const std::vector<TrialResult>& results) {
    std::vector<std::pair<Stimulus, ConcentrationVector>> out;
    out.reserve(results.size());
    for (const auto& r : results) out.emplace_back(r.stimulus, r.vector);
    return out;
}

// ---------------------------------------------------------------------------
// Run manifest: enough metadata to reproduce an output directory. Written
// before the results themselves.

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_hash;
    std::string campaign;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::string output_dir;
    std::string created_utc;
};

inline std::string utc_timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json doc;
    doc["command"] = m.command;
    doc["config_path"] = m.config_path;
    doc["config_hash"] = m.config_hash;
    doc["campaign"] = m.campaign;
    doc["seed"] = m.seed;
    doc["jobs"] = m.jobs;
    doc["output_dir"] = m.output_dir;
    doc["created_utc"] = m.created_utc;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << doc.dump(2) << "\n";
}

} // namespace enose

#endif
