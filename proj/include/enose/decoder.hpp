#ifndef ENOSE_DECODER_HPP
#define ENOSE_DECODER_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "events.hpp"
#include "types.hpp"

namespace enose {

struct ClassKey {
    std::string gas;
    int level = 0;

    friend bool operator==(const ClassKey&, const ClassKey&) = default;
    friend auto operator<=>(const ClassKey&, const ClassKey&) = default;
};

// Per-class reference statistics of the 1/dt code. Entries absent in too many
// trials are absent here as well.
struct ClassStats {
    std::array<std::optional<double>, 3> mean_inv_dt;
    std::array<std::optional<double>, 3> std_inv_dt;
    std::array<int, 3> n_present{};
    int n_trials = 0;
};

struct Calibration {
    std::map<ClassKey, ClassStats> classes;
    std::string config_hash;
    std::string campaign_id;

    // z-scores stay finite when a class is noiseless
    double std_floor = 1e-6;
    // a sensor must fire in at least this fraction of trials to enter the centroid
    double presence_fraction = 0.5;
};

// Per-sensor mean/std of 1/dt per (gas, level), over the trials where the EM
// pulse was observed. Sensors present in fewer than presence_fraction of a
// class's trials are dropped from that class, mirroring the discarding of
// trials without EM pulses.
inline Calibration calibrate(const std::vector<std::pair<Stimulus, ConcentrationVector>>& labeled,
                             double presence_fraction = 0.5) {
    if (labeled.empty()) throw std::invalid_argument("calibrate: empty input");

    struct Acc {
        std::array<std::vector<double>, 3> inv;
        int n_trials = 0;
    };
    std::map<ClassKey, Acc> acc;
    for (const auto& [stim, vec] : labeled) {
        auto& a = acc[{stim.gas.label, stim.level.level}];
        a.n_trials++;
        auto inv = inverse_code(vec);
        for (int s = 0; s < 3; ++s)
            if (inv[s]) a.inv[s].push_back(*inv[s]);
    }

    Calibration cal;
    cal.presence_fraction = presence_fraction;
    for (auto& [key, a] : acc) {
        ClassStats stats;
        stats.n_trials = a.n_trials;
        bool any_present = false;
        for (int s = 0; s < 3; ++s) {
            stats.n_present[s] = static_cast<int>(a.inv[s].size());
            if (a.inv[s].empty() ||
                static_cast<double>(a.inv[s].size()) < presence_fraction * a.n_trials)
                continue;
            double mean = 0.0;
            for (double x : a.inv[s]) mean += x;
            mean /= static_cast<double>(a.inv[s].size());
            double var = 0.0;
            for (double x : a.inv[s]) var += (x - mean) * (x - mean);
            var /= static_cast<double>(a.inv[s].size());
            stats.mean_inv_dt[s] = mean;
            stats.std_inv_dt[s] = std::sqrt(var);
            any_present = true;
        }
        if (!any_present)
            throw std::runtime_error("calibrate: class " + key.gas + "/C" +
                                     std::to_string(key.level) + " has no usable sensor");
        cal.classes[key] = stats;
    }
    return cal;
}

struct InferenceResult {
    GasId gas;
    int level = 0;
    double score = 0.0; // masked mean squared z-score distance; lower is better
};

// Nearest centroid over 1/dt space, using only coordinates present in both the
// query and the candidate centroid. Ties break by (gas label, level).
inline InferenceResult infer(const ConcentrationVector& v, const Calibration& cal) {
    if (cal.classes.empty()) throw std::invalid_argument("infer: empty calibration");
    auto inv = inverse_code(v);
    if (!inv[0] && !inv[1] && !inv[2])
        throw std::invalid_argument("infer: all entries of the concentration vector are absent");

    std::optional<InferenceResult> best;
    for (const auto& [key, stats] : cal.classes) {
        double dist = 0.0;
        int shared = 0;
        for (int s = 0; s < 3; ++s) {
            if (!inv[s] || !stats.mean_inv_dt[s]) continue;
            const double sigma = std::max(*stats.std_inv_dt[s], cal.std_floor);
            const double z = (*inv[s] - *stats.mean_inv_dt[s]) / sigma;
            dist += z * z;
            ++shared;
        }
        if (shared == 0) continue;
        dist /= static_cast<double>(shared);
        if (!best || dist < best->score)
            best = InferenceResult{{key.gas}, key.level, dist};
    }
    if (!best)
        throw std::runtime_error("infer: no calibration class shares a coordinate with the query");
    return *best;
}

struct Evaluation {
    std::vector<std::string> gas_labels;
    std::vector<std::vector<int>> gas_confusion;   // true x predicted
    std::vector<int> levels;
    std::vector<std::vector<int>> level_confusion; // true x predicted
    int n_total = 0;
    int n_correct_gas = 0;
    int n_correct_level = 0;
    int n_correct_joint = 0;

    double joint_accuracy() const {
        return n_total ? static_cast<double>(n_correct_joint) / n_total : 0.0;
    }
};

inline Evaluation evaluate(const std::vector<std::pair<Stimulus, ConcentrationVector>>& test_set,
                           const Calibration& cal) {
    if (test_set.empty()) throw std::invalid_argument("evaluate: empty test set");

    Evaluation ev;
    std::map<std::string, int> gas_index;
    std::map<int, int> level_index;
    auto gas_id = [&](const std::string& g) {
        auto [it, inserted] = gas_index.try_emplace(g, static_cast<int>(ev.gas_labels.size()));
        if (inserted) ev.gas_labels.push_back(g);
        return it->second;
    };
    auto level_id = [&](int l) {
        auto [it, inserted] = level_index.try_emplace(l, static_cast<int>(ev.levels.size()));
        if (inserted) ev.levels.push_back(l);
        return it->second;
    };
    for (const auto& [key, stats] : cal.classes) {
        gas_id(key.gas);
        level_id(key.level);
    }
    for (const auto& [stim, vec] : test_set) {
        gas_id(stim.gas.label);
        level_id(stim.level.level);
    }
    ev.gas_confusion.assign(ev.gas_labels.size(), std::vector<int>(ev.gas_labels.size(), 0));
    ev.level_confusion.assign(ev.levels.size(), std::vector<int>(ev.levels.size(), 0));

    for (const auto& [stim, vec] : test_set) {
        auto result = infer(vec, cal);
        const int tg = gas_id(stim.gas.label), pg = gas_id(result.gas.label);
        const int tl = level_id(stim.level.level), pl = level_id(result.level);
        ev.gas_confusion[tg][pg]++;
        ev.level_confusion[tl][pl]++;
        ev.n_total++;
        if (tg == pg) ev.n_correct_gas++;
        if (tl == pl) ev.n_correct_level++;
        if (tg == pg && tl == pl) ev.n_correct_joint++;
    }
    return ev;
}

} // namespace enose

#endif
