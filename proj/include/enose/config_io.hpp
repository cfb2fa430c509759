#ifndef ENOSE_CONFIG_IO_HPP
#define ENOSE_CONFIG_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "decoder.hpp"
#include "frontend.hpp"
#include "signal_model.hpp"

namespace enose {

// ---------------------------------------------------------------------------
// CircuitConfig text format: key = value lines grouped in [section]s, one
// section per stage ([rails], [sim], [cd.N], [em.N], [timer]). '#' starts a
// comment. Unknown keys are rejected so typos fail loudly.

inline std::string serialize_config(const CircuitConfig& cfg) {
    std::ostringstream out;
    out << "[rails]\n";
    out << "v_low = " << format_double(cfg.rails.v_low) << "\n";
    out << "v_high = " << format_double(cfg.rails.v_high) << "\n\n";
    out << "[sim]\n";
    out << "dt_s = " << format_double(cfg.dt_s) << "\n";
    out << "hpf_tau_s = " << format_double(cfg.hpf_tau_s) << "\n\n";
    for (int s = 0; s < 3; ++s) {
        const auto& c = cfg.cd[s];
        out << "[cd." << (s + 1) << "]\n";
        out << "gain = " << format_double(c.bandpass.gain) << "\n";
        out << "tau_rise_s = " << format_double(c.bandpass.tau_rise_s) << "\n";
        out << "tau_fall_s = " << format_double(c.bandpass.tau_fall_s) << "\n";
        out << "dc_offset_v = " << format_double(c.bandpass.dc_offset_v) << "\n";
        out << "threshold_v = " << format_double(c.threshold_v) << "\n";
        out << "hysteresis_v = " << format_double(c.hysteresis_v) << "\n\n";
    }
    for (int s = 0; s < 3; ++s) {
        const auto& e = cfg.em[s];
        out << "[em." << (s + 1) << "]\n";
        out << "reset_value_v = " << format_double(e.reset_value_v) << "\n";
        out << "gain_per_s = " << format_double(e.gain_per_s) << "\n";
        out << "threshold_v = " << format_double(e.threshold_v) << "\n";
        out << "hysteresis_v = " << format_double(e.hysteresis_v) << "\n\n";
    }
    out << "[timer]\n";
    out << "ramp_rate_v_per_s = " << format_double(cfg.timer.ramp_rate_v_per_s) << "\n";
    out << "ramp_threshold_v = " << format_double(cfg.timer.ramp_threshold_v) << "\n";
    out << "vpulse_duration_s = " << format_double(cfg.timer.vpulse_duration_s) << "\n";
    return out.str();
}

inline CircuitConfig parse_config(std::istream& in) {
    CircuitConfig cfg = default_circuit_config();
    std::string line, section;
    int lineno = 0;

    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("config line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);

        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = line.substr(1, line.size() - 2);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        double v = 0.0;
        try {
            v = parse_double(value);
        } catch (const std::exception&) {
            fail("bad number '" + value + "'");
        }

        if (section == "rails") {
            if (key == "v_low") cfg.rails.v_low = v;
            else if (key == "v_high") cfg.rails.v_high = v;
            else fail("unknown key '" + key + "' in [rails]");
        } else if (section == "sim") {
            if (key == "dt_s") cfg.dt_s = v;
            else if (key == "hpf_tau_s") cfg.hpf_tau_s = v;
            else fail("unknown key '" + key + "' in [sim]");
        } else if (section.starts_with("cd.") || section.starts_with("em.")) {
            const int s = section[3] - '1';
            if (s < 0 || s > 2 || section.size() != 4) fail("bad section [" + section + "]");
            if (section.starts_with("cd.")) {
                auto& c = cfg.cd[s];
                if (key == "gain") c.bandpass.gain = v;
                else if (key == "tau_rise_s") c.bandpass.tau_rise_s = v;
                else if (key == "tau_fall_s") c.bandpass.tau_fall_s = v;
                else if (key == "dc_offset_v") c.bandpass.dc_offset_v = v;
                else if (key == "threshold_v") c.threshold_v = v;
                else if (key == "hysteresis_v") c.hysteresis_v = v;
                else fail("unknown key '" + key + "' in [" + section + "]");
            } else {
                auto& e = cfg.em[s];
                if (key == "reset_value_v") e.reset_value_v = v;
                else if (key == "gain_per_s") e.gain_per_s = v;
                else if (key == "threshold_v") e.threshold_v = v;
                else if (key == "hysteresis_v") e.hysteresis_v = v;
                else fail("unknown key '" + key + "' in [" + section + "]");
            }
        } else if (section == "timer") {
            if (key == "ramp_rate_v_per_s") cfg.timer.ramp_rate_v_per_s = v;
            else if (key == "ramp_threshold_v") cfg.timer.ramp_threshold_v = v;
            else if (key == "vpulse_duration_s") cfg.timer.vpulse_duration_s = v;
            else fail("unknown key '" + key + "' in [timer]");
        } else {
            fail("unknown section [" + section + "]");
        }
    }
    cfg.validate();
    return cfg;
}

inline CircuitConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path.string());
    return parse_config(in);
}

inline void save_config(const CircuitConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config " + path.string());
    out << serialize_config(cfg);
}

// FNV-1a over the canonical serialization; used to tie calibrations and
// manifests to the exact circuit parameters they were produced with.
inline std::string config_hash(const CircuitConfig& cfg) {
    const std::string text = serialize_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Calibration JSON document.

inline nlohmann::json calibration_to_json(const Calibration& cal) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["config_hash"] = cal.config_hash;
    doc["campaign_id"] = cal.campaign_id;
    doc["std_floor"] = cal.std_floor;
    doc["presence_fraction"] = cal.presence_fraction;
    auto& classes = doc["classes"] = nlohmann::json::array();
    for (const auto& [key, stats] : cal.classes) {
        nlohmann::json c;
        c["gas"] = key.gas;
        c["level"] = key.level;
        c["n_trials"] = stats.n_trials;
        for (int s = 0; s < 3; ++s) {
            c["mean_inv_dt"].push_back(stats.mean_inv_dt[s]
                                           ? nlohmann::json(*stats.mean_inv_dt[s])
                                           : nlohmann::json(nullptr));
            c["std_inv_dt"].push_back(stats.std_inv_dt[s] ? nlohmann::json(*stats.std_inv_dt[s])
                                                          : nlohmann::json(nullptr));
            c["n_present"].push_back(stats.n_present[s]);
        }
        classes.push_back(std::move(c));
    }
    return doc;
}

inline Calibration calibration_from_json(const nlohmann::json& doc) {
    if (doc.value("format_version", 0) != 1)
        throw std::runtime_error("unsupported calibration format version");
    Calibration cal;
    cal.config_hash = doc.value("config_hash", "");
    cal.campaign_id = doc.value("campaign_id", "");
    cal.std_floor = doc.value("std_floor", 1e-6);
    cal.presence_fraction = doc.value("presence_fraction", 0.5);
    for (const auto& c : doc.at("classes")) {
        ClassKey key{c.at("gas").get<std::string>(), c.at("level").get<int>()};
        ClassStats stats;
        stats.n_trials = c.at("n_trials").get<int>();
        for (int s = 0; s < 3; ++s) {
            if (!c.at("mean_inv_dt")[s].is_null()) {
                stats.mean_inv_dt[s] = c.at("mean_inv_dt")[s].get<double>();
                stats.std_inv_dt[s] = c.at("std_inv_dt")[s].get<double>();
            }
            stats.n_present[s] = c.at("n_present")[s].get<int>();
        }
        cal.classes[key] = stats;
    }
    return cal;
}

inline void save_calibration(const Calibration& cal, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write calibration " + path.string());
    out << calibration_to_json(cal).dump(2) << "\n";
}

inline Calibration load_calibration(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read calibration " + path.string());
    nlohmann::json doc;
    in >> doc;
    return calibration_from_json(doc);
}

} // namespace enose

#endif
