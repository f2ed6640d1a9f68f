#ifndef SPARSE_AFE_CONFIG_IO_HPP
#define SPARSE_AFE_CONFIG_IO_HPP

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "adaptive_filters.hpp"
#include "errors.hpp"
#include "experiment.hpp"

// Experiment config documents are JSON objects:
//
//   {
//     "channel_length": 16, "sparsity_m": 4, "snr_db": 30,
//     "iterations": 2000, "trials": 200, "master_seed": 7,
//     "scenario": "tracking", "change_at": 1000,
//     "unit_energy": true, "tail_fraction": 0.1, "convergence_margin_db": 1.0,
//     "roster": [
//       {"label": "LMS",  "algorithm": "lms",  "mu": 0.004},
//       {"label": "LMMN", "algorithm": "lmmn", "mu": 0.004, "alpha0": 0.85,
//        "gamma": 0.03, "beta": 0.9, "delta": 0.95, "variable": true}
//     ]
//   }
//
// Every key except "sparsity_m" is optional. A missing roster selects the
// preset for sparsity_m. Unknown keys are rejected.

namespace sparse_afe {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& prefix) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw ConfigError(prefix + key, "unknown key");
        }
    }
}

inline double get_real(const json& obj, const char* key, double fallback, const std::string& prefix) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(prefix + key, "expected a number");
    }
    return v.get<double>();
}

inline std::uint64_t get_count(const json& obj, const char* key, std::uint64_t fallback, const std::string& prefix) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (v.is_number_unsigned()) {
        return v.get<std::uint64_t>();
    }
    throw ConfigError(prefix + key, "expected a non-negative integer");
}

inline bool get_bool(const json& obj, const char* key, bool fallback, const std::string& prefix) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_boolean()) {
        throw ConfigError(prefix + key, "expected true or false");
    }
    return v.get<bool>();
}

inline std::string get_string(const json& obj, const char* key, const std::string& fallback,
                              const std::string& prefix) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError(prefix + key, "expected a string");
    }
    return v.get<std::string>();
}

inline RosterEntry parse_roster_entry(const json& obj, const std::string& prefix) {
    if (!obj.is_object()) {
        throw ConfigError(prefix.substr(0, prefix.size() - 1), "expected an object");
    }
    const std::string kind = get_string(obj, "algorithm", "", prefix);
    RosterEntry       entry;
    if (kind == "lms") {
        reject_unknown_keys(obj, {"label", "algorithm", "mu"}, prefix);
        entry.spec = LmsSpec<>{.mu = get_real(obj, "mu", LmsSpec<>{}.mu, prefix)};
        entry.label = "LMS";
    } else if (kind == "zalms") {
        reject_unknown_keys(obj, {"label", "algorithm", "mu", "rho"}, prefix);
        entry.spec  = ZaLmsSpec<>{.mu = get_real(obj, "mu", ZaLmsSpec<>{}.mu, prefix),
                                  .rho = get_real(obj, "rho", ZaLmsSpec<>{}.rho, prefix)};
        entry.label = "ZA-LMS";
    } else if (kind == "nlms") {
        reject_unknown_keys(obj, {"label", "algorithm", "mu", "epsilon"}, prefix);
        entry.spec  = NlmsSpec<>{.mu = get_real(obj, "mu", NlmsSpec<>{}.mu, prefix),
                                 .epsilon = get_real(obj, "epsilon", NlmsSpec<>{}.epsilon, prefix)};
        entry.label = "NLMS";
    } else if (kind == "lmmn") {
        reject_unknown_keys(obj, {"label", "algorithm", "mu", "alpha0", "gamma", "beta", "delta", "variable"}, prefix);
        const LmmnSpec<> d{};
        entry.spec  = LmmnSpec<>{.mu = get_real(obj, "mu", d.mu, prefix),
                                 .alpha0 = get_real(obj, "alpha0", d.alpha0, prefix),
                                 .gamma = get_real(obj, "gamma", d.gamma, prefix),
                                 .beta = get_real(obj, "beta", d.beta, prefix),
                                 .delta = get_real(obj, "delta", d.delta, prefix),
                                 .variable = get_bool(obj, "variable", d.variable, prefix)};
        entry.label = "LMMN";
    } else {
        throw ConfigError(prefix + "algorithm", "expected one of lms, zalms, nlms, lmmn");
    }
    entry.label = get_string(obj, "label", entry.label, prefix);
    try {
        validate(entry.spec);
    } catch (const InvalidParameter& e) {
        throw ConfigError(prefix.substr(0, prefix.size() - 1), e.what());
    }
    return entry;
}

} // namespace detail

/// Parses and validates a config document, filling defaults.
inline ExperimentConfig parse_config_document(const json& doc) {
    using namespace detail;
    if (!doc.is_object()) {
        throw ConfigError("", "config document must be a JSON object");
    }
    reject_unknown_keys(doc,
                        {"channel_length", "sparsity_m", "snr_db", "iterations", "trials", "master_seed", "scenario",
                         "change_at", "unit_energy", "tail_fraction", "convergence_margin_db", "roster"},
                        "");
    if (!doc.contains("sparsity_m")) {
        throw ConfigError("sparsity_m", "required key is missing");
    }

    ExperimentConfig c;
    c.channel_length = get_count(doc, "channel_length", c.channel_length, "");
    c.sparsity_m     = get_count(doc, "sparsity_m", 0, "");
    c.snr_db         = get_real(doc, "snr_db", c.snr_db, "");
    c.trials         = get_count(doc, "trials", c.trials, "");
    c.master_seed    = get_count(doc, "master_seed", c.master_seed, "");
    c.unit_energy    = get_bool(doc, "unit_energy", c.unit_energy, "");
    c.tail_fraction  = get_real(doc, "tail_fraction", c.tail_fraction, "");
    c.convergence_margin_db = get_real(doc, "convergence_margin_db", c.convergence_margin_db, "");

    const std::string scenario = get_string(doc, "scenario", "stationary", "");
    if (scenario == "stationary") {
        c.scenario = Scenario::stationary;
        if (doc.contains("change_at")) {
            throw ConfigError("change_at", "only valid for the tracking scenario");
        }
    } else if (scenario == "tracking") {
        c.scenario = Scenario::tracking;
    } else {
        throw ConfigError("scenario", "expected \"stationary\" or \"tracking\"");
    }
    c.iterations = get_count(doc, "iterations", c.scenario == Scenario::tracking ? 2000 : 1000, "");
    if (c.scenario == Scenario::tracking) {
        c.change_at = get_count(doc, "change_at", c.iterations / 2, "");
    }

    if (c.sparsity_m < 1 || c.sparsity_m > c.channel_length) {
        throw ConfigError("sparsity_m", "must lie in [1, channel_length]");
    }

    if (doc.contains("roster")) {
        const auto& roster = doc.at("roster");
        if (!roster.is_array() || roster.empty()) {
            throw ConfigError("roster", "expected a non-empty array");
        }
        for (std::size_t i = 0; i < roster.size(); ++i) {
            c.roster.push_back(parse_roster_entry(roster[i], "roster[" + std::to_string(i) + "]."));
        }
    } else {
        try {
            c.roster = table_presets(c.sparsity_m);
        } catch (const NoPreset& e) {
            throw ConfigError("roster", e.what());
        }
    }

    for (std::size_t i = 0; i < c.roster.size(); ++i) {
        const auto& label = c.roster[i].label;
        if (label.empty() || label.find_first_of(",\"\r\n") != std::string::npos) {
            throw ConfigError("roster[" + std::to_string(i) + "].label", "must be non-empty without commas, quotes or newlines");
        }
    }

    try {
        validate(c);
    } catch (const InvalidSparsity& e) {
        throw ConfigError("sparsity_m", e.what());
    } catch (const InvalidSchedule& e) {
        throw ConfigError("change_at", e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("", e.what());
    }
    return c;
}

inline ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config_document(doc);
}

inline json to_json(const RosterEntry& entry) {
    json j;
    j["label"] = entry.label;
    std::visit(
        [&j](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            j["mu"] = s.mu;
            if constexpr (std::is_same_v<S, LmsSpec<>>) {
                j["algorithm"] = "lms";
            } else if constexpr (std::is_same_v<S, ZaLmsSpec<>>) {
                j["algorithm"] = "zalms";
                j["rho"]       = s.rho;
            } else if constexpr (std::is_same_v<S, NlmsSpec<>>) {
                j["algorithm"] = "nlms";
                j["epsilon"]   = s.epsilon;
            } else {
                j["algorithm"] = "lmmn";
                j["alpha0"]    = s.alpha0;
                j["gamma"]     = s.gamma;
                j["beta"]      = s.beta;
                j["delta"]     = s.delta;
                j["variable"]  = s.variable;
            }
        },
        entry.spec);
    return j;
}

inline json to_json(const Roster& roster) {
    json arr = json::array();
    for (const auto& e : roster) {
        arr.push_back(to_json(e));
    }
    return arr;
}

/// Fully explicit document; parse_config_document(serialize_config(c)) == c.
inline json serialize_config(const ExperimentConfig& c) {
    json j;
    j["channel_length"] = c.channel_length;
    j["sparsity_m"]     = c.sparsity_m;
    j["snr_db"]         = c.snr_db;
    j["iterations"]     = c.iterations;
    j["trials"]         = c.trials;
    j["master_seed"]    = c.master_seed;
    j["scenario"]       = c.scenario == Scenario::tracking ? "tracking" : "stationary";
    if (c.scenario == Scenario::tracking) {
        j["change_at"] = c.change_at;
    }
    j["unit_energy"]           = c.unit_energy;
    j["tail_fraction"]         = c.tail_fraction;
    j["convergence_margin_db"] = c.convergence_margin_db;
    j["roster"]                = to_json(c.roster);
    return j;
}

} // namespace sparse_afe

#endif // SPARSE_AFE_CONFIG_IO_HPP
