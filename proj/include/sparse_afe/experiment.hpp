#ifndef SPARSE_AFE_EXPERIMENT_HPP
#define SPARSE_AFE_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "adaptive_filters.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "random.hpp"
#include "signal_model.hpp"

namespace sparse_afe {

enum class Scenario { stationary, tracking };

struct RosterEntry {
    std::string           label;
    AlgorithmSpec<double> spec;
    bool                  operator==(const RosterEntry&) const = default;
};

using Roster = std::vector<RosterEntry>;

struct ExperimentConfig {
    std::size_t   channel_length{16};
    std::size_t   sparsity_m{1};
    double        snr_db{30.0};
    std::size_t   iterations{1000};
    std::size_t   trials{200};
    std::uint64_t master_seed{1};
    Scenario      scenario{Scenario::stationary};
    std::size_t   change_at{0}; // tracking only
    bool          unit_energy{true};
    double        tail_fraction{0.1};
    double        convergence_margin_db{1.0};
    Roster        roster;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Reference parameter sets for single-tap (m = 1) and four-tap (m = 4) sparse channels. NLMS epsilon is 1e-4 in both.
inline Roster table_presets(std::size_t sparsity_m) {
    switch (sparsity_m) {
    case 1:
        return {
            {"LMS", LmsSpec<>{.mu = 5e-3}},
            {"ZA-LMS", ZaLmsSpec<>{.mu = 6e-3, .rho = 2e-4}},
            {"NLMS", NlmsSpec<>{.mu = 0.02, .epsilon = 1e-4}},
            {"LMMN", LmmnSpec<>{.mu = 8e-3, .alpha0 = 0.7, .gamma = 0.02, .beta = 0.3, .delta = 0.7, .variable = true}},
        };
    case 4:
        return {
            {"LMS", LmsSpec<>{.mu = 4e-3}},
            {"ZA-LMS", ZaLmsSpec<>{.mu = 4e-3, .rho = 3e-5}},
            {"NLMS", NlmsSpec<>{.mu = 0.015, .epsilon = 1e-4}},
            {"LMMN", LmmnSpec<>{.mu = 4e-3, .alpha0 = 0.85, .gamma = 0.03, .beta = 0.9, .delta = 0.95, .variable = true}},
        };
    default:
        throw NoPreset("no preset roster for sparsity m=" + std::to_string(sparsity_m) + " (presets exist for 1 and 4)");
    }
}

/// Throws InvalidParameter / InvalidSparsity / InvalidSchedule on an inconsistent config.
inline void validate(const ExperimentConfig& c) {
    if (c.channel_length < 1) {
        throw InvalidParameter("channel_length must be at least 1");
    }
    if (c.sparsity_m < 1 || c.sparsity_m > c.channel_length) {
        throw InvalidSparsity("sparsity_m must lie in [1, channel_length]");
    }
    if (c.iterations < 1) {
        throw InvalidParameter("iterations must be at least 1");
    }
    if (c.trials < 1) {
        throw InvalidParameter("trials must be at least 1");
    }
    if (!std::isfinite(c.snr_db)) {
        throw InvalidParameter("snr_db must be finite");
    }
    if (c.scenario == Scenario::tracking && (c.change_at == 0 || c.change_at >= c.iterations)) {
        throw InvalidSchedule("change_at must lie in (0, iterations)");
    }
    if (!(c.tail_fraction > 0.0 && c.tail_fraction <= 1.0)) {
        throw InvalidParameter("tail_fraction must lie in (0, 1]");
    }
    if (!(c.convergence_margin_db > 0.0)) {
        throw InvalidParameter("convergence_margin_db must be positive");
    }
    if (c.roster.empty()) {
        throw InvalidParameter("roster is empty");
    }
    for (std::size_t i = 0; i < c.roster.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (c.roster[i].label == c.roster[j].label) {
                throw InvalidParameter("duplicate roster label '" + c.roster[i].label + "'");
            }
        }
        validate(c.roster[i].spec);
    }
}

/// Everything random in one trial; shared by every algorithm in the roster.
struct TrialData {
    ChannelSchedule schedule;
    SampleStream    stream;
};

/// Draw order from the trial substream: channel(s), then input, then noise.
/// The noise variance is set from the first channel's energy.
inline TrialData draw_trial_data(const ExperimentConfig& c, std::size_t trial_index) {
    Rng       rng = trial_substream(c.master_seed, trial_index);
    TrialData t;
    if (c.scenario == Scenario::tracking) {
        t.schedule = make_tracking_schedule(c.channel_length, c.sparsity_m, c.iterations, c.change_at, rng, c.unit_energy);
    } else {
        t.schedule.segments.push_back({0, generate_sparse_channel(c.channel_length, c.sparsity_m, rng, c.unit_energy)});
    }
    auto         input    = generate_input_sequence(c.iterations, rng);
    const double variance = noise_variance_for_snr(t.schedule.segments.front().channel, c.snr_db, 1.0);
    auto         noise    = generate_noise(c.iterations, variance, rng);
    t.stream              = synthesize_desired(t.schedule, std::move(input), std::move(noise), variance);
    return t;
}

/// FNV-1a over the raw bytes of every channel tap and stream sample.
inline std::uint64_t trial_data_checksum(const TrialData& t) {
    std::uint64_t h   = 1469598103934665603ull;
    auto          mix = [&h](std::span<const double> values) {
        for (double v : values) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &v, sizeof v);
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 1099511628211ull;
            }
        }
    };
    for (const auto& seg : t.schedule.segments) {
        mix(seg.channel.taps);
    }
    mix(t.stream.input);
    mix(t.stream.noise);
    mix(t.stream.desired);
    return h;
}

/// Runs one filter over a trial's stream from w(0) = 0. Entry k of the result is
/// ||w_active(k) - w_hat(k)||^2, where w_hat(k) is the estimate that forms e(k).
inline std::vector<double> run_filter(const TrialData& data, const AlgorithmSpec<double>& spec,
                                      std::size_t trial_index = 0) {
    const auto&         input   = data.stream.input;
    const auto&         desired = data.stream.desired;
    const std::size_t   taps    = data.schedule.segments.front().channel.length();
    std::vector<double> msd(input.size());
    auto                state = make_filter_state(taps, spec);
    try {
        for (std::size_t k = 0; k < input.size(); ++k) {
            msd[k]      = msd_instant(data.schedule.active(k).taps, state.weights);
            auto result = step(std::move(state), input[k], desired[k], spec);
            state       = std::move(result.state);
        }
    } catch (const DivergenceError& e) {
        throw TrialDivergence(trial_index, e.what());
    }
    return msd;
}

/// One Monte Carlo trial of `spec` under `config`, from the (master_seed, trial_index) substream.
inline std::vector<double> run_trial(const ExperimentConfig& config, const AlgorithmSpec<double>& spec,
                                     std::size_t trial_index) {
    return run_filter(draw_trial_data(config, trial_index), spec, trial_index);
}

struct AlgorithmResult {
    std::string                label;
    LearningCurve              curve;
    double                     steady_state_db{std::numeric_limits<double>::quiet_NaN()};
    std::size_t                convergence_iteration{0};
    std::optional<std::size_t> post_change_convergence_iteration; // tracking only, relative to change_at
    double                     msd_sum{std::numeric_limits<double>::quiet_NaN()};
    std::size_t                diverged_trials{0};
    std::string                diagnostic; // empty unless the entry was aborted

    [[nodiscard]] bool aborted() const noexcept { return diverged_trials > 0; }
};

struct ExperimentResult {
    ExperimentConfig             config;
    std::vector<AlgorithmResult> entries;

    [[nodiscard]] bool any_diverged() const noexcept {
        return std::any_of(entries.begin(), entries.end(), [](const auto& e) { return e.aborted(); });
    }
    [[nodiscard]] const AlgorithmResult* find(std::string_view label) const {
        for (const auto& e : entries) {
            if (e.label == label) {
                return &e;
            }
        }
        return nullptr;
    }
};

struct RunOptions {
    std::size_t threads{0}; // 0 = hardware concurrency
};

inline std::size_t resolve_thread_count(std::size_t requested, std::size_t tasks) {
    std::size_t n = requested;
    if (n == 0) {
        n = std::max(1u, std::thread::hardware_concurrency());
    }
    return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(tasks, 1));
}

/// Fills the summary fields of an entry from its curve.
inline void summarize(AlgorithmResult& r, const ExperimentConfig& c) {
    if (r.aborted()) {
        return;
    }
    r.steady_state_db       = steady_state_msd(r.curve, c.tail_fraction);
    r.convergence_iteration = convergence_iteration(r.curve, c.convergence_margin_db, c.tail_fraction);
    r.msd_sum               = msd_time_sum(r.curve);
    if (c.scenario == Scenario::tracking) {
        const auto after = std::span<const double>(r.curve.msd).subspan(c.change_at);
        r.post_change_convergence_iteration = convergence_iteration(after, c.convergence_margin_db, c.tail_fraction);
    }
}

/// Runs every roster entry over `config.trials` paired trials and ensemble-averages.
///
/// Trials are distributed over worker threads, but each trial's curves are stored
/// by trial index and reduced in index order, so the result does not depend on
/// the thread count or scheduling. A divergent trial aborts only its own entry,
/// whose curve and summaries become NaN.
inline ExperimentResult run_experiment(const ExperimentConfig& config, RunOptions options = {}) {
    validate(config);

    const std::size_t n_alg = config.roster.size();
    const std::size_t n_tr  = config.trials;

    std::vector<std::vector<std::vector<double>>> curves(n_alg, std::vector<std::vector<double>>(n_tr));
    std::vector<std::vector<std::string>>          failures(n_alg, std::vector<std::string>(n_tr));
    std::exception_ptr                             fatal;
    std::atomic<bool>                              has_fatal{false};
    std::atomic<std::size_t>                       next{0};

    auto worker = [&] {
        for (std::size_t t = next.fetch_add(1); t < n_tr && !has_fatal.load(); t = next.fetch_add(1)) {
            try {
                const TrialData data = draw_trial_data(config, t);
                for (std::size_t a = 0; a < n_alg; ++a) {
                    try {
                        curves[a][t] = run_filter(data, config.roster[a].spec, t);
                    } catch (const TrialDivergence& e) {
                        failures[a][t] = e.what();
                    }
                }
            } catch (...) {
                if (!has_fatal.exchange(true)) {
                    fatal = std::current_exception();
                }
            }
        }
    };

    const std::size_t        n_threads = resolve_thread_count(options.threads, n_tr);
    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t i = 1; i < n_threads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    if (fatal) {
        std::rethrow_exception(fatal);
    }

    ExperimentResult result;
    result.config = config;
    for (std::size_t a = 0; a < n_alg; ++a) {
        AlgorithmResult r;
        r.label = config.roster[a].label;
        for (std::size_t t = 0; t < n_tr; ++t) {
            if (!failures[a][t].empty()) {
                if (r.diverged_trials++ == 0) {
                    r.diagnostic = r.label + " diverged in " + failures[a][t];
                }
            }
        }
        if (r.aborted()) {
            r.curve.msd.assign(config.iterations, std::numeric_limits<double>::quiet_NaN());
            r.curve.trials          = n_tr;
            r.curve.algorithm_label = r.label;
        } else {
            r.curve = ensemble_average(curves[a], r.label);
        }
        summarize(r, config);
        result.entries.push_back(std::move(r));
    }
    return result;
}

} // namespace sparse_afe

#endif // SPARSE_AFE_EXPERIMENT_HPP
