#ifndef SPARSE_AFE_METRICS_HPP
#define SPARSE_AFE_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace sparse_afe {

/// Ensemble-averaged MSD per iteration, linear scale.
struct LearningCurve {
    std::vector<double> msd;
    std::size_t         trials{1};
    std::string         algorithm_label;

    [[nodiscard]] std::size_t size() const noexcept { return msd.size(); }
    [[nodiscard]] bool        empty() const noexcept { return msd.empty(); }
};

inline constexpr double kDbFloor = 1e-15;

/// Squared deviation sum_i (w_true[i] - w_hat[i])^2.
template<typename Real = double>
Real msd_instant(std::span<const Real> w_true, std::span<const Real> w_hat) {
    if (w_true.size() != w_hat.size()) {
        throw ShapeError("msd_instant: length mismatch (" + std::to_string(w_true.size()) + " vs " +
                         std::to_string(w_hat.size()) + ")");
    }
    Real acc = 0;
    for (std::size_t i = 0; i < w_true.size(); ++i) {
        const Real d = w_true[i] - w_hat[i];
        acc += d * d;
    }
    return acc;
}

inline double msd_instant(const std::vector<double>& w_true, const std::vector<double>& w_hat) {
    return msd_instant<double>(std::span<const double>(w_true), std::span<const double>(w_hat));
}

/// 10 log10(linear), with values below 1e-15 (including exact zeros) clamped to the floor.
inline double to_db(double linear) {
    return 10.0 * std::log10(std::max(linear, kDbFloor));
}

inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Pointwise arithmetic mean over trials, accumulated in list order.
inline LearningCurve ensemble_average(std::span<const std::vector<double>> per_trial, std::string label = {}) {
    if (per_trial.empty()) {
        throw ShapeError("ensemble_average: no trials");
    }
    const std::size_t n = per_trial.front().size();
    LearningCurve     out;
    out.msd.assign(n, 0.0);
    for (const auto& curve : per_trial) {
        if (curve.size() != n) {
            throw ShapeError("ensemble_average: ragged trial lengths");
        }
        for (std::size_t k = 0; k < n; ++k) {
            out.msd[k] += curve[k];
        }
    }
    const double inv = 1.0 / static_cast<double>(per_trial.size());
    for (double& v : out.msd) {
        v *= inv;
    }
    out.trials          = per_trial.size();
    out.algorithm_label = std::move(label);
    return out;
}

/// Number of tail samples used for a steady-state estimate: ceil(fraction * n), at least 1.
inline std::size_t tail_length(std::size_t n, double tail_fraction) {
    auto len = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(len, 1, n);
}

/// dB level of the mean of the final ceil(tail_fraction * N) samples.
inline double steady_state_msd(std::span<const double> msd, double tail_fraction = 0.1) {
    if (msd.empty()) {
        throw ShapeError("steady_state_msd: empty curve");
    }
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw InvalidParameter("steady_state_msd: tail_fraction must lie in (0, 1]");
    }
    const std::size_t len  = tail_length(msd.size(), tail_fraction);
    const auto        tail = msd.last(len);
    return to_db(std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(len));
}

inline double steady_state_msd(const LearningCurve& curve, double tail_fraction = 0.1) {
    return steady_state_msd(std::span<const double>(curve.msd), tail_fraction);
}

/// Smallest k such that every sample from k on lies within margin_db of the
/// steady-state level; returns N when even the last sample is outside the band.
inline std::size_t convergence_iteration(std::span<const double> msd, double margin_db = 1.0,
                                         double tail_fraction = 0.1) {
    if (msd.empty()) {
        return 0;
    }
    const double level = steady_state_msd(msd, tail_fraction);
    std::size_t  k     = msd.size();
    while (k > 0 && std::abs(to_db(msd[k - 1]) - level) <= margin_db) {
        --k;
    }
    return k;
}

inline std::size_t convergence_iteration(const LearningCurve& curve, double margin_db = 1.0,
                                         double tail_fraction = 0.1) {
    return convergence_iteration(std::span<const double>(curve.msd), margin_db, tail_fraction);
}

/// The time-summed deviation (sum of the per-iteration curve).
inline double msd_time_sum(const LearningCurve& curve) {
    return std::accumulate(curve.msd.begin(), curve.msd.end(), 0.0);
}

} // namespace sparse_afe

#endif // SPARSE_AFE_METRICS_HPP
