#ifndef SPARSE_AFE_SIGNAL_MODEL_HPP
#define SPARSE_AFE_SIGNAL_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace sparse_afe {

/// Ground-truth sparse FIR channel.
struct ChannelModel {
    std::vector<double>      taps;
    std::vector<std::size_t> support; // ascending indices of the nonzero taps
    std::size_t              sparsity_m{0};

    [[nodiscard]] std::size_t length() const noexcept { return taps.size(); }

    [[nodiscard]] double energy() const noexcept {
        return std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
    }

    bool operator==(const ChannelModel&) const = default;
};

/// Builds a channel from explicit taps; the support is every nonzero entry.
inline ChannelModel make_channel(std::vector<double> taps) {
    ChannelModel c;
    c.taps = std::move(taps);
    for (std::size_t i = 0; i < c.taps.size(); ++i) {
        if (c.taps[i] != 0.0) {
            c.support.push_back(i);
        }
    }
    c.sparsity_m = c.support.size();
    return c;
}

/// Input, noise and desired response of one identification run.
struct SampleStream {
    std::vector<double> input;
    std::vector<double> noise;
    std::vector<double> desired;
    double              noise_variance{0.0};
};

/// Piecewise-constant channel: segment i is active from its start until the next start.
struct ChannelSchedule {
    struct Segment {
        std::size_t  start_iteration{0};
        ChannelModel channel;
        bool         operator==(const Segment&) const = default;
    };
    std::vector<Segment> segments;

    [[nodiscard]] const ChannelModel& active(std::size_t k) const {
        auto it = std::upper_bound(segments.begin(), segments.end(), k,
                                   [](std::size_t v, const Segment& s) { return v < s.start_iteration; });
        return std::prev(it)->channel;
    }

    bool operator==(const ChannelSchedule&) const = default;
};

/// Draws `m` support positions uniformly without replacement, fills them with
/// standard Gaussian values and (optionally) scales the vector to unit energy.
inline ChannelModel generate_sparse_channel(std::size_t length, std::size_t m, Rng& rng, bool unit_energy = true) {
    if (m < 1 || m > length) {
        throw InvalidSparsity("sparsity m=" + std::to_string(m) + " must lie in [1, " + std::to_string(length) + "]");
    }

    std::vector<std::size_t> positions(length);
    std::iota(positions.begin(), positions.end(), std::size_t{0});

    ChannelModel c;
    c.taps.assign(length, 0.0);
    c.sparsity_m = m;
    c.support.reserve(m);
    std::sample(positions.begin(), positions.end(), std::back_inserter(c.support), static_cast<std::ptrdiff_t>(m),
                rng);

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t idx : c.support) {
        double v = 0.0;
        while (v == 0.0) { // a zero draw would break the support invariant
            v = gauss(rng);
        }
        c.taps[idx] = v;
    }

    if (unit_energy) {
        const double norm = std::sqrt(c.energy());
        for (double& t : c.taps) {
            t /= norm;
        }
    }
    return c;
}

/// i.i.d. zero-mean, unit-variance Gaussian excitation.
inline std::vector<double> generate_input_sequence(std::size_t n, Rng& rng) {
    if (n == 0) {
        throw EmptyStream("input sequence length must be at least 1");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double>              x(n);
    for (double& v : x) {
        v = gauss(rng);
    }
    return x;
}

/// White Gaussian noise with the given variance.
inline std::vector<double> generate_noise(std::size_t n, double variance, Rng& rng) {
    if (!(variance >= 0.0)) {
        throw InvalidParameter("noise variance must be non-negative");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double                     sigma = std::sqrt(variance);
    std::vector<double>              v(n);
    for (double& s : v) {
        s = sigma * gauss(rng);
    }
    return v;
}

/// sigma_v^2 = ||w||^2 * input_variance / 10^(snr_db / 10).
inline double noise_variance_for_snr(const ChannelModel& channel, double snr_db, double input_variance) {
    if (!(input_variance > 0.0)) {
        throw InvalidParameter("input variance must be positive");
    }
    return channel.energy() * input_variance / std::pow(10.0, snr_db / 10.0);
}

namespace detail {

// d(k) = sum_{i<M} w_i x(k-i), with x(j) = 0 for j < 0.
inline double convolve_at(std::span<const double> taps, std::span<const double> input, std::size_t k) {
    double      acc   = 0.0;
    std::size_t limit = std::min(taps.size(), k + 1);
    for (std::size_t i = 0; i < limit; ++i) {
        acc += taps[i] * input[k - i];
    }
    return acc;
}

} // namespace detail

/// desired[k] = w^T x(k) + v(k) with a zero-padded (cold-start) regressor.
inline SampleStream synthesize_desired(const ChannelModel& channel, std::vector<double> input, std::vector<double> noise,
                                       double noise_variance = 0.0) {
    if (input.size() != noise.size()) {
        throw ShapeError("input and noise lengths differ (" + std::to_string(input.size()) + " vs " +
                         std::to_string(noise.size()) + ")");
    }
    SampleStream s;
    s.desired.resize(input.size());
    for (std::size_t k = 0; k < input.size(); ++k) {
        s.desired[k] = detail::convolve_at(channel.taps, input, k) + noise[k];
    }
    s.input          = std::move(input);
    s.noise          = std::move(noise);
    s.noise_variance = noise_variance;
    return s;
}

/// Same as above, but sample k is filtered by the channel active at k.
inline SampleStream synthesize_desired(const ChannelSchedule& schedule, std::vector<double> input,
                                       std::vector<double> noise, double noise_variance = 0.0) {
    if (input.size() != noise.size()) {
        throw ShapeError("input and noise lengths differ");
    }
    if (schedule.segments.empty()) {
        throw InvalidSchedule("schedule has no segments");
    }
    SampleStream s;
    s.desired.resize(input.size());
    for (std::size_t k = 0; k < input.size(); ++k) {
        s.desired[k] = detail::convolve_at(schedule.active(k).taps, input, k) + noise[k];
    }
    s.input          = std::move(input);
    s.noise          = std::move(noise);
    s.noise_variance = noise_variance;
    return s;
}

/// Dense row-major matrix, just enough for the batch convolution form.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double&       operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const double& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] std::vector<double> multiply(std::span<const double> v) const {
        if (v.size() != cols_) {
            throw ShapeError("matrix-vector size mismatch");
        }
        std::vector<double> out(rows_, 0.0);
        for (std::size_t r = 0; r < rows_; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < cols_; ++c) {
                acc += (*this)(r, c) * v[c];
            }
            out[r] = acc;
        }
        return out;
    }

private:
    std::size_t         rows_;
    std::size_t         cols_;
    std::vector<double> data_;
};

/// N x M Toeplitz matrix whose row k is [x(k), x(k-1), ..., x(k-M+1)], zero-padded.
inline Matrix build_convolution_matrix(std::span<const double> input, std::size_t channel_length) {
    if (input.empty() || channel_length == 0) {
        throw ShapeError("convolution matrix needs N >= 1 and M >= 1");
    }
    Matrix a(input.size(), channel_length);
    for (std::size_t k = 0; k < input.size(); ++k) {
        for (std::size_t i = 0; i < channel_length && i <= k; ++i) {
            a(k, i) = input[k - i];
        }
    }
    return a;
}

/// Two independently drawn channels, switching at `change_at`.
inline ChannelSchedule make_tracking_schedule(std::size_t length, std::size_t m, std::size_t total_iterations,
                                              std::size_t change_at, Rng& rng, bool unit_energy = true) {
    if (change_at == 0 || change_at >= total_iterations) {
        throw InvalidSchedule("change_at=" + std::to_string(change_at) + " must lie in (0, " +
                              std::to_string(total_iterations) + ")");
    }
    ChannelSchedule s;
    s.segments.push_back({0, generate_sparse_channel(length, m, rng, unit_energy)});
    s.segments.push_back({change_at, generate_sparse_channel(length, m, rng, unit_energy)});
    return s;
}

} // namespace sparse_afe

#endif // SPARSE_AFE_SIGNAL_MODEL_HPP
