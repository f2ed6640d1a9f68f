#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <sparse_afe/metrics.hpp>

using namespace sparse_afe;

TEST(MsdInstant, Examples) {
    const std::vector<double> w{0.3, -0.4, 0.0};
    EXPECT_EQ(msd_instant(w, w), 0.0);
    EXPECT_EQ(msd_instant(std::vector<double>{1, 0}, std::vector<double>{0, 0}), 1.0);

    const double              s = 1.0 / std::sqrt(3.0);
    const std::vector<double> unit{s, -s, s};
    EXPECT_NEAR(msd_instant(unit, std::vector<double>(3, 0.0)), 1.0, 1e-15);
    EXPECT_THROW(msd_instant(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeError);
}

TEST(MsdInstant, SignFlipAndPermutationInvariance) {
    std::mt19937_64                  rng(6);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(10), b(10);
        for (std::size_t i = 0; i < 10; ++i) {
            a[i] = g(rng);
            b[i] = g(rng);
        }
        const double base = msd_instant(a, b);
        // swapping arguments flips every error component
        EXPECT_NEAR(msd_instant(b, a), base, 1e-14);

        std::vector<std::size_t> perm(10);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> pa(10), pb(10);
        for (std::size_t i = 0; i < 10; ++i) {
            pa[i] = a[perm[i]];
            pb[i] = b[perm[i]];
        }
        EXPECT_NEAR(msd_instant(pa, pb), base, 1e-12);
    }
}

TEST(EnsembleAverage, Examples) {
    const std::vector<std::vector<double>> one{{0.5, 0.25, 0.125}};
    EXPECT_EQ(ensemble_average(one).msd, one[0]);
    EXPECT_EQ(ensemble_average(one).trials, 1u);

    const std::vector<std::vector<double>> two{std::vector<double>(5, 0.2), std::vector<double>(5, 0.4)};
    for (double v : ensemble_average(two).msd) {
        EXPECT_NEAR(v, 0.3, 1e-15);
    }
}

TEST(EnsembleAverage, ShapeErrors) {
    EXPECT_THROW(ensemble_average(std::vector<std::vector<double>>{}), ShapeError);
    EXPECT_THROW(ensemble_average(std::vector<std::vector<double>>{{1, 2}, {1}}), ShapeError);
}

TEST(EnsembleAverage, Linearity) {
    std::mt19937_64                        rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>>       curves(7, std::vector<double>(20));
    for (auto& c : curves) {
        for (double& v : c) {
            v = u(rng);
        }
    }
    auto scaled = curves;
    for (auto& c : scaled) {
        for (double& v : c) {
            v *= 3.5;
        }
    }
    const auto a = ensemble_average(curves);
    const auto b = ensemble_average(scaled);
    for (std::size_t k = 0; k < 20; ++k) {
        EXPECT_NEAR(b.msd[k], 3.5 * a.msd[k], 1e-14);
    }
}

// Across many repetitions, the variance of a 200-trial mean is var / 200.
TEST(EnsembleAverage, VarianceOfMeanShrinksWithTrials) {
    std::mt19937_64                  rng(17);
    std::exponential_distribution<>  draw(1.0); // variance 1
    constexpr std::size_t            reps = 2000, trials = 200, len = 4;
    std::vector<double>              means;
    for (std::size_t r = 0; r < reps; ++r) {
        std::vector<std::vector<double>> curves(trials, std::vector<double>(len));
        for (auto& c : curves) {
            for (double& v : c) {
                v = draw(rng);
            }
        }
        means.push_back(ensemble_average(curves).msd[0]);
    }
    double m = 0, var = 0;
    for (double v : means) {
        m += v;
    }
    m /= reps;
    for (double v : means) {
        var += (v - m) * (v - m);
    }
    var /= reps - 1;
    EXPECT_NEAR(var, 1.0 / trials, 0.15 / trials); // ~5 sigma for 2000 reps
}

TEST(ToDb, Examples) {
    EXPECT_EQ(to_db(1.0), 0.0);
    EXPECT_NEAR(to_db(0.001), -30.0, 1e-12);
    EXPECT_NEAR(to_db(0.5), -3.010299956639812, 1e-12);
    EXPECT_NEAR(to_db(0.0), -150.0, 1e-12);
}

TEST(ToDb, RoundTrip) {
    for (double e = -12; e <= 6; e += 0.37) {
        const double v = std::pow(10.0, e);
        EXPECT_NEAR(from_db(to_db(v)), v, 1e-12 * std::max(1.0, v) + 1e-24) << v;
        EXPECT_LE(std::abs(from_db(to_db(v)) - v) / v, 1e-12);
    }
}

TEST(SteadyState, Examples) {
    EXPECT_NEAR(steady_state_msd(std::vector<double>(100, 0.02)), 10 * std::log10(0.02), 1e-12);

    std::vector<double> c(1000, 1.0);
    std::fill(c.end() - 100, c.end(), 0.001);
    EXPECT_NEAR(steady_state_msd(c), -30.0, 1e-12);

    const std::vector<double> ramp{1, 2, 3, 4};
    EXPECT_NEAR(steady_state_msd(ramp, 1.0), to_db(2.5), 1e-12);
    // ceil(0.1 * 4) = 1 sample
    EXPECT_NEAR(steady_state_msd(ramp, 0.1), to_db(4.0), 1e-12);

    EXPECT_THROW(steady_state_msd(std::vector<double>{}), ShapeError);
    EXPECT_THROW(steady_state_msd(ramp, 0.0), InvalidParameter);
}

TEST(SteadyState, IncreasesWithPositiveOffset) {
    std::mt19937_64                        rng(1);
    std::uniform_real_distribution<double> u(1e-4, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> c(50);
        for (double& v : c) {
            v = u(rng);
        }
        auto shifted = c;
        for (double& v : shifted) {
            v += 1e-3;
        }
        EXPECT_GT(steady_state_msd(shifted), steady_state_msd(c));
    }
}

TEST(ConvergenceIteration, Examples) {
    EXPECT_EQ(convergence_iteration(std::vector<double>(300, 0.1)), 0u);

    std::vector<double> step(1000, 1.0);
    std::fill(step.begin() + 500, step.end(), 0.001);
    EXPECT_EQ(convergence_iteration(step), 500u);

    // Monotone decay: the last sample sits more than 1 dB below the tail mean.
    std::vector<double> decay(100);
    for (std::size_t k = 0; k < decay.size(); ++k) {
        decay[k] = std::pow(10.0, -static_cast<double>(k) / 20.0);
    }
    EXPECT_EQ(convergence_iteration(decay), decay.size());
}
