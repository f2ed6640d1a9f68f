#ifndef SPARSE_AFE_ADAPTIVE_FILTERS_HPP
#define SPARSE_AFE_ADAPTIVE_FILTERS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace sparse_afe {

// Hyperparameter sets, one per algorithm family.

template<std::floating_point Real = double>
struct LmsSpec {
    Real mu{Real(0.005)};
    bool operator==(const LmsSpec&) const = default;
};

/// Zero-attracting LMS. Only rho = lambda * mu is stored.
template<std::floating_point Real = double>
struct ZaLmsSpec {
    Real mu{Real(0.005)};
    Real rho{Real(0)};
    bool operator==(const ZaLmsSpec&) const = default;
};

template<std::floating_point Real = double>
struct NlmsSpec {
    Real mu{Real(0.02)};
    Real epsilon{Real(1e-4)};
    bool operator==(const NlmsSpec&) const = default;
};

/// Mixed-norm LMS/LMF. With `variable == false` the mixing weight stays at alpha0,
/// which is the same trajectory as gamma = 0, delta = 1.
template<std::floating_point Real = double>
struct LmmnSpec {
    Real mu{Real(0.008)};
    Real alpha0{Real(0.7)};
    Real gamma{Real(0)};
    Real beta{Real(0)};
    Real delta{Real(1)};
    bool variable{false};
    bool operator==(const LmmnSpec&) const = default;
};

template<std::floating_point Real = double>
using AlgorithmSpec = std::variant<LmsSpec<Real>, ZaLmsSpec<Real>, NlmsSpec<Real>, LmmnSpec<Real>>;

template<std::floating_point Real>
constexpr std::string_view algorithm_name(const AlgorithmSpec<Real>& spec) noexcept {
    constexpr std::string_view names[] = {"lms", "zalms", "nlms", "lmmn"};
    return names[spec.index()];
}

namespace detail {

inline void require(bool ok, const char* what) {
    if (!ok) {
        throw InvalidParameter(what);
    }
}

template<std::floating_point Real>
bool in_unit_interval(Real v) {
    return v >= Real(0) && v <= Real(1);
}

} // namespace detail

/// Throws InvalidParameter when a hyperparameter is outside its admissible range.
template<std::floating_point Real>
void validate(const AlgorithmSpec<Real>& spec) {
    using detail::require;
    std::visit(
        [](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            require(s.mu > Real(0) && std::isfinite(s.mu), "mu must be positive and finite");
            if constexpr (std::is_same_v<S, ZaLmsSpec<Real>>) {
                require(s.rho >= Real(0), "rho must be non-negative");
            } else if constexpr (std::is_same_v<S, NlmsSpec<Real>>) {
                require(s.epsilon > Real(0), "epsilon must be positive");
            } else if constexpr (std::is_same_v<S, LmmnSpec<Real>>) {
                require(detail::in_unit_interval(s.alpha0), "alpha0 must lie in [0, 1]");
                require(detail::in_unit_interval(s.beta), "beta must lie in [0, 1]");
                require(detail::in_unit_interval(s.delta), "delta must lie in [0, 1]");
                require(s.gamma >= Real(0), "gamma must be non-negative");
            }
        },
        spec);
}

/// Per-filter adaptation state. Treated as a value: every operation below
/// consumes a state and returns the successor.
template<std::floating_point Real = double>
struct FilterState {
    std::vector<Real> weights;    // w_hat(k)
    std::vector<Real> regressor;  // x(k), newest sample first
    Real              alpha{1};   // mixing weight alpha(k), LMMN only
    Real              p{0};       // smoothed error correlation p(k), LMMN only
    Real              prev_error{0};
    std::size_t       iteration{0};

    bool operator==(const FilterState&) const = default;
};

/// Fresh state: zero weights, zero regressor, alpha = alpha0 (1 for non-LMMN), p = 0.
template<std::floating_point Real>
FilterState<Real> make_filter_state(std::size_t taps, const AlgorithmSpec<Real>& spec) {
    FilterState<Real> s;
    s.weights.assign(taps, Real(0));
    s.regressor.assign(taps, Real(0));
    if (const auto* lmmn = std::get_if<LmmnSpec<Real>>(&spec)) {
        s.alpha = lmmn->alpha0;
    }
    return s;
}

/// Shifts the regressor by one, inserting the newest sample at index 0.
template<std::floating_point Real>
FilterState<Real> push_regressor(FilterState<Real> state, Real x_new) {
    auto& r = state.regressor;
    if (!r.empty()) {
        std::copy_backward(r.begin(), r.end() - 1, r.end());
        r.front() = x_new;
    }
    return state;
}

/// A-priori error e(k) = d(k) - w_hat^T(k) x(k).
template<std::floating_point Real>
Real predict_and_error(const FilterState<Real>& state, Real d) {
    return d - std::inner_product(state.weights.begin(), state.weights.end(), state.regressor.begin(), Real(0));
}

namespace detail {

template<std::floating_point Real>
void check_finite_error(Real e) {
    if (!std::isfinite(e)) {
        throw DivergenceError("non-finite estimation error; step size is likely too large");
    }
}

template<std::floating_point Real>
void check_finite_weights(const std::vector<Real>& w) {
    if (!std::all_of(w.begin(), w.end(), [](Real v) { return std::isfinite(v); })) {
        throw DivergenceError("non-finite filter weight; step size is likely too large");
    }
}

// w <- w + gain * x
template<std::floating_point Real>
void add_scaled_regressor(FilterState<Real>& s, Real gain) {
    for (std::size_t i = 0; i < s.weights.size(); ++i) {
        s.weights[i] += gain * s.regressor[i];
    }
}

template<std::floating_point Real>
constexpr Real sign(Real v) noexcept {
    return static_cast<Real>((Real(0) < v) - (v < Real(0)));
}

} // namespace detail

/// w <- w + mu e x.
template<std::floating_point Real>
FilterState<Real> lms_step(FilterState<Real> state, Real e, const LmsSpec<Real>& spec) {
    detail::check_finite_error(e);
    detail::add_scaled_regressor(state, spec.mu * e);
    detail::check_finite_weights(state.weights);
    return state;
}

/// w <- w + mu e x - rho sgn(w), with sgn(0) = 0. Weights smaller than rho
/// in magnitude can overshoot past zero.
template<std::floating_point Real>
FilterState<Real> zalms_step(FilterState<Real> state, Real e, const ZaLmsSpec<Real>& spec) {
    detail::check_finite_error(e);
    const Real gain = spec.mu * e;
    for (std::size_t i = 0; i < state.weights.size(); ++i) {
        const Real attract = spec.rho * detail::sign(state.weights[i]);
        state.weights[i] += gain * state.regressor[i] - attract;
    }
    detail::check_finite_weights(state.weights);
    return state;
}

/// w <- w + mu e x / (epsilon + x^T x).
template<std::floating_point Real>
FilterState<Real> nlms_step(FilterState<Real> state, Real e, const NlmsSpec<Real>& spec) {
    detail::check_finite_error(e);
    const Real power =
        std::inner_product(state.regressor.begin(), state.regressor.end(), state.regressor.begin(), Real(0));
    detail::add_scaled_regressor(state, spec.mu * e / (spec.epsilon + power));
    detail::check_finite_weights(state.weights);
    return state;
}

/// w <- w + mu [alpha e + 2 (1 - alpha) e^3] x, using the state's current alpha in both terms.
///
/// This is -(mu/2) times the gradient of alpha e^2 + (1 - alpha) e^4, i.e. the
/// factor 2 of the quadratic term is folded into mu.
template<std::floating_point Real>
FilterState<Real> lmmn_step(FilterState<Real> state, Real e, const LmmnSpec<Real>& spec) {
    detail::check_finite_error(e);
    const Real a    = state.alpha;
    const Real gain = spec.mu * (a * e + Real(2) * (Real(1) - a) * e * e * e);
    detail::add_scaled_regressor(state, gain);
    detail::check_finite_weights(state.weights);
    return state;
}

/// p <- beta p + (1 - beta) e_new e_prev, then alpha <- clamp(delta alpha + gamma p^2, 0, 1).
template<std::floating_point Real>
FilterState<Real> update_mixing_parameter(FilterState<Real> state, Real e_new, Real e_prev,
                                          const LmmnSpec<Real>& spec) {
    state.p     = spec.beta * state.p + (Real(1) - spec.beta) * e_new * e_prev;
    state.alpha = std::clamp(spec.delta * state.alpha + spec.gamma * state.p * state.p, Real(0), Real(1));
    return state;
}

template<std::floating_point Real>
struct StepResult {
    FilterState<Real> state;
    Real              error;
};

/// One full adaptation cycle: shift in x_new, form the a-priori error against d,
/// apply the variant's update, then (variable-mixing LMMN only) advance p and alpha
/// with e(k+1) = this error and e(k) = the previous one.
template<std::floating_point Real>
StepResult<Real> step(FilterState<Real> state, Real x_new, Real d, const AlgorithmSpec<Real>& spec) {
    state        = push_regressor(std::move(state), x_new);
    const Real e = predict_and_error(state, d);

    state = std::visit(
        [&](const auto& s) -> FilterState<Real> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, LmsSpec<Real>>) {
                return lms_step(std::move(state), e, s);
            } else if constexpr (std::is_same_v<S, ZaLmsSpec<Real>>) {
                return zalms_step(std::move(state), e, s);
            } else if constexpr (std::is_same_v<S, NlmsSpec<Real>>) {
                return nlms_step(std::move(state), e, s);
            } else {
                const Real e_prev = state.prev_error;
                auto       next   = lmmn_step(std::move(state), e, s);
                if (s.variable) {
                    next = update_mixing_parameter(std::move(next), e, e_prev, s);
                }
                return next;
            }
        },
        spec);

    state.prev_error = e;
    ++state.iteration;
    return {std::move(state), e};
}

} // namespace sparse_afe

#endif // SPARSE_AFE_ADAPTIVE_FILTERS_HPP
