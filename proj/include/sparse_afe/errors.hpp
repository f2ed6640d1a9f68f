#ifndef SPARSE_AFE_ERRORS_HPP
#define SPARSE_AFE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparse_afe {

/// Sparsity count outside [1, channel length].
struct InvalidSparsity : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Mismatched or empty vector/curve shapes.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyStream : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidSchedule : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Algorithm hyperparameters violate their admissible ranges.
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// No Table preset exists for the requested sparsity level.
struct NoPreset : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when an update produces a non-finite weight (step size too large).
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A divergence tagged with the Monte Carlo trial that produced it.
struct TrialDivergence : DivergenceError {
    TrialDivergence(std::size_t trial, const std::string& what)
        : DivergenceError("trial " + std::to_string(trial) + ": " + what), trial_index(trial) {}
    std::size_t trial_index;
};

/// Config document rejected; `key_path` names the offending key (e.g. "roster[2].mu").
struct ConfigError : std::invalid_argument {
    ConfigError(std::string path, const std::string& what)
        : std::invalid_argument(path.empty() ? what : path + ": " + what), key_path(std::move(path)) {}
    std::string key_path;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sparse_afe

#endif // SPARSE_AFE_ERRORS_HPP
