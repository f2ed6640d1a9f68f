#ifndef SPARSE_AFE_RANDOM_HPP
#define SPARSE_AFE_RANDOM_HPP

#include <cstdint>
#include <random>

namespace sparse_afe {

using Rng = std::mt19937_64;

/// Generator for Monte Carlo trial `trial` of an experiment seeded with `master_seed`.
///
/// The substream is keyed on the pair (master_seed, trial) through std::seed_seq,
/// so a trial's draws never depend on which other trials ran or in what order.
inline Rng trial_substream(std::uint64_t master_seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      0x5AFEu};
    return Rng(seq);
}

} // namespace sparse_afe

#endif // SPARSE_AFE_RANDOM_HPP
