#include "csa/rng.hpp"

#include <stdexcept>

namespace csa {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("SplitMix64::below: bound must be positive");
    }
    // 2^64 mod bound; draws under it would bias the low residues.
    const std::uint64_t reject_under = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = (*this)();
        if (r >= reject_under) {
            return r % bound;
        }
    }
}

}  // namespace csa
