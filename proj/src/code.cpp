#include "csa/code.hpp"

#include <cmath>
#include <stdexcept>

namespace csa {

CodeParams::CodeParams(int n, int k) : n_(n), k_(k) {
    if (k < 1 || n <= k) {
        throw std::invalid_argument("invalid code (" + std::to_string(n) + "," +
                                    std::to_string(k) + "): need 1 <= k < n");
    }
}

double CodeParams::power_penalty_db() const {
    return 10.0 * std::log10(static_cast<double>(n_) / k_);
}

std::string CodeParams::to_string() const {
    return "(" + std::to_string(n_) + "," + std::to_string(k_) + ")";
}

}  // namespace csa
