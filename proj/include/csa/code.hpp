#pragma once

#include <string>

namespace csa {

// Packet-level (n,k) code shared by every user of a frame. Erasure recovery
// is modelled as MDS: any k of the n units reconstruct the whole burst.
class CodeParams {
public:
    // Throws std::invalid_argument unless 1 <= k < n.
    CodeParams(int n, int k);

    // The (1,1) shape of plain slotted ALOHA: one unit, one SA slot.
    static CodeParams uncoded() { return CodeParams{}; }

    int n() const { return n_; }
    int k() const { return k_; }
    bool is_uncoded() const { return n_ == k_; }

    double rate() const { return static_cast<double>(k_) / n_; }
    double power_penalty_db() const;

    std::string to_string() const;

    friend bool operator==(const CodeParams&, const CodeParams&) = default;

private:
    CodeParams() = default;

    int n_ = 1;
    int k_ = 1;
};

}  // namespace csa
