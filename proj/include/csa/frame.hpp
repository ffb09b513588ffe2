#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "csa/code.hpp"
#include "csa/degree.hpp"

namespace csa {

using SlotIndex = std::uint32_t;
using BurstIndex = std::uint32_t;

struct FrameConfig {
    long long n_sa = 0;     // SA-equivalent slots per frame
    CodeParams code;
    long long users = 0;    // M, bursts in the frame

    long long n_csa() const { return static_cast<long long>(code.k()) * n_sa; }
    double offered_load() const { return n_sa > 0 ? static_cast<double>(users) / n_sa : 0.0; }

    // M = round(G * N_SA).
    static FrameConfig from_load(long long n_sa, const CodeParams& code, double offered_load);

    // Throws std::invalid_argument on n_sa < 1, users < 0 or n > N_CSA.
    void validate() const;
};

// Bipartite burst/slot graph of one MAC frame. Immutable once built.
class FrameGraph {
public:
    // Checks that every burst uses `units_per_burst` distinct slots below `slots`.
    FrameGraph(std::uint32_t slots, int units_per_burst, std::vector<SlotIndex> assignments);

    std::uint32_t slot_count() const { return slots_; }
    std::uint32_t burst_count() const { return bursts_; }
    int units_per_burst() const { return units_; }
    std::size_t edge_count() const { return assignments_.size(); }

    // Slots of burst b, in transmission (codeword position) order.
    std::span<const SlotIndex> slots_of(BurstIndex b) const {
        return {assignments_.data() + static_cast<std::size_t>(b) * units_, static_cast<std::size_t>(units_)};
    }
    std::span<const std::uint32_t> slot_degrees() const { return slot_degree_; }
    std::uint32_t slot_degree(SlotIndex s) const { return slot_degree_[s]; }

    friend bool operator==(const FrameGraph&, const FrameGraph&) = default;

private:
    std::uint32_t slots_;
    std::uint32_t bursts_;
    int units_;
    std::vector<SlotIndex> assignments_;  // burst-major, units_ per burst
    std::vector<std::uint32_t> slot_degree_;
};

// Each burst draws a uniform n-subset of the N_CSA slots from its own
// substream derive_seed(seed, burst index).
FrameGraph build_frame(const FrameConfig& config, std::uint64_t seed);
FrameGraph build_frame(std::uint32_t slots, int units_per_burst, std::uint32_t bursts, std::uint64_t seed);

// Histogram of slot degrees normalized by N_CSA.
DegreeDistribution empirical_degree_dist(const FrameGraph& frame);

// One line per burst, space-separated slot indices.
void write_frame_text(std::ostream& os, const FrameGraph& frame);

}  // namespace csa
