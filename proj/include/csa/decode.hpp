#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "csa/code.hpp"
#include "csa/frame.hpp"

namespace csa {

// Default cap on IC sweeps.
inline constexpr int default_ic_iterations = 20;
inline constexpr int unlimited_iterations = std::numeric_limits<int>::max();

struct RecoveryEvent {
    int iteration;
    BurstIndex burst;
    SlotIndex trigger_slot;  // slot whose clean unit completed the k-th known unit
};

struct DecodeResult {
    std::vector<BurstIndex> recovered;  // ascending
    int iterations_used = 0;            // sweeps that recovered at least one burst
    std::vector<std::uint32_t> per_iteration_recovered;
    std::vector<RecoveryEvent> trace;   // filled only when requested
};

// Iterative interference cancellation with MDS local decoding. One iteration
// is a flooding sweep: every burst holding at least k clean units at the
// start of the sweep is recovered, and all of its units are cancelled
// before the next sweep starts. Stops at a fixed point or after i_max sweeps.
DecodeResult ic_decode(const FrameGraph& frame, const CodeParams& code,
                       int i_max = default_ic_iterations, bool record_trace = false);

// Time-hopping multiple access: the first sweep of ic_decode, no cancellation.
DecodeResult thma_decode(const FrameGraph& frame, const CodeParams& code);

// Slotted ALOHA: a burst survives iff its single slot is collision-free.
DecodeResult sa_decode(const FrameGraph& frame);

// Serial peeling to closure, recovering one decodable burst at a time in an
// order drawn from `schedule_seed`. The closure does not depend on the order.
std::vector<BurstIndex> peel_closure(const FrameGraph& frame, const CodeParams& code,
                                     std::uint64_t schedule_seed);

// "iteration burst slot" per recovery event.
void write_trace_text(std::ostream& os, const DecodeResult& result);

}  // namespace csa
