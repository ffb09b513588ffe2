#include "csa/decode.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include "csa/rng.hpp"

namespace csa {

namespace {

void require_matching(const FrameGraph& frame, const CodeParams& code) {
    if (frame.units_per_burst() != code.n()) {
        throw std::invalid_argument("frame carries " + std::to_string(frame.units_per_burst()) +
                                    " units per burst but code is " + code.to_string());
    }
}

// Working state of the peeling decoder. Each slot keeps the number of
// unresolved units and the XOR of their burst ids, so the lone survivor of
// a slot is known in O(1) once its count drops to one.
class Peeler {
public:
    Peeler(const FrameGraph& frame, const CodeParams& code)
        : frame_(frame), k_(static_cast<std::uint32_t>(code.k())),
          remaining_(frame.slot_degrees().begin(), frame.slot_degrees().end()),
          occupant_xor_(frame.slot_count(), 0), clean_(frame.burst_count(), 0),
          trigger_(frame.burst_count(), 0), recovered_(frame.burst_count(), 0) {
        for (BurstIndex b = 0; b < frame.burst_count(); ++b) {
            for (const SlotIndex s : frame.slots_of(b)) {
                occupant_xor_[s] ^= b;
                if (remaining_[s] == 1 && ++clean_[b] == k_) {
                    trigger_[b] = s;
                }
            }
        }
    }

    std::vector<BurstIndex> initially_decodable() const {
        std::vector<BurstIndex> ready;
        for (BurstIndex b = 0; b < frame_.burst_count(); ++b) {
            if (clean_[b] >= k_) ready.push_back(b);
        }
        return ready;
    }

    void mark(BurstIndex b) { recovered_[b] = 1; }
    bool is_recovered(BurstIndex b) const { return recovered_[b] != 0; }
    SlotIndex trigger(BurstIndex b) const { return trigger_[b]; }

    // Removes the units of a recovered burst; bursts that reach k clean
    // units as a result are appended to `newly_ready`.
    template <class Sink>
    void cancel(BurstIndex b, Sink&& newly_ready) {
        for (const SlotIndex s : frame_.slots_of(b)) {
            --remaining_[s];
            occupant_xor_[s] ^= b;
            if (remaining_[s] != 1) continue;
            const BurstIndex survivor = occupant_xor_[s];
            if (recovered_[survivor]) continue;
            if (++clean_[survivor] == k_) {
                trigger_[survivor] = s;
                newly_ready(survivor);
            }
        }
    }

    std::vector<BurstIndex> recovered_list() const {
        std::vector<BurstIndex> out;
        for (BurstIndex b = 0; b < frame_.burst_count(); ++b) {
            if (recovered_[b]) out.push_back(b);
        }
        return out;
    }

private:
    const FrameGraph& frame_;
    std::uint32_t k_;
    std::vector<std::uint32_t> remaining_;
    std::vector<BurstIndex> occupant_xor_;
    std::vector<std::uint32_t> clean_;
    std::vector<SlotIndex> trigger_;
    std::vector<char> recovered_;
};

}  // namespace

DecodeResult ic_decode(const FrameGraph& frame, const CodeParams& code, int i_max, bool record_trace) {
    require_matching(frame, code);
    if (i_max < 1) {
        throw std::invalid_argument("i_max must be >= 1");
    }

    Peeler peeler(frame, code);
    DecodeResult result;
    std::vector<BurstIndex> ready = peeler.initially_decodable();
    std::vector<BurstIndex> next;
    for (int iteration = 1; iteration <= i_max && !ready.empty(); ++iteration) {
        for (const BurstIndex b : ready) {
            peeler.mark(b);
        }
        if (record_trace) {
            for (const BurstIndex b : ready) {
                result.trace.push_back({iteration, b, peeler.trigger(b)});
            }
        }
        next.clear();
        for (const BurstIndex b : ready) {
            peeler.cancel(b, [&next](BurstIndex r) { next.push_back(r); });
        }
        result.per_iteration_recovered.push_back(static_cast<std::uint32_t>(ready.size()));
        result.iterations_used = iteration;
        std::swap(ready, next);
    }
    result.recovered = peeler.recovered_list();
    return result;
}

DecodeResult thma_decode(const FrameGraph& frame, const CodeParams& code) {
    require_matching(frame, code);
    const Peeler peeler(frame, code);
    DecodeResult result;
    result.recovered = peeler.initially_decodable();
    if (!result.recovered.empty()) {
        result.iterations_used = 1;
        result.per_iteration_recovered.push_back(static_cast<std::uint32_t>(result.recovered.size()));
    }
    return result;
}

DecodeResult sa_decode(const FrameGraph& frame) {
    if (frame.units_per_burst() != 1) {
        throw std::invalid_argument("sa_decode: frame has " + std::to_string(frame.units_per_burst()) +
                                    " units per burst, slotted ALOHA needs 1");
    }
    return thma_decode(frame, CodeParams::uncoded());
}

std::vector<BurstIndex> peel_closure(const FrameGraph& frame, const CodeParams& code,
                                     std::uint64_t schedule_seed) {
    require_matching(frame, code);
    Peeler peeler(frame, code);
    SplitMix64 rng(schedule_seed);
    std::vector<BurstIndex> pool = peeler.initially_decodable();
    while (!pool.empty()) {
        const auto pick = static_cast<std::size_t>(rng.below(pool.size()));
        std::swap(pool[pick], pool.back());
        const BurstIndex b = pool.back();
        pool.pop_back();
        peeler.mark(b);
        peeler.cancel(b, [&pool](BurstIndex r) { pool.push_back(r); });
    }
    return peeler.recovered_list();
}

void write_trace_text(std::ostream& os, const DecodeResult& result) {
    for (const auto& e : result.trace) {
        os << e.iteration << ' ' << e.burst << ' ' << e.trigger_slot << '\n';
    }
}

}  // namespace csa
