#include "csa/frame.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "csa/rng.hpp"

namespace csa {

FrameConfig FrameConfig::from_load(long long n_sa, const CodeParams& code, double offered_load) {
    if (!(offered_load >= 0.0) || !std::isfinite(offered_load)) {
        throw std::invalid_argument("offered load must be non-negative, got " +
                                    std::to_string(offered_load));
    }
    FrameConfig config{n_sa, code, std::llround(offered_load * static_cast<double>(n_sa))};
    config.validate();
    return config;
}

void FrameConfig::validate() const {
    if (n_sa < 1) {
        throw std::invalid_argument("n_sa must be >= 1");
    }
    if (users < 0) {
        throw std::invalid_argument("user count must be >= 0");
    }
    if (code.n() > n_csa()) {
        throw std::invalid_argument("code length " + std::to_string(code.n()) +
                                    " exceeds frame size N_CSA=" + std::to_string(n_csa()));
    }
    if (n_csa() > 0xFFFFFFFFLL || users > 0xFFFFFFFFLL) {
        throw std::invalid_argument("frame too large");
    }
}

FrameGraph::FrameGraph(std::uint32_t slots, int units_per_burst, std::vector<SlotIndex> assignments)
    : slots_(slots), bursts_(0), units_(units_per_burst), assignments_(std::move(assignments)),
      slot_degree_(slots, 0) {
    if (units_ < 1 || static_cast<std::uint32_t>(units_) > slots_) {
        throw std::invalid_argument("units per burst must lie in [1, slot count]");
    }
    if (assignments_.size() % static_cast<std::size_t>(units_) != 0) {
        throw std::invalid_argument("assignment list is not a whole number of bursts");
    }
    bursts_ = static_cast<std::uint32_t>(assignments_.size() / static_cast<std::size_t>(units_));
    for (BurstIndex b = 0; b < bursts_; ++b) {
        const auto own = slots_of(b);
        for (std::size_t i = 0; i < own.size(); ++i) {
            if (own[i] >= slots_) {
                throw std::invalid_argument("burst " + std::to_string(b) + " uses slot " +
                                            std::to_string(own[i]) + " outside the frame");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (own[j] == own[i]) {
                    throw std::invalid_argument("burst " + std::to_string(b) +
                                                " sends two units in slot " + std::to_string(own[i]));
                }
            }
            ++slot_degree_[own[i]];
        }
    }
}

namespace {

// Partial Fisher-Yates over the virtual array [0, slots): only displaced
// entries are kept in `moved`, so a draw costs O(units^2) with units small.
void draw_slots(SplitMix64& rng, std::uint32_t slots, int units,
                std::vector<std::pair<SlotIndex, SlotIndex>>& moved, SlotIndex* out) {
    moved.clear();
    auto find = [&](SlotIndex pos) {
        return std::find_if(moved.begin(), moved.end(), [pos](const auto& e) { return e.first == pos; });
    };
    auto value_at = [&](SlotIndex pos) {
        const auto it = find(pos);
        return it == moved.end() ? pos : it->second;
    };

    for (int i = 0; i < units; ++i) {
        const auto pos = static_cast<SlotIndex>(i);
        const auto pick = static_cast<SlotIndex>(pos + rng.below(slots - pos));
        const SlotIndex chosen = value_at(pick);
        const SlotIndex displaced = value_at(pos);
        if (const auto it = find(pick); it != moved.end()) {
            it->second = displaced;
        } else {
            moved.emplace_back(pick, displaced);
        }
        out[i] = chosen;
    }
}

}  // namespace

FrameGraph build_frame(std::uint32_t slots, int units_per_burst, std::uint32_t bursts, std::uint64_t seed) {
    if (units_per_burst < 1 || static_cast<std::uint32_t>(units_per_burst) > slots) {
        throw std::invalid_argument("cannot place " + std::to_string(units_per_burst) + " distinct units in " +
                                    std::to_string(slots) + " slots");
    }
    const auto units = static_cast<std::size_t>(units_per_burst);
    std::vector<SlotIndex> assignments(static_cast<std::size_t>(bursts) * units);
    std::vector<std::pair<SlotIndex, SlotIndex>> moved;
    moved.reserve(units);
    for (std::uint32_t b = 0; b < bursts; ++b) {
        SplitMix64 rng(derive_seed(seed, b));
        draw_slots(rng, slots, units_per_burst, moved, assignments.data() + b * units);
    }
    return FrameGraph(slots, units_per_burst, std::move(assignments));
}

FrameGraph build_frame(const FrameConfig& config, std::uint64_t seed) {
    config.validate();
    return build_frame(static_cast<std::uint32_t>(config.n_csa()), config.code.n(),
                       static_cast<std::uint32_t>(config.users), seed);
}

DegreeDistribution empirical_degree_dist(const FrameGraph& frame) {
    std::uint32_t top = 0;
    for (const auto d : frame.slot_degrees()) {
        top = std::max(top, d);
    }
    DegreeDistribution dist;
    dist.perspective = Perspective::node;
    dist.coeffs.assign(static_cast<std::size_t>(top) + 1, 0.0);
    for (const auto d : frame.slot_degrees()) {
        dist.coeffs[d] += 1.0;
    }
    for (double& c : dist.coeffs) {
        c /= frame.slot_count();
    }
    return dist;
}

void write_frame_text(std::ostream& os, const FrameGraph& frame) {
    for (BurstIndex b = 0; b < frame.burst_count(); ++b) {
        const auto own = frame.slots_of(b);
        for (std::size_t i = 0; i < own.size(); ++i) {
            os << (i ? " " : "") << own[i];
        }
        os << '\n';
    }
}

}  // namespace csa
