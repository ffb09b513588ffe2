#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "csa/code.hpp"
#include "csa/decode.hpp"

namespace csa {

enum class Protocol { sa, thma, csa };

std::string_view to_string(Protocol protocol);
// Accepts "sa", "thma", "csa" (case-insensitive); throws std::invalid_argument otherwise.
Protocol parse_protocol(std::string_view text);

struct SimulationConfig {
    Protocol protocol = Protocol::csa;
    CodeParams code{7, 4};  // ignored for SA, which always uses one unit per burst
    long long n_sa = 400;
    int frames = 1000;
    int i_max = default_ic_iterations;
    std::uint64_t master_seed = 1;
    int jobs = 1;

    // The code actually placed on the frame: (1,1) for SA.
    CodeParams frame_code() const;
    // Sweeps the decoder can use: 1 for SA and THMA.
    int effective_i_max() const;
};

struct ThroughputStats {
    Protocol protocol;
    CodeParams code;
    std::optional<long long> n_sa;  // empty for the asymptotic (N_SA -> infinity) analysis
    double g_nominal;
    double g_realized;              // M / N_SA with M = round(G N_SA)
    int frames;                     // 0 for asymptotic rows
    int i_max;
    std::uint64_t seed;
    double t_mean;                  // recovered bursts per SA slot
    double t_stderr;
    double plr_mean;                // fraction of bursts lost
    double plr_stderr;
};

// Averages `frames` independent frames at load g. Frame f uses seed
// derive_seed(master_seed, f); results do not depend on `jobs`.
ThroughputStats simulate_point(const SimulationConfig& config, double g);

// One simulate_point per grid value; point j runs with master seed
// derive_seed(config.master_seed, j).
std::vector<ThroughputStats> sweep(const SimulationConfig& config, const std::vector<double>& g_grid);

// Density-evolution counterpart of sweep: CSA uses `i_max` iterations,
// THMA a single iteration, SA the (1,1) code with a single iteration.
std::vector<ThroughputStats> asymptotic_sweep(Protocol protocol, const CodeParams& code,
                                              const std::vector<double>& g_grid, int i_max);

}  // namespace csa
