#include "csa/mc.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "csa/de.hpp"
#include "csa/frame.hpp"
#include "csa/rng.hpp"

namespace csa {

std::string_view to_string(Protocol protocol) {
    switch (protocol) {
        case Protocol::sa: return "sa";
        case Protocol::thma: return "thma";
        case Protocol::csa: return "csa";
    }
    return "?";
}

Protocol parse_protocol(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "sa") return Protocol::sa;
    if (lower == "thma") return Protocol::thma;
    if (lower == "csa") return Protocol::csa;
    throw std::invalid_argument("unknown protocol '" + std::string(text) + "' (expected sa, thma or csa)");
}

CodeParams SimulationConfig::frame_code() const {
    return protocol == Protocol::sa ? CodeParams::uncoded() : code;
}

int SimulationConfig::effective_i_max() const { return protocol == Protocol::csa ? i_max : 1; }

namespace {

struct FrameOutcome {
    double throughput;
    double loss;
};

struct MeanAndError {
    double mean;
    double stderr_;
};

// Fixed left-to-right order, so the result is bit-stable for any job count.
MeanAndError summarize(const std::vector<FrameOutcome>& outcomes, double FrameOutcome::*field) {
    const auto count = static_cast<double>(outcomes.size());
    double sum = 0.0;
    for (const auto& o : outcomes) sum += o.*field;
    const double mean = sum / count;
    if (outcomes.size() < 2) return {mean, 0.0};
    double squares = 0.0;
    for (const auto& o : outcomes) {
        const double d = o.*field - mean;
        squares += d * d;
    }
    return {mean, std::sqrt(squares / (count - 1.0) / count)};
}

void validate(const SimulationConfig& config) {
    if (config.n_sa < 1) throw std::invalid_argument("n_sa must be >= 1");
    if (config.frames < 1) throw std::invalid_argument("frames must be >= 1");
    if (config.i_max < 1) throw std::invalid_argument("i_max must be >= 1");
    if (config.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

// Runs body(i) for i in [0, count) on up to `jobs` threads.
template <class Body>
void parallel_for(int count, int jobs, Body body) {
    const int workers = std::min(jobs, count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < count && !failed; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

ThroughputStats simulate_point(const SimulationConfig& config, double g) {
    validate(config);
    const CodeParams frame_code = config.frame_code();
    const FrameConfig frame_config = FrameConfig::from_load(config.n_sa, frame_code, g);
    const int i_max = config.effective_i_max();
    const double users = static_cast<double>(frame_config.users);
    const double n_sa = static_cast<double>(config.n_sa);

    std::vector<FrameOutcome> outcomes(static_cast<std::size_t>(config.frames));
    parallel_for(config.frames, config.jobs, [&](int f) {
        const FrameGraph frame =
            build_frame(frame_config, derive_seed(config.master_seed, static_cast<std::uint64_t>(f)));
        std::size_t recovered = 0;
        switch (config.protocol) {
            case Protocol::sa: recovered = sa_decode(frame).recovered.size(); break;
            case Protocol::thma: recovered = thma_decode(frame, frame_code).recovered.size(); break;
            case Protocol::csa: recovered = ic_decode(frame, frame_code, i_max).recovered.size(); break;
        }
        const double ok = static_cast<double>(recovered);
        outcomes[static_cast<std::size_t>(f)] = {ok / n_sa, users > 0 ? 1.0 - ok / users : 0.0};
    });

    const auto t = summarize(outcomes, &FrameOutcome::throughput);
    const auto plr = summarize(outcomes, &FrameOutcome::loss);
    return ThroughputStats{config.protocol, frame_code, config.n_sa, g, frame_config.offered_load(),
                           config.frames, i_max, config.master_seed, t.mean, t.stderr_,
                           plr.mean, plr.stderr_};
}

std::vector<ThroughputStats> sweep(const SimulationConfig& config, const std::vector<double>& g_grid) {
    if (g_grid.empty()) throw std::invalid_argument("sweep: empty load grid");
    validate(config);
    for (const double g : g_grid) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw std::invalid_argument("sweep: load " + std::to_string(g) + " is not a non-negative number");
        }
        FrameConfig::from_load(config.n_sa, config.frame_code(), g);
    }
    std::vector<ThroughputStats> rows;
    rows.reserve(g_grid.size());
    for (std::size_t j = 0; j < g_grid.size(); ++j) {
        SimulationConfig point = config;
        point.master_seed = derive_seed(config.master_seed, j);
        rows.push_back(simulate_point(point, g_grid[j]));
    }
    return rows;
}

std::vector<ThroughputStats> asymptotic_sweep(Protocol protocol, const CodeParams& code,
                                              const std::vector<double>& g_grid, int i_max) {
    if (g_grid.empty()) throw std::invalid_argument("asymptotic sweep: empty load grid");
    if (i_max < 1) throw std::invalid_argument("i_max must be >= 1");
    const CodeParams used = protocol == Protocol::sa ? CodeParams::uncoded() : code;
    const int iterations = protocol == Protocol::csa ? i_max : 1;
    std::vector<ThroughputStats> rows;
    rows.reserve(g_grid.size());
    for (const double g : g_grid) {
        if (!(g >= 0.0) || !std::isfinite(g)) {
            throw std::invalid_argument("asymptotic sweep: load " + std::to_string(g) +
                                        " is not a non-negative number");
        }
        double t = 0.0;
        double plr = 0.0;
        if (g > 0.0) {
            const auto point = asymptotic_throughput(g, used, DeSettings{iterations, 1e-10});
            t = point.throughput;
            plr = point.plr;
        }
        rows.push_back(ThroughputStats{protocol, used, std::nullopt, g, g, 0, iterations, 0, t, 0.0, plr, 0.0});
    }
    return rows;
}

}  // namespace csa
