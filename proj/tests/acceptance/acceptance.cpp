// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "csa/cli.hpp"
#include "csa/de.hpp"
#include "csa/decode.hpp"
#include "csa/degree.hpp"
#include "csa/mc.hpp"
#include "csa/rng.hpp"

using namespace csa;

namespace {

class Report {
public:
    void record(const std::string& id, bool pass, const std::string& detail) {
        std::printf("[%s] %-4s %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
        std::fflush(stdout);
        failures_ += pass ? 0 : 1;
    }
    int failures() const { return failures_; }

private:
    int failures_ = 0;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> fig4_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 28; ++i) grid.push_back(std::round(i * 0.05 * 1e12) / 1e12);
    return grid;
}

constexpr int fig4_frames = 1000;
constexpr int fig4_i_max = 20;
constexpr std::uint64_t fig4_seed = 20100101;

void thresholds(Report& report) {
    const auto start = std::chrono::steady_clock::now();
    struct Expect {
        int n, k;
        double g, tol;
    };
    const Expect expected[] = {{4, 2, 0.692, 0.005}, {2, 1, 0.500, 0.005}, {6, 4, 0.500, 0.005}, {7, 4, 0.600, 0.010}};
    bool ok = true;
    std::string detail;
    for (const auto& e : expected) {
        const double g = threshold(CodeParams(e.n, e.k)).g_star;
        ok = ok && std::abs(g - e.g) <= e.tol;
        detail += fmt("G*(%d,%d)=%.4f ", e.n, e.k, g);
    }
    const double elapsed = seconds_since(start);
    report.record("1", ok && elapsed < 10.0, detail + fmt("[%.2fs < 10s]", elapsed));
}

void spc_bounds(Report& report) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 8; ++k) {
        const double g = threshold(CodeParams(k + 1, k)).g_star;
        const double bound = spc_bound(k);
        ok = ok && g <= bound + 1e-3 && g >= 0.95 * bound;
        detail += fmt("k=%d:%.4f/%.4f ", k, g, bound);
    }
    const double elapsed = seconds_since(start);
    report.record("2", ok && elapsed < 30.0, detail + fmt("[%.2fs < 30s]", elapsed));
}

void penalties(Report& report) {
    const double p42 = power_penalty(CodeParams(4, 2));
    const double p64 = power_penalty(CodeParams(6, 4));
    const bool ok = std::round(p42 * 1e4) / 1e4 == 3.0103 && std::round(p64 * 1e4) / 1e4 == 1.7609 && p42 - p64 > 1.2;
    report.record("3", ok, fmt("dP(4,2)=%.4f dB dP(6,4)=%.4f dB saving=%.4f dB", p42, p64, p42 - p64));
}

struct Curves {
    std::vector<ThroughputStats> sa, thma, csa;
};

void fig4(Report& report) {
    const auto start = std::chrono::steady_clock::now();
    const auto grid = fig4_grid();
    SimulationConfig config{Protocol::csa, CodeParams(7, 4), 400, fig4_frames, fig4_i_max, fig4_seed, 4};
    Curves c;
    c.csa = sweep(config, grid);
    config.protocol = Protocol::thma;
    c.thma = sweep(config, grid);
    config.protocol = Protocol::sa;
    c.sa = sweep(config, grid);

    auto peak = [](const std::vector<ThroughputStats>& rows) {
        return std::max_element(rows.begin(), rows.end(),
                                [](const auto& a, const auto& b) { return a.t_mean < b.t_mean; });
    };

    const auto csa_peak = peak(c.csa);
    report.record("4a", csa_peak->t_mean >= 0.52 && csa_peak->t_mean <= 0.58,
                  fmt("CSA(7,4) N_SA=400 peak T=%.4f at G=%.2f, want [0.52, 0.58]", csa_peak->t_mean,
                      csa_peak->g_nominal));

    const auto thma_peak = peak(c.thma);
    report.record("4b", thma_peak->t_mean >= 0.17 && thma_peak->t_mean <= 0.23,
                  fmt("THMA(7,4) N_SA=400 peak T=%.4f at G=%.2f, want [0.17, 0.23]", thma_peak->t_mean,
                      thma_peak->g_nominal));

    double worst_plr = 0.0;
    for (const auto& s : c.csa)
        if (s.g_nominal <= 0.5 + 1e-12) worst_plr = std::max(worst_plr, s.plr_mean);
    report.record("4c", worst_plr < 1e-2, fmt("CSA max plr for G<=0.5 is %.2e, want < 1e-2", worst_plr));

    double worst_gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= 0.9 - 1e-12) worst_gap = std::max(worst_gap, std::abs(c.csa[i].t_mean - c.thma[i].t_mean));
    report.record("4d", worst_gap <= 0.03, fmt("max |T_CSA - T_THMA| for G>=0.9 is %.4f, want <= 0.03", worst_gap));

    double worst_z = 0.0;
    for (const auto& s : c.sa) {
        const double analytic = s.g_nominal * std::exp(-s.g_nominal);
        worst_z = std::max(worst_z, std::abs(s.t_mean - analytic) / s.t_stderr);
    }
    const auto sa_peak = peak(c.sa);
    report.record("4e", worst_z <= 3.0 && std::abs(sa_peak->t_mean - 0.368) <= 0.01,
                  fmt("SA max |T - G e^-G| = %.2f stderr (want <= 3), peak T=%.4f (want 0.368 +- 0.01) [%.1fs]",
                      worst_z, sa_peak->t_mean, seconds_since(start)));
}

void finite_length(Report& report) {
    const auto start = std::chrono::steady_clock::now();
    const auto grid = fig4_grid();
    const auto analytic = asymptotic_sweep(Protocol::csa, CodeParams(7, 4), grid, fig4_i_max);
    std::vector<double> gaps;
    std::string detail;
    for (const long long n_sa : {100LL, 400LL, 1600LL}) {
        const SimulationConfig config{Protocol::csa, CodeParams(7, 4), n_sa, fig4_frames, fig4_i_max, fig4_seed, 4};
        const auto sim = sweep(config, grid);
        double gap = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] >= 0.55 - 1e-12 && grid[i] <= 0.75 + 1e-12) continue;
            gap = std::max(gap, std::abs(sim[i].t_mean - analytic[i].t_mean));
        }
        gaps.push_back(gap);
        detail += fmt("N_SA=%lld:%.5f ", n_sa, gap);
    }
    const bool ok = gaps[0] > gaps[1] && gaps[1] > gaps[2];
    report.record("5", ok, "max |T_sim - T_asym| off the knee: " + detail + fmt("[%.1fs]", seconds_since(start)));
}

// Allocation-free closure oracle for frames of at most 4 bursts and 8 slots,
// applying the recovery rules in every order.
struct TinyFrame {
    int bursts;
    int units;
    std::array<std::array<std::uint8_t, 3>, 4> slot;
};

int tiny_clean(const TinyFrame& f, unsigned recovered, int b) {
    std::array<int, 8> load{};
    for (int j = 0; j < f.bursts; ++j)
        if (!((recovered >> j) & 1u))
            for (int u = 0; u < f.units; ++u) ++load[f.slot[j][u]];
    int clean = 0;
    for (int u = 0; u < f.units; ++u) clean += load[f.slot[b][u]] == 1;
    return clean;
}

// Returns the closure if every order reaches the same one, else -1.
int tiny_unique_closure(const TinyFrame& f, int k) {
    std::array<bool, 16> seen{};
    std::array<unsigned, 16> stack{};
    int top = 0;
    int closure = -2;
    stack[top++] = 0;
    while (top > 0) {
        const unsigned state = stack[--top];
        if (seen[state]) continue;
        seen[state] = true;
        bool terminal = true;
        for (int b = 0; b < f.bursts; ++b) {
            if ((state >> b) & 1u) continue;
            if (tiny_clean(f, state, b) >= k) {
                terminal = false;
                stack[top++] = state | (1u << b);
            }
        }
        if (terminal) {
            if (closure == -2) closure = static_cast<int>(state);
            else if (closure != static_cast<int>(state)) return -1;
        }
    }
    return closure;
}

bool exhaustive_oracle(std::string& detail) {
    long long frames = 0;
    long long mismatches = 0;
    for (int slots = 1; slots <= 8; ++slots) {
        for (int units = 1; units <= std::min(3, slots); ++units) {
            std::vector<std::array<std::uint8_t, 3>> subsets;
            for (unsigned mask = 0; mask < (1u << slots); ++mask) {
                if (std::popcount(mask) != units) continue;
                std::array<std::uint8_t, 3> s{};
                int u = 0;
                for (int i = 0; i < slots; ++i)
                    if ((mask >> i) & 1u) s[u++] = static_cast<std::uint8_t>(i);
                subsets.push_back(s);
            }
            std::vector<CodeParams> codes;
            if (units == 1) codes.push_back(CodeParams::uncoded());
            for (int k = 1; k < units; ++k) codes.emplace_back(units, k);
            const auto count = static_cast<long long>(subsets.size());
            for (int bursts = 0; bursts <= 4; ++bursts) {
                long long total = 1;
                for (int b = 0; b < bursts; ++b) total *= count;
                TinyFrame f{bursts, units, {}};
                std::vector<SlotIndex> flat(static_cast<std::size_t>(bursts * units));
                for (long long idx = 0; idx < total; ++idx) {
                    long long rest = idx;
                    for (int b = 0; b < bursts; ++b) {
                        f.slot[b] = subsets[static_cast<std::size_t>(rest % count)];
                        rest /= count;
                        for (int u = 0; u < units; ++u) flat[static_cast<std::size_t>(b * units + u)] = f.slot[b][u];
                    }
                    const FrameGraph frame(static_cast<std::uint32_t>(slots), units, flat);
                    for (const auto& code : codes) {
                        ++frames;
                        const int closure = tiny_unique_closure(f, code.k());
                        unsigned got = 0;
                        for (const auto b : ic_decode(frame, code, unlimited_iterations).recovered) got |= 1u << b;
                        if (closure < 0 || static_cast<unsigned>(closure) != got) ++mismatches;
                    }
                }
            }
        }
    }
    detail = fmt("%lld (frame, code) pairs, %lld mismatches", frames, mismatches);
    return mismatches == 0;
}

bool order_independence(std::string& detail) {
    int frames = 0;
    int bad = 0;
    for (const auto& [code, g] : {std::pair{CodeParams(7, 4), 0.6}, {CodeParams(2, 1), 0.5}, {CodeParams(4, 2), 0.69}}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto frame = build_frame(FrameConfig::from_load(100, code, g), seed);
            const auto reference = ic_decode(frame, code, unlimited_iterations).recovered;
            ++frames;
            for (std::uint64_t schedule = 0; schedule < 128; ++schedule) {
                bad += peel_closure(frame, code, derive_seed(seed ^ 0xABCDEF, schedule)) == reference ? 0 : 1;
            }
        }
    }
    detail = fmt("%d frames x 128 schedules, %d disagreements", frames, bad);
    return bad == 0;
}

bool de_monotonicity(std::string& detail) {
    int violations = 0;
    for (const auto& code : {CodeParams(4, 2), CodeParams(7, 4), CodeParams(2, 1), CodeParams(6, 4)}) {
        std::vector<DeStep> previous;
        for (int j = 0; j < 50; ++j) {
            const double g = 0.02 + 1.38 * j / 49.0;
            const auto trace = de_run(g, code, {200, 1e-300});
            for (std::size_t i = 1; i < trace.steps.size(); ++i) {
                violations += trace.steps[i].p > trace.steps[i - 1].p;
                violations += trace.steps[i].q > trace.steps[i - 1].q;
            }
            for (std::size_t i = 0; i < std::min(previous.size(), trace.steps.size()); ++i) {
                violations += trace.steps[i].p < previous[i].p;
            }
            previous = trace.steps;
        }
    }
    detail = fmt("4 codes x 50 loads, %d violations", violations);
    return violations == 0;
}

bool distributions(std::string& detail) {
    int bad = 0;
    for (const double g : {0.1, 0.5, 0.9, 1.4}) {
        for (const auto& code : {CodeParams(2, 1), CodeParams(4, 2), CodeParams(7, 4)}) {
            const double lambda = g * code.n() / code.k();
            const int d_max = poisson_truncation_degree(lambda);
            for (const auto& d : {poisson_edge_dist(g, code), finite_node_dist(500, g, code, d_max),
                                  node_to_edge(finite_node_dist(500, g, code, d_max))}) {
                double sum = 0.0;
                for (const double c : d.coeffs) sum += c;
                bad += std::abs(sum - 1.0) > 1e-9;
            }
            const auto poisson = poisson_node_dist(lambda, d_max);
            double previous = INFINITY;
            for (const long long users : {100LL, 1000LL, 10000LL}) {
                const auto finite = finite_node_dist(users, g, code, d_max);
                double sup = 0.0;
                for (std::size_t i = 0; i < finite.coeffs.size(); ++i)
                    sup = std::max(sup, std::abs(finite.coeffs[i] - poisson.coeffs[i]));
                bad += !(sup < previous);
                previous = sup;
            }
        }
    }
    detail = fmt("normalization and Poisson sup-norm decrease, %d violations", bad);
    return bad == 0;
}

bool jobs_reproducible(std::string& detail) {
    auto run = [](const char* jobs) {
        std::ostringstream out;
        std::ostringstream err;
        const int status = cli::run({"csa", "sweep", "--protocol", "csa", "--code", "7,4", "--n-sa", "400", "--g-grid",
                                     "0.1:1.4:0.1", "--frames", "200", "--jobs", jobs},
                                    out, err);
        return std::pair{status, out.str()};
    };
    const auto one = run("1");
    const auto eight = run("8");
    detail = fmt("%zu bytes each, identical=%s", one.second.size(), one.second == eight.second ? "yes" : "no");
    return one.first == 0 && eight.first == 0 && one.second == eight.second;
}

void properties(Report& report) {
    const std::pair<const char*, std::function<bool(std::string&)>> checks[] = {
        {"6a", order_independence}, {"6b", exhaustive_oracle}, {"6c", de_monotonicity},
        {"6d", distributions},      {"6e", jobs_reproducible},
    };
    for (const auto& [id, check] : checks) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        const bool ok = check(detail);
        report.record(id, ok, detail + fmt(" [%.1fs]", seconds_since(start)));
    }
}

}  // namespace

int main() {
    Report report;
    thresholds(report);
    spc_bounds(report);
    penalties(report);
    fig4(report);
    finite_length(report);
    properties(report);
    std::printf("%s: %d failing criteria\n", report.failures() ? "FAILED" : "PASSED", report.failures());
    return report.failures() ? 1 : 0;
}
