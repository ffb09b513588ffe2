#pragma once

#include <stdexcept>
#include <vector>

#include "csa/code.hpp"

namespace csa {

// Iteration controls for density evolution.
struct DeSettings {
    int max_iterations = 5000;
    double epsilon = 1e-10;  // p below this counts as full recovery
};

// Iteration cap used for throughput curves (matches the simulator's I_max).
inline constexpr int default_curve_iterations = 20;

struct DeStep {
    int iteration;
    double p;  // erasure probability of slot -> burst messages
    double q;  // erasure probability of burst -> slot messages
};

struct DeTrace {
    std::vector<DeStep> steps;  // steps[0] is the initial condition p = q = 1
    bool converged = false;
    double final_p = 1.0;
    int iterations_used = 0;
};

// Erasure probability of a burst-node output edge given input erasure p:
// the edge stays unknown while fewer than k of the other n-1 edges are known.
double burst_update(double p, const CodeParams& code);

// p = 1 - rho(1 - q) with rho(x) = exp(-G (1 - x) n / k), in closed form.
double slot_update(double q, double offered_load, const CodeParams& code);

DeTrace de_run(double offered_load, const CodeParams& code, const DeSettings& settings = {});

struct ThresholdResult {
    CodeParams code;
    double g_star;
    double tol;        // half-width of the final bracket
    double bracket_lo;  // DE converges here
    double bracket_hi;  // DE fails here
    DeSettings settings;
};

class BracketError : public std::invalid_argument {
public:
    enum class Kind { lower_fails, upper_converges };

    BracketError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct ThresholdSearch {
    double bracket_lo = 0.01;
    double bracket_hi = 2.0;
    double tol = 1e-4;
    DeSettings settings{};
};

// Bisection for the largest load G at which DE drives p to zero.
// Throws BracketError if the initial bracket does not straddle the threshold.
ThresholdResult threshold(const CodeParams& code, const ThresholdSearch& search = {});

// Upper bound 1/(k+1) on the threshold of the (k+1, k) single parity-check code.
double spc_bound(int k);

// Average transmit-power increase over slotted ALOHA, 10 log10(n/k) dB.
double power_penalty(const CodeParams& code);

struct AsymptoticPoint {
    double plr;
    double throughput;
    double final_p;
};

// Burst loss after `settings.max_iterations` DE iterations: a burst is lost
// when more than n-k of its edges are still erased.
AsymptoticPoint asymptotic_throughput(double offered_load, const CodeParams& code,
                                      const DeSettings& settings = {default_curve_iterations, 1e-10});

// Probability that more than n-k of n independent edges are erased.
double burst_loss_probability(double p, const CodeParams& code);

}  // namespace csa
