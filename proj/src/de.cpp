#include "csa/de.hpp"

#include <cmath>
#include <string>

namespace csa {

namespace {

void require_probability(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
    }
}

void require_load(double g) {
    if (!(g > 0.0) || !std::isfinite(g)) {
        throw std::domain_error("offered load must be positive, got " + std::to_string(g));
    }
}

double binomial(int n, int r) {
    double c = 1.0;
    for (int i = 1; i <= r; ++i) {
        c = c * (n - r + i) / i;
    }
    return c;
}

// P[X >= lo] for X ~ Binomial(trials, p).
double binomial_upper_tail(int trials, int lo, double p) {
    double sum = 0.0;
    for (int e = lo; e <= trials; ++e) {
        sum += binomial(trials, e) * std::pow(p, e) * std::pow(1.0 - p, trials - e);
    }
    return sum;
}

// Stuck fixed point: DE has stopped moving above epsilon.
constexpr double stall_step = 1e-14;

}  // namespace

double burst_update(double p, const CodeParams& code) {
    require_probability(p, "burst_update: p");
    return binomial_upper_tail(code.n() - 1, code.n() - code.k(), p);
}

double slot_update(double q, double offered_load, const CodeParams& code) {
    require_probability(q, "slot_update: q");
    require_load(offered_load);
    const double lambda = offered_load * code.n() / code.k();
    return -std::expm1(-lambda * q);
}

DeTrace de_run(double offered_load, const CodeParams& code, const DeSettings& settings) {
    require_load(offered_load);
    if (settings.max_iterations < 1) {
        throw std::invalid_argument("de_run: max_iterations must be >= 1");
    }
    if (!(settings.epsilon > 0.0 && settings.epsilon < 1.0)) {
        throw std::invalid_argument("de_run: epsilon must lie in (0, 1)");
    }

    DeTrace trace;
    trace.steps.push_back({0, 1.0, 1.0});
    double p = 1.0;
    for (int i = 1; i <= settings.max_iterations; ++i) {
        const double q = burst_update(p, code);
        const double next = slot_update(q, offered_load, code);
        trace.steps.push_back({i, next, q});
        trace.iterations_used = i;
        const double step = std::abs(next - p);
        p = next;
        if (p < settings.epsilon) {
            trace.converged = true;
            break;
        }
        if (step < stall_step) {
            break;
        }
    }
    trace.final_p = p;
    return trace;
}

ThresholdResult threshold(const CodeParams& code, const ThresholdSearch& search) {
    if (!(search.tol > 0.0) || !(search.bracket_lo < search.bracket_hi)) {
        throw std::invalid_argument("threshold: need tol > 0 and bracket_lo < bracket_hi");
    }
    double lo = search.bracket_lo;
    double hi = search.bracket_hi;
    if (!de_run(lo, code, search.settings).converged) {
        throw BracketError(BracketError::Kind::lower_fails,
                           "threshold " + code.to_string() + ": DE fails at lower bracket G=" +
                               std::to_string(lo));
    }
    if (de_run(hi, code, search.settings).converged) {
        throw BracketError(BracketError::Kind::upper_converges,
                           "threshold " + code.to_string() + ": DE converges at upper bracket G=" +
                               std::to_string(hi));
    }
    while ((hi - lo) / 2.0 > search.tol) {
        const double mid = 0.5 * (lo + hi);
        if (de_run(mid, code, search.settings).converged) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return ThresholdResult{code, 0.5 * (lo + hi), (hi - lo) / 2.0, lo, hi, search.settings};
}

double spc_bound(int k) {
    if (k < 1) {
        throw std::invalid_argument("spc_bound: k must be >= 1");
    }
    return 1.0 / (k + 1);
}

double power_penalty(const CodeParams& code) { return code.power_penalty_db(); }

double burst_loss_probability(double p, const CodeParams& code) {
    require_probability(p, "burst_loss_probability: p");
    return binomial_upper_tail(code.n(), code.n() - code.k() + 1, p);
}

AsymptoticPoint asymptotic_throughput(double offered_load, const CodeParams& code,
                                      const DeSettings& settings) {
    const DeTrace trace = de_run(offered_load, code, settings);
    const double plr = burst_loss_probability(trace.final_p, code);
    return {plr, offered_load * (1.0 - plr), trace.final_p};
}

}  // namespace csa
