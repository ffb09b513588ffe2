#include "csa/degree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace csa {

namespace {

void require_positive_load(double offered_load) {
    if (!(offered_load > 0.0) || !std::isfinite(offered_load)) {
        throw std::invalid_argument("offered load must be positive, got " +
                                    std::to_string(offered_load));
    }
}

void require_max_degree(int max_degree) {
    if (max_degree < 1) {
        throw std::invalid_argument("truncation degree must be >= 1");
    }
}

double log_binomial(long long n, long long d) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(d) + 1.0) -
           std::lgamma(static_cast<double>(n - d) + 1.0);
}

// Poisson(lambda) pmf at j, in log space.
double poisson_log_pmf(double lambda, int j) {
    if (lambda == 0.0) {
        return j == 0 ? 0.0 : -INFINITY;
    }
    return -lambda + j * std::log(lambda) - std::lgamma(j + 1.0);
}

}  // namespace

double DegreeDistribution::mean_degree() const {
    double mean = 0.0;
    for (std::size_t d = 1; d < coeffs.size(); ++d) {
        mean += static_cast<double>(d) * coeffs[d];
    }
    return mean;
}

int poisson_truncation_degree(double lambda) {
    return static_cast<int>(std::ceil(lambda + 12.0 * std::sqrt(lambda) + 20.0));
}

DegreeDistribution normalized(DegreeDistribution dist) {
    const double total = std::accumulate(dist.coeffs.begin(), dist.coeffs.end(), 0.0);
    if (!(total > 0.0)) {
        throw std::invalid_argument("cannot normalize a distribution with zero mass");
    }
    for (double& c : dist.coeffs) {
        c /= total;
    }
    return dist;
}

DegreeDistribution finite_node_dist(long long users, double offered_load, const CodeParams& code,
                                    int max_degree) {
    if (users < 1) {
        throw std::invalid_argument("user count must be >= 1");
    }
    require_positive_load(offered_load);
    require_max_degree(max_degree);
    const double mean = mean_slot_degree(offered_load, code);
    const double prob = mean / static_cast<double>(users);
    if (prob > 1.0) {
        throw std::invalid_argument("mean slot degree " + std::to_string(mean) +
                                    " exceeds user count " + std::to_string(users));
    }

    const long long top = std::min<long long>(users, max_degree);
    DegreeDistribution dist;
    dist.perspective = Perspective::node;
    dist.coeffs.assign(static_cast<std::size_t>(top) + 1, 0.0);
    if (prob == 1.0) {
        // Every user hits every slot; only d = M survives.
        if (top == users) {
            dist.coeffs.back() = 1.0;
            return dist;
        }
        throw std::invalid_argument("truncation removes all mass (every slot has degree M)");
    }
    const double log_p = std::log(prob);
    const double log_q = std::log1p(-prob);
    for (long long d = 0; d <= top; ++d) {
        const double log_term = log_binomial(users, d) + static_cast<double>(d) * log_p +
                                static_cast<double>(users - d) * log_q;
        dist.coeffs[static_cast<std::size_t>(d)] = std::exp(log_term);
    }
    return normalized(std::move(dist));
}

DegreeDistribution poisson_node_dist(double lambda, int max_degree) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("Poisson mean must be non-negative");
    }
    require_max_degree(max_degree);
    DegreeDistribution dist;
    dist.perspective = Perspective::node;
    dist.coeffs.resize(static_cast<std::size_t>(max_degree) + 1);
    for (int d = 0; d <= max_degree; ++d) {
        dist.coeffs[static_cast<std::size_t>(d)] = std::exp(poisson_log_pmf(lambda, d));
    }
    return normalized(std::move(dist));
}

DegreeDistribution poisson_edge_dist(double offered_load, const CodeParams& code, int max_degree) {
    require_positive_load(offered_load);
    require_max_degree(max_degree);
    const double lambda = mean_slot_degree(offered_load, code);
    DegreeDistribution dist;
    dist.perspective = Perspective::edge;
    dist.coeffs.assign(static_cast<std::size_t>(max_degree) + 1, 0.0);
    for (int d = 1; d <= max_degree; ++d) {
        dist.coeffs[static_cast<std::size_t>(d)] = std::exp(poisson_log_pmf(lambda, d - 1));
    }
    return normalized(std::move(dist));
}

DegreeDistribution poisson_edge_dist(double offered_load, const CodeParams& code) {
    require_positive_load(offered_load);
    return poisson_edge_dist(offered_load, code,
                             poisson_truncation_degree(mean_slot_degree(offered_load, code)));
}

DegreeDistribution node_to_edge(const DegreeDistribution& node_dist) {
    if (node_dist.perspective != Perspective::node) {
        throw std::invalid_argument("node_to_edge expects a node-perspective distribution");
    }
    const double mean = node_dist.mean_degree();
    if (!(mean > 0.0)) {
        throw std::invalid_argument("node_to_edge: distribution has zero mean degree");
    }
    DegreeDistribution edge;
    edge.perspective = Perspective::edge;
    edge.coeffs.assign(node_dist.coeffs.size(), 0.0);
    for (std::size_t d = 1; d < node_dist.coeffs.size(); ++d) {
        edge.coeffs[d] = node_dist.coeffs[d] * static_cast<double>(d) / mean;
    }
    return normalized(std::move(edge));
}

double eval_poly(const DegreeDistribution& dist, double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("eval_poly: x must lie in [0, 1], got " + std::to_string(x));
    }
    const auto& c = dist.coeffs;
    if (c.empty()) {
        return 0.0;
    }
    // Horner over the stored coefficients; the edge form drops one power of x.
    const std::size_t lowest = dist.perspective == Perspective::edge ? 1 : 0;
    double acc = 0.0;
    for (std::size_t d = c.size(); d-- > lowest;) {
        acc = acc * x + c[d];
    }
    return acc;
}

}  // namespace csa
