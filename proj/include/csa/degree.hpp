#pragma once

#include <cstddef>
#include <vector>

#include "csa/code.hpp"

namespace csa {

enum class Perspective { node, edge };

// Sum-node (slot) degree distribution stored as a truncated coefficient
// vector. coeffs[d] is the probability mass of degree d:
//   node perspective: Psi(x) = sum_d coeffs[d] x^d
//   edge perspective: rho(x) = sum_d coeffs[d] x^(d-1), coeffs[0] == 0
struct DegreeDistribution {
    std::vector<double> coeffs;
    Perspective perspective = Perspective::node;

    std::size_t truncation_degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

    // Sum_d d * coeffs[d]; equals Psi'(1) for node distributions.
    double mean_degree() const;
};

// Degree at which the Poisson(lambda) tail mass drops below 1e-12.
int poisson_truncation_degree(double lambda);

// Average number of units per slot, Psi'(1) = G n / k.
inline double mean_slot_degree(double offered_load, const CodeParams& code) {
    return offered_load * code.n() / code.k();
}

// Binomial node-perspective distribution of M users spreading G n/k units
// per slot on average. Throws std::invalid_argument if G n/k > M.
DegreeDistribution finite_node_dist(long long users, double offered_load, const CodeParams& code,
                                    int max_degree);

// Poisson(lambda) node-perspective distribution (the M -> infinity limit).
DegreeDistribution poisson_node_dist(double lambda, int max_degree);

// Edge-perspective rho(x) = exp(-G (1 - x) n / k), truncated at max_degree.
DegreeDistribution poisson_edge_dist(double offered_load, const CodeParams& code, int max_degree);
DegreeDistribution poisson_edge_dist(double offered_load, const CodeParams& code);

// rho_d = Psi_d d / sum_d Psi_d d.
DegreeDistribution node_to_edge(const DegreeDistribution& node_dist);

// Rescales coefficients to unit mass.
DegreeDistribution normalized(DegreeDistribution dist);

// Psi(x) or rho(x) depending on perspective; x must lie in [0, 1].
double eval_poly(const DegreeDistribution& dist, double x);

}  // namespace csa
