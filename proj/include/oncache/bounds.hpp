#pragma once

#include <cstdint>
#include <vector>

namespace oncache {

// Regret a recency or frequency eviction rule is forced into by the cyclic
// trace over C+1 files: w * C * (T/(C+1) - 1).
double prop1_bound(double w, double capacity, double horizon);

// Worst-case regret of the projected-gradient policy at the horizon-tuned
// step: diameter * w_max * sqrt(T).
double oga_upper_bound(double capacity, std::size_t n_files, double horizon, double w_max);

// Same for the bipartite policy: w_max * sqrt(2 * deg * J * C * T).
double bsa_upper_bound(std::size_t max_degree, std::size_t n_caches, double capacity, double horizon,
                       double w_max);

// Coefficient on sqrt(T) forced on any online policy under uniform weights
// with occupancy ratio gamma = C/N < 1/2: w * sqrt(gamma/pi) * sqrt(C).
// Returned with the sqrt(T) factor applied.
double lb_uniform(double w, double gamma, double capacity, double horizon);

// Gaussian surrogate for the heterogeneous request law: requests hit file n
// with probability (1/w_n)/S, S = sum of 1/w_n. Aggregated weighted
// requests have the covariance held here.
struct GaussianRequestModel {
    std::vector<double> weights;
    double inverse_weight_sum = 0.0;  // S

    explicit GaussianRequestModel(std::vector<double> w);

    std::size_t size() const { return weights.size(); }
    double request_probability(std::size_t n) const;
    double covariance(std::size_t i, std::size_t j) const;
};

// Coefficient on sqrt(T) from matching files into C pairs: the best pairing
// of 2C distinct files maximizing sum of sqrt(w_a + w_b), normalized by
// sqrt(2*pi*S). Exact enumeration for N <= 10, heuristic otherwise.
double lb_pairing(const std::vector<double>& weights, std::size_t pairs);
double lb_pairing_exact(const std::vector<double>& weights, std::size_t pairs);
double lb_pairing_heuristic(const std::vector<double>& weights, std::size_t pairs);

struct MonteCarloBound {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

// Samples the Gaussian surrogate and averages the sum of the C largest
// coordinates; estimate is a coefficient on sqrt(T). Eigenvalues below the
// singularity tolerance are treated as zero.
MonteCarloBound lb_monte_carlo(const GaussianRequestModel& model, std::size_t top, std::size_t samples,
                               std::uint64_t seed);

}  // namespace oncache
