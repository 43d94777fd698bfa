#include "oncache/bounds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "oncache/policies.hpp"
#include "oncache/rng.hpp"

namespace oncache {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEigTol = 1e-12;

void check_weights(const std::vector<double>& w) {
    if (w.empty()) throw std::invalid_argument("bounds: empty weight vector");
    for (double v : w)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("bounds: weights must be positive finite");
}
}  // namespace

double prop1_bound(double w, double capacity, double horizon) {
    if (!(w > 0.0) || !(capacity >= 1.0) || !(horizon > 0.0))
        throw std::invalid_argument("prop1_bound: need w > 0, C >= 1, T > 0");
    return w * capacity * (horizon / (capacity + 1.0) - 1.0);
}

double oga_upper_bound(double capacity, std::size_t n_files, double horizon, double w_max) {
    if (!(horizon > 0.0) || !(w_max > 0.0)) throw std::invalid_argument("oga_upper_bound: need T > 0, w_max > 0");
    return cache_set_diameter(capacity, n_files) * w_max * std::sqrt(horizon);
}

double bsa_upper_bound(std::size_t max_degree, std::size_t n_caches, double capacity, double horizon,
                       double w_max) {
    if (max_degree == 0 || n_caches == 0 || !(capacity > 0.0) || !(horizon > 0.0) || !(w_max > 0.0))
        throw std::invalid_argument("bsa_upper_bound: parameters must be positive");
    return w_max * std::sqrt(2.0 * static_cast<double>(max_degree) * static_cast<double>(n_caches) * capacity *
                             horizon);
}

double lb_uniform(double w, double gamma, double capacity, double horizon) {
    if (!(w > 0.0) || !(capacity > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("lb_uniform: parameters must be positive");
    if (!(gamma > 0.0) || !(gamma < 0.5))
        throw std::invalid_argument("lb_uniform: occupancy ratio must lie in (0, 1/2)");
    return w * std::sqrt(gamma / kPi) * std::sqrt(capacity * horizon);
}

GaussianRequestModel::GaussianRequestModel(std::vector<double> w) : weights(std::move(w)) {
    check_weights(weights);
    for (double v : weights) inverse_weight_sum += 1.0 / v;
}

double GaussianRequestModel::request_probability(std::size_t n) const {
    if (n >= weights.size()) throw std::invalid_argument("gaussian model: index out of range");
    return (1.0 / weights[n]) / inverse_weight_sum;
}

double GaussianRequestModel::covariance(std::size_t i, std::size_t j) const {
    if (i >= weights.size() || j >= weights.size())
        throw std::invalid_argument("gaussian model: index out of range");
    const double s = inverse_weight_sum;
    if (i == j) return (weights[i] - 1.0 / s) / s;
    return -1.0 / (s * s);
}

namespace {

double pairing_denominator(const std::vector<double>& w) {
    double s = 0.0;
    for (double v : w) s += 1.0 / v;
    return std::sqrt(2.0 * kPi * s);
}

// Best sum of sqrt(w_a + w_b) over disjoint pairs, by branch and bound free
// recursion: the lowest unused index is either skipped or paired with each
// later unused index.
double best_pairing_sum(const std::vector<double>& w, std::vector<bool>& used, std::size_t pairs_left) {
    if (pairs_left == 0) return 0.0;
    std::size_t first = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!used[i]) {
            first = i;
            break;
        }
    }
    if (first == w.size()) return -1.0;  // no items left but pairs required
    std::size_t remaining = 0;
    for (std::size_t i = first; i < w.size(); ++i)
        if (!used[i]) ++remaining;
    if (remaining < 2 * pairs_left) return -1.0;

    used[first] = true;
    double best = -1.0;
    // Option 1: leave `first` unpaired.
    if (remaining - 1 >= 2 * pairs_left) {
        const double v = best_pairing_sum(w, used, pairs_left);
        best = std::max(best, v);
    }
    // Option 2: pair it with each later unused index.
    for (std::size_t j = first + 1; j < w.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        const double rest = best_pairing_sum(w, used, pairs_left - 1);
        if (rest >= 0.0) best = std::max(best, std::sqrt(w[first] + w[j]) + rest);
        used[j] = false;
    }
    used[first] = false;
    return best;
}

}  // namespace

double lb_pairing_exact(const std::vector<double>& weights, std::size_t pairs) {
    check_weights(weights);
    if (weights.size() > 10) throw std::invalid_argument("lb_pairing_exact: refuses more than 10 files");
    if (pairs == 0 || 2 * pairs > weights.size())
        throw std::invalid_argument("lb_pairing_exact: need 0 < 2*pairs <= N");
    std::vector<bool> used(weights.size(), false);
    const double sum = best_pairing_sum(weights, used, pairs);
    if (sum < 0.0) throw std::runtime_error("lb_pairing_exact: no pairing found");
    return sum / pairing_denominator(weights);
}

double lb_pairing_heuristic(const std::vector<double>& weights, std::size_t pairs) {
    check_weights(weights);
    if (pairs == 0 || 2 * pairs > weights.size())
        throw std::invalid_argument("lb_pairing_heuristic: need 0 < 2*pairs <= N");
    std::vector<double> top(weights);
    std::sort(top.begin(), top.end(), std::greater<>());
    top.resize(2 * pairs);
    double sum = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) sum += std::sqrt(top[k] + top[2 * pairs - 1 - k]);
    return sum / pairing_denominator(weights);
}

double lb_pairing(const std::vector<double>& weights, std::size_t pairs) {
    if (weights.size() <= 10) return lb_pairing_exact(weights, pairs);
    return lb_pairing_heuristic(weights, pairs);
}

MonteCarloBound lb_monte_carlo(const GaussianRequestModel& model, std::size_t top, std::size_t samples,
                               std::uint64_t seed) {
    const std::size_t n = model.size();
    if (top == 0 || top > n) throw std::invalid_argument("lb_monte_carlo: need 0 < top <= N");
    if (samples < 2) throw std::invalid_argument("lb_monte_carlo: need at least 2 samples");

    Eigen::MatrixXd sigma(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = model.covariance(i, j);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
    if (solver.info() != Eigen::Success) throw std::runtime_error("lb_monte_carlo: eigendecomposition failed");
    Eigen::VectorXd lambda = solver.eigenvalues();
    const double scale = std::max(std::abs(lambda.maxCoeff()), 1.0);
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        if (lambda(k) < -1e-8 * scale)
            throw std::runtime_error("lb_monte_carlo: covariance is indefinite beyond tolerance");
        lambda(k) = lambda(k) > kEigTol ? std::sqrt(lambda(k)) : 0.0;
    }
    const Eigen::MatrixXd factor = solver.eigenvectors() * lambda.asDiagonal();

    Rng rng(seed);
    Eigen::VectorXd xi(static_cast<Eigen::Index>(n));
    std::vector<double> z(n);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (Eigen::Index k = 0; k < xi.size(); ++k) xi(k) = rng.normal();
        Eigen::VectorXd sample = factor * xi;
        for (std::size_t i = 0; i < n; ++i) z[i] = sample(static_cast<Eigen::Index>(i));
        std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(top - 1), z.end(), std::greater<>());
        double v = 0.0;
        for (std::size_t i = 0; i < top; ++i) v += z[i];
        const double delta = v - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (v - mean);
    }
    MonteCarloBound out;
    out.estimate = mean;
    out.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    out.samples = samples;
    return out;
}

}  // namespace oncache
