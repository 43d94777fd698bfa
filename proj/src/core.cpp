#include "oncache/core.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oncache {

Catalog::Catalog(std::size_t n, std::vector<double> w) : n_files(n), weights(std::move(w)) {
    validate();
}

Catalog Catalog::uniform(std::size_t n, double w) {
    return Catalog(n, std::vector<double>(n, w));
}

double Catalog::weight(std::size_t file) const {
    if (file >= n_files) throw std::invalid_argument("catalog: file index out of range");
    return weights[file];
}

double Catalog::max_weight() const {
    double m = 0.0;
    for (double w : weights) m = std::max(m, w);
    return m;
}

void Catalog::validate() const {
    if (n_files == 0) throw std::invalid_argument("catalog: empty");
    if (weights.size() != n_files) throw std::invalid_argument("catalog: weight count mismatch");
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("catalog: weights must be positive finite");
    }
}

CacheVector::CacheVector(std::vector<double> values, double cap) : y(std::move(values)), capacity(cap) {
    if (!(cap > 0.0)) throw std::invalid_argument("cache vector: capacity must be positive");
}

CacheVector CacheVector::uniform_fill(std::size_t n, double cap) {
    if (n == 0) throw std::invalid_argument("cache vector: empty");
    double v = cap / static_cast<double>(n);
    if (v > 1.0) v = 1.0;
    return CacheVector(std::vector<double>(n, v), cap);
}

bool CacheVector::is_feasible(double eps) const {
    for (double v : y) {
        if (v < -eps || v > 1.0 + eps) return false;
    }
    return total() <= capacity + eps;
}

double CacheVector::total() const {
    return std::accumulate(y.begin(), y.end(), 0.0);
}

double slot_utility(const Request& req, const CacheVector& cache, const Catalog& catalog) {
    if (req.file < 0 || static_cast<std::size_t>(req.file) >= catalog.n_files)
        throw std::invalid_argument("slot_utility: file index out of range");
    if (cache.y.size() != catalog.n_files)
        throw std::invalid_argument("slot_utility: cache and catalog sizes differ");
    return catalog.weights[static_cast<std::size_t>(req.file)] * cache.y[static_cast<std::size_t>(req.file)];
}

void RegretLedger::record(double policy_utility, double hindsight_utility) {
    if (policy_utility < 0.0 || hindsight_utility < 0.0)
        throw std::invalid_argument("ledger: utilities must be nonnegative");
    policy_.push_back(policy_utility);
    hindsight_.push_back(hindsight_utility);
}

double RegretLedger::cumulative_utility() const {
    return std::accumulate(policy_.begin(), policy_.end(), 0.0);
}

double RegretLedger::cumulative_regret() const {
    double r = 0.0;
    for (std::size_t t = 0; t < policy_.size(); ++t) r += hindsight_[t] - policy_[t];
    return r;
}

std::vector<double> RegretLedger::regret_series() const {
    std::vector<double> out(policy_.size());
    double r = 0.0;
    for (std::size_t t = 0; t < policy_.size(); ++t) {
        r += hindsight_[t] - policy_[t];
        out[t] = r;
    }
    return out;
}

std::vector<double> RegretLedger::cumulative_utility_series() const {
    std::vector<double> out(policy_.size());
    double c = 0.0;
    for (std::size_t t = 0; t < policy_.size(); ++t) {
        c += policy_[t];
        out[t] = c;
    }
    return out;
}

}  // namespace oncache
