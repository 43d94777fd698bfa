#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oncache {

inline constexpr const char* kVersion = "0.1.0";

// Feasibility slack used for box and capacity comparisons throughout.
inline constexpr double kFeasEps = 1e-9;

struct Request {
    std::int64_t slot = 0;
    std::int32_t file = 0;
    std::int32_t location = -1;  // -1 when the trace carries no locations
};

// File catalog with per-file utility weights.
struct Catalog {
    std::size_t n_files = 0;
    std::vector<double> weights;  // size n_files, all > 0

    Catalog() = default;
    Catalog(std::size_t n, std::vector<double> w);
    static Catalog uniform(std::size_t n, double w = 1.0);

    double weight(std::size_t file) const;
    double max_weight() const;
    void validate() const;
};

// Fractional cache occupancy under a total capacity budget.
struct CacheVector {
    std::vector<double> y;
    double capacity = 0.0;

    CacheVector() = default;
    CacheVector(std::vector<double> values, double cap);
    static CacheVector uniform_fill(std::size_t n, double cap);

    std::size_t size() const { return y.size(); }
    bool is_feasible(double eps = kFeasEps) const;
    double total() const;
};

// Utility collected in one slot: weight of the requested file times the
// cached fraction.
double slot_utility(const Request& req, const CacheVector& cache, const Catalog& catalog);

// Per-slot utility series for a policy and the hindsight benchmark it is
// measured against.
class RegretLedger {
public:
    void record(double policy_utility, double hindsight_utility);

    std::size_t slots() const { return policy_.size(); }
    const std::vector<double>& policy_utilities() const { return policy_; }
    const std::vector<double>& hindsight_utilities() const { return hindsight_; }

    double cumulative_utility() const;
    double cumulative_regret() const;           // over all recorded slots
    std::vector<double> regret_series() const;  // prefix regret per slot
    std::vector<double> cumulative_utility_series() const;

private:
    std::vector<double> policy_;
    std::vector<double> hindsight_;
};

}  // namespace oncache
