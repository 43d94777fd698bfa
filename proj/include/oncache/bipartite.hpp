#pragma once

#include <cstdint>
#include <list>
#include <string>
#include <unordered_map>
#include <vector>

#include "oncache/core.hpp"
#include "oncache/projection.hpp"
#include "oncache/rng.hpp"
#include "oncache/traces.hpp"

namespace oncache {

// Locations on one side, caches on the other. A request arrives at a
// location and can be served, fractionally, by any connected cache; serving
// file n at location i from cache j is worth weight(n, i, j) per unit.
struct BipartiteNetwork {
    std::size_t n_locations = 0;
    std::size_t n_caches = 0;
    std::vector<double> capacities;       // per cache
    std::vector<std::uint8_t> reach;      // n_locations x n_caches, row-major
    std::vector<double> base_weights;     // n_locations x n_caches, row-major
    std::vector<double> file_multipliers; // optional, per file

    bool reachable(std::size_t loc, std::size_t cache) const { return reach[loc * n_caches + cache] != 0; }
    double base_weight(std::size_t loc, std::size_t cache) const { return base_weights[loc * n_caches + cache]; }
    double weight(std::size_t file, std::size_t loc, std::size_t cache) const;
    std::size_t max_right_degree() const;
    double max_weight() const;
    void validate() const;

    static BipartiteNetwork single_cache(double capacity, const std::vector<double>& file_weights);
    static BipartiteNetwork from_json_file(const std::string& path);
    void to_json_file(const std::string& path) const;
};

// How one request is split across reachable caches. alpha is the marginal
// serving weight where the unit budget ran out (0 if it did not).
struct RoutingSolution {
    double value = 0.0;
    double origin_share = 1.0;
    double alpha = 0.0;
    std::vector<double> z;  // per cache, zero for unreachable ones
};

// Greedy waterfill in decreasing weight order; exact for this LP.
RoutingSolution route(const BipartiteNetwork& net, const std::vector<CappedColumn>& placement,
                      const Request& req);
RoutingSolution route_matrix(const BipartiteNetwork& net, const std::vector<double>& placement_flat,
                             std::size_t n_files, const Request& req);

// Ascent direction for the slot utility at the routed point: per reachable
// cache, the serving weight above the marginal, clipped at zero. Nonzero
// only on the requested file's row.
std::vector<double> supergradient(const BipartiteNetwork& net, const RoutingSolution& sol,
                                  const Request& req);

// Generalized diameter of the per-cache constraint product and the matching
// horizon-tuned step for the bipartite gradient policy.
double network_diameter(const BipartiteNetwork& net, std::size_t n_files);
double bsa_horizon_step(const BipartiteNetwork& net, std::size_t n_files, std::size_t horizon);

// Projected gradient ascent over the product of per-cache capped simplices.
class BsaPolicy {
public:
    BsaPolicy(const BipartiteNetwork& net, std::size_t n_files, double eta);

    double step(const Request& req);

    const std::vector<CappedColumn>& placement() const { return columns_; }
    double eta() const { return eta_; }

private:
    const BipartiteNetwork& net_;
    std::size_t n_files_;
    double eta_;
    std::vector<CappedColumn> columns_;
};

// Per-cache LRU lists with cooperative serving: a request is served by the
// highest-weight reachable replica; on a global miss the file is inserted
// into one uniformly drawn reachable cache.
class MlruPolicy {
public:
    MlruPolicy(const BipartiteNetwork& net, std::size_t n_files, std::uint64_t seed);

    double step(const Request& req);

protected:
    struct CacheList {
        std::size_t cap = 0;
        std::list<std::int32_t> order;
        std::unordered_map<std::int32_t, std::list<std::int32_t>::iterator> where;

        bool contains(std::int32_t f) const { return where.count(f) != 0; }
        void touch(std::int32_t f);
        void insert(std::int32_t f);
    };

    // Returns serving cache index or -1; fills reachable insertion targets.
    int serve(const Request& req, std::vector<std::size_t>& targets, double& utility);

    const BipartiteNetwork& net_;
    std::size_t n_files_;
    std::vector<CacheList> caches_;
    Rng rng_;
};

// Same serving rule, but a miss inserts only with probability q.
class LazyQLruPolicy : public MlruPolicy {
public:
    LazyQLruPolicy(const BipartiteNetwork& net, std::size_t n_files, double q, std::uint64_t seed);

    double step(const Request& req);

private:
    double q_;
};

struct HindsightNetworkResult {
    std::vector<double> placement;  // n_files x n_caches, row-major
    double total_utility = 0.0;
    std::vector<double> per_slot;
};

// Best fixed fractional placement for a full trace, found by multi-epoch
// projected supergradient ascent on the aggregate utility with diminishing
// steps; the best iterate under exact evaluation is returned.
HindsightNetworkResult hindsight_best_static_network(const Trace& trace, const BipartiteNetwork& net,
                                                     std::size_t epochs = 50);

// Exhaustive maximum over 0/1 placements; needs n_files * n_caches <= 12
// and integral capacities. Testing reference.
double hindsight_network_bruteforce_integral(const Trace& trace, const BipartiteNetwork& net);

}  // namespace oncache
