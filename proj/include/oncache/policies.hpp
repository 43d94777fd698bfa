#pragma once

#include <cstdint>
#include <list>
#include <unordered_map>
#include <vector>

#include "oncache/core.hpp"
#include "oncache/projection.hpp"
#include "oncache/traces.hpp"

namespace oncache {

// Feasible-set diameter for capacity C out of N unit-sized slots.
double cache_set_diameter(double capacity, std::size_t n_files);

// Fixed step tuned to a known horizon: diameter / (w_max * sqrt(T)).
double horizon_optimal_step(double capacity, std::size_t n_files, std::size_t horizon, double w_max);

struct StepSchedule {
    enum class Kind { Fixed, HorizonOptimal, Diminishing };
    Kind kind = Kind::Fixed;
    double eta = 0.0;        // Fixed
    std::size_t horizon = 0; // HorizonOptimal

    static StepSchedule fixed(double eta);
    static StepSchedule horizon_optimal(std::size_t horizon);
    static StepSchedule diminishing();
};

// Online gradient ascent over the fractional cache set. Utility is linear
// per slot, so the gradient is the requested file's weight on its own
// coordinate; the iterate is re-projected after every step.
class OgaPolicy {
public:
    OgaPolicy(const Catalog& catalog, double capacity, StepSchedule schedule);

    // Utility collected in this slot (before the update), then advance.
    double step(const Request& req);

    const std::vector<double>& fractions() const { return column_.values(); }
    double capacity() const { return column_.capacity(); }
    double current_eta() const;

private:
    const Catalog& catalog_;
    CappedColumn column_;
    StepSchedule schedule_;
    double diameter_;
    std::size_t t_ = 0;  // slots already processed
};

// Evict-least-recently-used over floor(capacity) slots.
class LruPolicy {
public:
    LruPolicy(const Catalog& catalog, double capacity);

    double step(const Request& req);

    // Cached files, most recent first.
    std::vector<std::int32_t> contents() const;
    std::size_t capacity_slots() const { return cap_; }

private:
    const Catalog& catalog_;
    std::size_t cap_;
    std::list<std::int32_t> order_;
    std::unordered_map<std::int32_t, std::list<std::int32_t>::iterator> where_;
};

// Keeps the floor(capacity) files of highest request frequency, where the
// frequency of file n at slot t is count / (t - first_seen), evaluated
// before the current request is counted. Ties go to the lower file index.
class LfuPolicy {
public:
    LfuPolicy(const Catalog& catalog, double capacity);

    double step(const Request& req);

    // Test hook: preload counters as if the given history had been seen.
    void load_counters(const std::vector<std::int64_t>& counts, const std::vector<std::int64_t>& first_seen,
                       std::int64_t next_slot);

private:
    bool cached_before_count(std::int32_t file) const;

    const Catalog& catalog_;
    std::size_t cap_;
    std::int64_t t_ = 0;
    std::vector<std::int64_t> count_;
    std::vector<std::int64_t> first_seen_;  // -1 while unseen
    std::vector<std::int32_t> seen_;        // first-seen order
};

// Best fixed fractional cache for a full trace: fill the floor(C) highest
// weight*count files, put the fractional remainder on the next one.
struct HindsightResult {
    CacheVector cache;
    double total_utility = 0.0;
    std::vector<double> per_slot;  // utility of the fixed cache per slot
};

HindsightResult hindsight_best_static(const Trace& trace, const Catalog& catalog, double capacity);

}  // namespace oncache
