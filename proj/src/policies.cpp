#include "oncache/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oncache {

double cache_set_diameter(double capacity, std::size_t n_files) {
    const double n = static_cast<double>(n_files);
    if (!(capacity > 0.0) || capacity > n)
        throw std::invalid_argument("diameter: capacity must be in (0, N]");
    if (capacity <= n / 2.0) return std::sqrt(2.0 * capacity);
    return std::sqrt(2.0 * (n - capacity));
}

double horizon_optimal_step(double capacity, std::size_t n_files, std::size_t horizon, double w_max) {
    if (horizon == 0) throw std::invalid_argument("horizon step: horizon must be positive");
    if (!(w_max > 0.0)) throw std::invalid_argument("horizon step: w_max must be positive");
    return cache_set_diameter(capacity, n_files) / (w_max * std::sqrt(static_cast<double>(horizon)));
}

StepSchedule StepSchedule::fixed(double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("schedule: fixed step must be positive");
    StepSchedule s;
    s.kind = Kind::Fixed;
    s.eta = eta;
    return s;
}

StepSchedule StepSchedule::horizon_optimal(std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("schedule: horizon must be positive");
    StepSchedule s;
    s.kind = Kind::HorizonOptimal;
    s.horizon = horizon;
    return s;
}

StepSchedule StepSchedule::diminishing() {
    StepSchedule s;
    s.kind = Kind::Diminishing;
    return s;
}

OgaPolicy::OgaPolicy(const Catalog& catalog, double capacity, StepSchedule schedule)
    : catalog_(catalog),
      column_(CappedColumn::uniform_fill(catalog.n_files, capacity)),
      schedule_(schedule),
      diameter_(cache_set_diameter(capacity, catalog.n_files)) {
    catalog_.validate();
    if (capacity > static_cast<double>(catalog.n_files))
        throw std::invalid_argument("oga: capacity exceeds catalog size");
    if (schedule_.kind == StepSchedule::Kind::HorizonOptimal)
        schedule_.eta = horizon_optimal_step(capacity, catalog.n_files, schedule_.horizon, catalog.max_weight());
}

double OgaPolicy::current_eta() const {
    switch (schedule_.kind) {
        case StepSchedule::Kind::Fixed:
        case StepSchedule::Kind::HorizonOptimal:
            return schedule_.eta;
        case StepSchedule::Kind::Diminishing:
            return diameter_ / (catalog_.max_weight() * std::sqrt(static_cast<double>(t_ + 1)));
    }
    return schedule_.eta;
}

double OgaPolicy::step(const Request& req) {
    const std::size_t f = static_cast<std::size_t>(req.file);
    if (req.file < 0 || f >= catalog_.n_files) throw std::invalid_argument("oga: file index out of range");
    const double w = catalog_.weights[f];
    const double utility = w * column_.value(f);
    column_.bump_and_project(f, current_eta() * w);
    ++t_;
    return utility;
}

LruPolicy::LruPolicy(const Catalog& catalog, double capacity)
    : catalog_(catalog), cap_(static_cast<std::size_t>(std::floor(capacity))) {
    if (cap_ == 0) throw std::invalid_argument("lru: capacity must be at least 1");
}

double LruPolicy::step(const Request& req) {
    const std::int32_t f = req.file;
    if (f < 0 || static_cast<std::size_t>(f) >= catalog_.n_files)
        throw std::invalid_argument("lru: file index out of range");
    const auto it = where_.find(f);
    if (it != where_.end()) {
        order_.splice(order_.begin(), order_, it->second);
        return catalog_.weights[static_cast<std::size_t>(f)];
    }
    if (order_.size() == cap_) {
        where_.erase(order_.back());
        order_.pop_back();
    }
    order_.push_front(f);
    where_[f] = order_.begin();
    return 0.0;
}

std::vector<std::int32_t> LruPolicy::contents() const {
    return {order_.begin(), order_.end()};
}

LfuPolicy::LfuPolicy(const Catalog& catalog, double capacity)
    : catalog_(catalog),
      cap_(static_cast<std::size_t>(std::floor(capacity))),
      count_(catalog.n_files, 0),
      first_seen_(catalog.n_files, -1) {
    if (cap_ == 0) throw std::invalid_argument("lfu: capacity must be at least 1");
}

void LfuPolicy::load_counters(const std::vector<std::int64_t>& counts, const std::vector<std::int64_t>& first_seen,
                              std::int64_t next_slot) {
    if (counts.size() != count_.size() || first_seen.size() != first_seen_.size())
        throw std::invalid_argument("lfu: counter size mismatch");
    count_ = counts;
    first_seen_ = first_seen;
    seen_.clear();
    for (std::size_t n = 0; n < count_.size(); ++n)
        if (first_seen_[n] >= 0) seen_.push_back(static_cast<std::int32_t>(n));
    t_ = next_slot;
}

// Rank test without materializing the whole ranking: the requested file is
// cached iff fewer than cap_ files beat it. Frequencies are compared as
// exact integer cross products.
bool LfuPolicy::cached_before_count(std::int32_t file) const {
    const std::size_t f = static_cast<std::size_t>(file);
    if (count_[f] == 0) return false;
    const std::int64_t cf = count_[f];
    const std::int64_t df = t_ - first_seen_[f];
    std::size_t better = 0;
    for (const std::int32_t m : seen_) {
        if (m == file) continue;
        const std::int64_t cm = count_[static_cast<std::size_t>(m)];
        const std::int64_t dm = t_ - first_seen_[static_cast<std::size_t>(m)];
        const std::int64_t lhs = cm * df;
        const std::int64_t rhs = cf * dm;
        if (lhs > rhs || (lhs == rhs && m < file)) {
            if (++better >= cap_) return false;
        }
    }
    return better < cap_;
}

double LfuPolicy::step(const Request& req) {
    const std::int32_t f = req.file;
    if (f < 0 || static_cast<std::size_t>(f) >= catalog_.n_files)
        throw std::invalid_argument("lfu: file index out of range");
    const double utility = cached_before_count(f) ? catalog_.weights[static_cast<std::size_t>(f)] : 0.0;
    if (first_seen_[static_cast<std::size_t>(f)] < 0) {
        first_seen_[static_cast<std::size_t>(f)] = t_;
        seen_.push_back(f);
    }
    ++count_[static_cast<std::size_t>(f)];
    ++t_;
    return utility;
}

HindsightResult hindsight_best_static(const Trace& trace, const Catalog& catalog, double capacity) {
    if (trace.n_files > catalog.n_files)
        throw std::invalid_argument("hindsight: trace catalog larger than weight catalog");
    if (!(capacity > 0.0)) throw std::invalid_argument("hindsight: capacity must be positive");
    const std::size_t n = catalog.n_files;

    std::vector<double> score(n, 0.0);
    for (const Request& r : trace.requests) score[static_cast<std::size_t>(r.file)] += catalog.weights[static_cast<std::size_t>(r.file)];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

    HindsightResult res;
    res.cache = CacheVector(std::vector<double>(n, 0.0), capacity);
    const std::size_t full = std::min(static_cast<std::size_t>(std::floor(capacity)), n);
    for (std::size_t k = 0; k < full; ++k) res.cache.y[order[k]] = 1.0;
    const double frac = capacity - static_cast<double>(full);
    if (frac > 0.0 && full < n) res.cache.y[order[full]] = std::min(frac, 1.0);

    res.per_slot.reserve(trace.horizon());
    for (const Request& r : trace.requests) {
        const std::size_t f = static_cast<std::size_t>(r.file);
        const double u = catalog.weights[f] * res.cache.y[f];
        res.per_slot.push_back(u);
        res.total_utility += u;
    }
    return res;
}

}  // namespace oncache
