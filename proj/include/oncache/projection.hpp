#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace oncache {

// Euclidean projection onto {y in [0,1]^N : sum(y) <= capacity}.
//
// Sort-based waterfill: coordinates pinned at 1 form a prefix of the sorted
// order, coordinates clipped to 0 a suffix, and the middle band shares a
// uniform shift chosen so the budget is met. The pinned prefix grows until
// no interior coordinate exceeds 1, which also covers inputs where several
// coordinates are above 1.
std::vector<double> project_capped_simplex(const std::vector<double>& z, double capacity);

// Reference implementation for tests: enumerates every ordered split of the
// sorted coordinates into (pinned, interior, zeroed) sets plus the inactive-
// budget candidate, keeps the splits satisfying the optimality conditions,
// and returns the closest candidate. Refuses instances with more than 16
// coordinates.
std::vector<double> project_oracle(const std::vector<double>& z, double capacity);

// One capped-simplex coordinate block under single-coordinate gradient
// bumps. Used as the cache state of the online policies: each step raises
// one coordinate and re-projects. Zero coordinates are kept out of the
// working set, so a step costs O(active) rather than O(N).
class CappedColumn {
public:
    CappedColumn(std::size_t n, double capacity);

    // Start from the uniform point (capacity/n per coordinate, clipped at 1).
    static CappedColumn uniform_fill(std::size_t n, double capacity);
    // Start from an arbitrary feasible point.
    static CappedColumn from_values(const std::vector<double>& values, double capacity);

    std::size_t size() const { return y_.size(); }
    double capacity() const { return cap_; }
    double value(std::size_t i) const { return y_[i]; }
    const std::vector<double>& values() const { return y_; }

    // y <- project(y + delta * e_file), delta >= 0.
    void bump_and_project(std::size_t file, double delta);

private:
    void ensure_active(std::size_t i);
    void drop_active(std::size_t i);

    std::vector<double> y_;
    std::vector<std::int32_t> active_;  // indices with y > 0, order deterministic
    std::vector<std::int32_t> pos_;     // index -> slot in active_, -1 if absent
    std::vector<std::int32_t> work_;    // scratch for the projection loop
    std::vector<std::int32_t> removed_scratch_;
    double cap_;
};

}  // namespace oncache
