#include "oncache/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "oncache/core.hpp"

namespace oncache {

namespace {

void validate_input(const std::vector<double>& z, double capacity) {
    if (z.empty()) throw std::invalid_argument("projection: empty input");
    if (!(capacity > 0.0) || !std::isfinite(capacity))
        throw std::invalid_argument("projection: capacity must be positive and finite");
    for (double v : z) {
        if (!std::isfinite(v)) throw std::invalid_argument("projection: coordinates must be finite");
    }
}

std::vector<std::size_t> sorted_order(const std::vector<double>& z) {
    std::vector<std::size_t> idx(z.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
    return idx;
}

}  // namespace

std::vector<double> project_capped_simplex(const std::vector<double>& z, double capacity) {
    validate_input(z, capacity);
    const std::size_t n = z.size();

    // If clipping to the box already fits the budget, that is the answer.
    std::vector<double> clipped(n);
    double clip_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        clipped[i] = std::clamp(z[i], 0.0, 1.0);
        clip_sum += clipped[i];
    }
    if (clip_sum <= capacity) return clipped;

    const std::vector<std::size_t> idx = sorted_order(z);
    std::vector<double> zs(n);
    for (std::size_t j = 0; j < n; ++j) zs[j] = z[idx[j]];
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + zs[j];

    std::size_t pins = 0;
    std::size_t m = n;
    double shift = 0.0;
    while (true) {
        // Waterfill over the unpinned band [pins, m): drop coordinates that
        // would go negative and re-solve until the band is stable.
        m = n;
        while (true) {
            const std::size_t count = m - pins;
            if (count == 0) {
                shift = 0.0;
                break;
            }
            const double band_sum = prefix[m] - prefix[pins];
            shift = (band_sum - (capacity - static_cast<double>(pins))) / static_cast<double>(count);
            const auto it = std::partition_point(zs.begin() + static_cast<std::ptrdiff_t>(pins),
                                                 zs.begin() + static_cast<std::ptrdiff_t>(m),
                                                 [&](double v) { return v - shift >= 0.0; });
            const std::size_t keep = static_cast<std::size_t>(it - zs.begin());
            if (keep == m) break;
            m = keep;
        }
        if (m == pins) break;                       // nothing left unpinned
        if (zs[pins] - shift > 1.0 && pins + 1 <= n) {
            ++pins;                                 // first band coordinate exceeds the box
            continue;
        }
        break;
    }

    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < pins; ++j) out[idx[j]] = 1.0;
    for (std::size_t j = pins; j < m; ++j) out[idx[j]] = std::clamp(zs[j] - shift, 0.0, 1.0);
    return out;
}

std::vector<double> project_oracle(const std::vector<double>& z, double capacity) {
    validate_input(z, capacity);
    const std::size_t n = z.size();
    if (n > 16) throw std::invalid_argument("project_oracle: refuses instances larger than 16");
    constexpr double tol = 1e-9;

    const std::vector<std::size_t> idx = sorted_order(z);
    std::vector<double> zs(n);
    for (std::size_t j = 0; j < n; ++j) zs[j] = z[idx[j]];

    std::vector<double> best;
    double best_dist = std::numeric_limits<double>::infinity();
    std::vector<double> cand(n);

    auto consider = [&](const std::vector<double>& y) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += (zs[j] - y[j]) * (zs[j] - y[j]);
        if (d < best_dist) {
            best_dist = d;
            best = y;
        }
    };

    // Inactive-budget candidate: plain box clip.
    {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            cand[j] = std::clamp(zs[j], 0.0, 1.0);
            s += cand[j];
        }
        if (s <= capacity + tol) consider(cand);
    }

    // Tight-budget candidates: pinned prefix of size a, interior band of
    // size b, zero suffix. Multiplier conditions are checked for each set.
    for (std::size_t a = 0; a <= n; ++a) {
        for (std::size_t b = 0; a + b <= n; ++b) {
            double shift = 0.0;
            bool ok = true;
            if (b == 0) {
                // All-pinned split, budget multiplier taken as zero.
                if (static_cast<double>(a) > capacity + tol) continue;
            } else {
                double band = 0.0;
                for (std::size_t j = a; j < a + b; ++j) band += zs[j];
                shift = (band - (capacity - static_cast<double>(a))) / static_cast<double>(b);
                if (shift < -tol) continue;
            }
            for (std::size_t j = 0; j < a && ok; ++j)
                if (zs[j] - shift < 1.0 - tol) ok = false;
            for (std::size_t j = a; j < a + b && ok; ++j) {
                const double v = zs[j] - shift;
                if (v < -tol || v > 1.0 + tol) ok = false;
            }
            for (std::size_t j = a + b; j < n && ok; ++j)
                if (zs[j] - shift > tol) ok = false;
            if (!ok) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (j < a)
                    cand[j] = 1.0;
                else if (j < a + b)
                    cand[j] = std::clamp(zs[j] - shift, 0.0, 1.0);
                else
                    cand[j] = 0.0;
            }
            consider(cand);
        }
    }

    if (best.empty()) throw std::runtime_error("project_oracle: no split satisfied the optimality conditions");
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) out[idx[j]] = best[j];
    return out;
}

CappedColumn::CappedColumn(std::size_t n, double capacity)
    : y_(n, 0.0), pos_(n, -1), cap_(capacity) {
    if (n == 0) throw std::invalid_argument("capped column: empty");
    if (!(capacity > 0.0)) throw std::invalid_argument("capped column: capacity must be positive");
}

CappedColumn CappedColumn::uniform_fill(std::size_t n, double capacity) {
    CappedColumn c(n, capacity);
    const double v = std::min(capacity / static_cast<double>(n), 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        c.y_[i] = v;
        c.pos_[i] = static_cast<std::int32_t>(i);
        c.active_.push_back(static_cast<std::int32_t>(i));
    }
    return c;
}

CappedColumn CappedColumn::from_values(const std::vector<double>& values, double capacity) {
    CappedColumn c(values.size(), capacity);
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (v < -kFeasEps || v > 1.0 + kFeasEps) throw std::invalid_argument("capped column: value outside box");
        total += v;
        if (v > 0.0) {
            c.y_[i] = std::min(v, 1.0);
            c.pos_[i] = static_cast<std::int32_t>(c.active_.size());
            c.active_.push_back(static_cast<std::int32_t>(i));
        }
    }
    if (total > capacity + kFeasEps) throw std::invalid_argument("capped column: initial point over budget");
    return c;
}

void CappedColumn::ensure_active(std::size_t i) {
    if (pos_[i] < 0) {
        pos_[i] = static_cast<std::int32_t>(active_.size());
        active_.push_back(static_cast<std::int32_t>(i));
    }
}

void CappedColumn::drop_active(std::size_t i) {
    const std::int32_t p = pos_[i];
    if (p < 0) return;
    const std::int32_t last = active_.back();
    active_[static_cast<std::size_t>(p)] = last;
    pos_[static_cast<std::size_t>(last)] = p;
    active_.pop_back();
    pos_[i] = -1;
}

void CappedColumn::bump_and_project(std::size_t file, double delta) {
    if (file >= y_.size()) throw std::invalid_argument("capped column: file index out of range");
    if (delta < 0.0 || !std::isfinite(delta)) throw std::invalid_argument("capped column: bump must be nonnegative");
    if (delta == 0.0) return;

    const double zf = y_[file] + delta;
    double active_sum = 0.0;
    for (std::int32_t i : active_) active_sum += y_[static_cast<std::size_t>(i)];

    // Budget still slack after the bump: only the bumped coordinate moves.
    const double capped = std::min(zf, 1.0);
    if (active_sum - y_[file] + capped <= cap_) {
        y_[file] = capped;
        ensure_active(file);
        return;
    }

    // Tight budget: waterfill over the active coordinates, optionally with
    // the bumped coordinate pinned at 1 when it would exceed the box.
    auto attempt = [&](bool pin) -> double {
        work_.clear();
        bool has_f = false;
        for (std::int32_t i : active_) {
            if (static_cast<std::size_t>(i) == file) {
                has_f = true;
                if (pin) continue;
            }
            work_.push_back(i);
        }
        if (!pin && !has_f) work_.push_back(static_cast<std::int32_t>(file));
        const double target = cap_ - (pin ? 1.0 : 0.0);
        double shift = 0.0;
        while (true) {
            if (work_.empty()) return 0.0;
            double sum = 0.0;
            for (std::int32_t i : work_)
                sum += (static_cast<std::size_t>(i) == file) ? zf : y_[static_cast<std::size_t>(i)];
            shift = (sum - target) / static_cast<double>(work_.size());
            std::size_t kept = 0;
            for (std::size_t k = 0; k < work_.size(); ++k) {
                const std::int32_t i = work_[k];
                const double zi = (static_cast<std::size_t>(i) == file) ? zf : y_[static_cast<std::size_t>(i)];
                if (zi - shift >= 0.0)
                    work_[kept++] = i;
                else
                    removed_scratch_.push_back(i);
            }
            if (kept == work_.size()) break;
            work_.resize(kept);
        }
        return shift;
    };

    removed_scratch_.clear();
    double shift = attempt(false);
    bool pinned = false;
    if (zf - shift > 1.0 && cap_ > 1.0) {
        removed_scratch_.clear();
        shift = attempt(true);
        pinned = true;
    }

    for (std::int32_t i : removed_scratch_) {
        const std::size_t u = static_cast<std::size_t>(i);
        y_[u] = 0.0;
        drop_active(u);
    }
    for (std::int32_t i : work_) {
        const std::size_t u = static_cast<std::size_t>(i);
        const double zi = (u == file) ? zf : y_[u];
        const double v = zi - shift;
        if (v > 0.0) {
            y_[u] = std::min(v, 1.0);
            ensure_active(u);
        } else {
            y_[u] = 0.0;
            drop_active(u);
        }
    }
    if (pinned) {
        y_[file] = 1.0;
        ensure_active(file);
    }
}

}  // namespace oncache
