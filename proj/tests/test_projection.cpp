#include "doctest.h"
#include "oncache/projection.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "oncache/rng.hpp"
#include "oracles.hpp"

using namespace oncache;

namespace {

// Random instance with at most one coordinate above 1, the shape produced
// by a single-coordinate gradient bump.
std::vector<double> bump_shaped_point(Rng& rng, std::size_t n) {
    std::vector<double> z(n);
    while (true) {
        int above = 0;
        for (double& v : z) {
            v = -0.5 + 2.0 * rng.uniform01();
            if (v > 1.0) ++above;
        }
        if (above <= 1) return z;
    }
}

void check_feasible(const std::vector<double>& y, double cap) {
    double total = 0.0;
    for (double v : y) {
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-12);
        total += v;
    }
    CHECK(total <= cap + 1e-9);
}

}  // namespace

TEST_CASE("projection on known points") {
    // Budget binds and the sorted waterfill pins the top coordinate's excess.
    auto y = project_capped_simplex({1.2, 0.3, 0.1}, 1.0);
    CHECK(y[0] == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(y[1] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(y[2] == doctest::Approx(0.0).epsilon(1e-12));

    // Symmetric point spreads the budget evenly.
    y = project_capped_simplex({0.5, 0.5, 0.5}, 1.0);
    for (double v : y) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // Inside the set: box clipping alone settles it.
    y = project_capped_simplex({0.2, -0.3}, 1.0);
    CHECK(y[0] == 0.2);
    CHECK(y[1] == 0.0);

    // Feasible input comes back unchanged.
    const std::vector<double> p{0.4, 0.3, 0.2};
    CHECK(project_capped_simplex(p, 1.0) == p);

    // Full capacity turns the problem into a pure box clip.
    y = project_capped_simplex({1.7, -0.4, 0.5}, 3.0);
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 0.0);
    CHECK(y[2] == 0.5);

    // One file, tight cap.
    y = project_capped_simplex({1.7}, 1.0);
    CHECK(y[0] == 1.0);
}

TEST_CASE("projection input validation") {
    CHECK_THROWS_AS(project_capped_simplex({}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(project_capped_simplex({0.5}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(project_capped_simplex({0.5}, -1.0), std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS(project_capped_simplex({nan}, 1.0), std::invalid_argument);
}

TEST_CASE("projection agrees with the exhaustive oracle") {
    Rng rng(2024);
    for (int it = 0; it < 300; ++it) {
        const std::size_t n = 1 + rng.uniform_below(12);
        const double cap = 1.0 + static_cast<double>(rng.uniform_below(n));
        const auto z = bump_shaped_point(rng, n);
        const auto fast = project_capped_simplex(z, cap);
        const auto exact = project_oracle(z, cap);
        CHECK(testo::max_abs_diff(fast, exact) <= 1e-9);
        check_feasible(fast, cap);
    }
}

TEST_CASE("projection minimizes distance over random feasible points") {
    Rng rng(7);
    for (int it = 0; it < 50; ++it) {
        const std::size_t n = 2 + rng.uniform_below(10);
        const double cap = 1.0 + rng.uniform01() * static_cast<double>(n - 1);
        const auto z = bump_shaped_point(rng, n);
        const auto y = project_capped_simplex(z, cap);
        const double dz = testo::sq_dist(z, y);
        for (int k = 0; k < 50; ++k) {
            const auto p = testo::random_feasible(rng, n, cap);
            CHECK(dz <= testo::sq_dist(z, p) + 1e-9);
        }
    }
}

TEST_CASE("projection is idempotent, non-expansive, order preserving") {
    Rng rng(99);
    for (int it = 0; it < 100; ++it) {
        const std::size_t n = 2 + rng.uniform_below(8);
        const double cap = 1.0 + static_cast<double>(rng.uniform_below(n - 1));
        const auto a = bump_shaped_point(rng, n);
        const auto b = bump_shaped_point(rng, n);
        const auto pa = project_capped_simplex(a, cap);
        const auto pb = project_capped_simplex(b, cap);

        CHECK(testo::max_abs_diff(project_capped_simplex(pa, cap), pa) <= 1e-12);
        CHECK(testo::sq_dist(pa, pb) <= testo::sq_dist(a, b) + 1e-9);

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (a[i] >= a[j]) CHECK(pa[i] >= pa[j] - 1e-12);
    }
}

TEST_CASE("fractional capacity stays exact") {
    const auto y = project_capped_simplex({1.0, 1.0, 1.0, 1.0}, 2.5);
    for (double v : y) CHECK(v == doctest::Approx(0.625).epsilon(1e-12));
    check_feasible(y, 2.5);
}

TEST_CASE("incremental column tracks the full projection") {
    Rng rng(1234);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + rng.uniform_below(12);
        double cap = 1.0 + static_cast<double>(rng.uniform_below(n));
        if (rep % 3 == 0) cap -= 0.5;  // fractional budgets too
        CappedColumn col = CappedColumn::uniform_fill(n, cap);
        std::vector<double> ref = col.values();

        for (int step = 0; step < 120; ++step) {
            const auto f = static_cast<std::int32_t>(rng.uniform_below(n));
            const double delta = step % 17 == 0 ? 5.0 : 0.5 * rng.uniform01();
            col.bump_and_project(f, delta);

            ref[static_cast<std::size_t>(f)] += delta;
            ref = project_capped_simplex(ref, cap);
            CHECK(testo::max_abs_diff(col.values(), ref) <= 1e-12);
            ref = col.values();  // keep trajectories pinned together
        }
        check_feasible(col.values(), cap);
    }
}

TEST_CASE("incremental column edge cases") {
    CappedColumn col = CappedColumn::uniform_fill(1, 1.0);
    col.bump_and_project(0, 3.0);
    CHECK(col.values()[0] == 1.0);

    CHECK_THROWS_AS(col.bump_and_project(0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(col.bump_and_project(1, 0.1), std::invalid_argument);

    // A zero bump never changes the state.
    CappedColumn c2 = CappedColumn::uniform_fill(4, 2.0);
    const auto before = c2.values();
    c2.bump_and_project(2, 0.0);
    CHECK(c2.values() == before);

    // from_values checks the box and the budget.
    CHECK_THROWS_AS(CappedColumn::from_values({0.5, 0.7}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CappedColumn::from_values({1.2}, 2.0), std::invalid_argument);
    const auto ok = CappedColumn::from_values({0.25, 0.75}, 1.0);
    CHECK(ok.values()[1] == 0.75);
}

TEST_CASE("oracle rejects oversized instances") {
    CHECK_THROWS_AS(project_oracle(std::vector<double>(17, 0.5), 2.0), std::invalid_argument);
}
