#include "doctest.h"
#include "oncache/policies.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oncache/bounds.hpp"
#include "oncache/traces.hpp"
#include "oracles.hpp"

using namespace oncache;

TEST_CASE("diameter of the feasible set") {
    CHECK(cache_set_diameter(3.0, 10) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-12));
    CHECK(cache_set_diameter(8.0, 10) == doctest::Approx(std::sqrt(4.0)).epsilon(1e-12));
    CHECK(cache_set_diameter(5.0, 10) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    CHECK(cache_set_diameter(10.0, 10) == 0.0);
    CHECK_THROWS_AS(cache_set_diameter(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(cache_set_diameter(11.0, 10), std::invalid_argument);
}

TEST_CASE("horizon-tuned step size") {
    // diam / (w sqrt(T)) with diam = sqrt(2C) for a small cache.
    const double eta = horizon_optimal_step(1000.0, 10000, 200000, 1.0);
    CHECK(eta == doctest::Approx(std::sqrt(2000.0) / std::sqrt(200000.0)).epsilon(1e-12));
    CHECK(eta == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(horizon_optimal_step(30.0, 100, 10000, 2.0) ==
          doctest::Approx(std::sqrt(60.0) / (2.0 * 100.0)).epsilon(1e-12));
    CHECK_THROWS_AS(horizon_optimal_step(30.0, 100, 0, 1.0), std::invalid_argument);
}

TEST_CASE("gradient policy hand-computed trajectory") {
    const Catalog cat = Catalog::uniform(2);
    OgaPolicy p(cat, 1.0, StepSchedule::fixed(0.1));
    CHECK(p.fractions() == std::vector<double>{0.5, 0.5});

    // Bump file 0 by 0.1, then split the excess over both coordinates.
    CHECK(p.step({0, 0, -1}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.fractions()[0] == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(p.fractions()[1] == doctest::Approx(0.45).epsilon(1e-12));

    CHECK(p.step({1, 1, -1}) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(p.fractions()[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.fractions()[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gradient policy scales the bump by the file weight") {
    const Catalog cat(2, {1.0, 3.0});
    OgaPolicy p(cat, 1.0, StepSchedule::fixed(0.1));
    CHECK(p.step({0, 1, -1}) == doctest::Approx(1.5).epsilon(1e-12));  // 3 * 0.5
    // Bump is eta * w = 0.3: z = (0.5, 0.8), projected back to sum 1.
    CHECK(p.fractions()[1] == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(p.fractions()[0] == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("diminishing schedule shrinks over time") {
    const Catalog cat = Catalog::uniform(10);
    OgaPolicy p(cat, 2.0, StepSchedule::diminishing());
    const double e1 = p.current_eta();
    p.step({0, 0, -1});
    const double e2 = p.current_eta();
    p.step({1, 1, -1});
    CHECK(e1 > e2);
    CHECK(e2 > p.current_eta());
    CHECK(e1 == doctest::Approx(cache_set_diameter(2.0, 10) / 1.0).epsilon(1e-12));
}

TEST_CASE("gradient policy stays within its regret bound") {
    for (const std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const Trace tr = gen_zipf_iid(20, 2000, 0.9, seed);
        const Catalog cat = Catalog::uniform(20);
        OgaPolicy p(cat, 5.0, StepSchedule::horizon_optimal(tr.horizon()));
        double total = 0.0;
        for (const Request& r : tr.requests) total += p.step(r);
        const HindsightResult hs = hindsight_best_static(tr, cat, 5.0);
        const double regret = hs.total_utility - total;
        CHECK(regret <= oga_upper_bound(5.0, 20, tr.horizon(), 1.0) + 1e-9);
    }

    const Trace adv = gen_periodic_adversarial(5, 2000, 20);
    const Catalog cat = Catalog::uniform(20);
    OgaPolicy p(cat, 5.0, StepSchedule::horizon_optimal(adv.horizon()));
    double total = 0.0;
    for (const Request& r : adv.requests) total += p.step(r);
    const HindsightResult hs = hindsight_best_static(adv, cat, 5.0);
    CHECK(hs.total_utility - total <= oga_upper_bound(5.0, 20, adv.horizon(), 1.0) + 1e-9);
}

TEST_CASE("lru evicts the least recently used file") {
    const Catalog cat = Catalog::uniform(3);
    LruPolicy p(cat, 2.0);
    CHECK(p.step({0, 0, -1}) == 0.0);
    CHECK(p.step({1, 1, -1}) == 0.0);
    CHECK(p.step({2, 0, -1}) == 1.0);  // hit refreshes recency
    CHECK(p.step({3, 2, -1}) == 0.0);  // evicts file 1
    CHECK(p.step({4, 1, -1}) == 0.0);  // evicts file 0
    const auto contents = p.contents();
    REQUIRE(contents.size() == 2);
    CHECK(contents[0] == 1);
    CHECK(contents[1] == 2);
}

TEST_CASE("lru hit pays the file weight") {
    const Catalog cat(2, {1.0, 7.0});
    LruPolicy p(cat, 1.0);
    CHECK(p.step({0, 1, -1}) == 0.0);
    CHECK(p.step({1, 1, -1}) == 7.0);
    CHECK_THROWS_AS(LruPolicy(cat, 0.5), std::invalid_argument);
}

TEST_CASE("lfu keeps the files with the highest request frequency") {
    const Catalog cat = Catalog::uniform(3);
    LfuPolicy p(cat, 1.0);
    CHECK(p.step({0, 0, -1}) == 0.0);  // unseen files never count as cached
    CHECK(p.step({1, 0, -1}) == 1.0);
    CHECK(p.step({2, 1, -1}) == 0.0);
    // file 0: 2 requests since slot 0; file 1: 1 request since slot 2.
    // At slot 3, 2/3 > 1/1 is false, so file 1 leads on frequency.
    CHECK(p.step({3, 1, -1}) == 1.0);
}

TEST_CASE("lfu frequency ties break toward the lower file id") {
    const Catalog cat = Catalog::uniform(2);
    LfuPolicy a(cat, 1.0);
    // counts (2,1), first seen (0,2), next slot 4: rates are 2/4 and 1/2.
    a.load_counters({2, 1}, {0, 2}, 4);
    CHECK(a.step({4, 0, -1}) == 1.0);  // tie, lower id wins the slot

    LfuPolicy b(cat, 1.0);
    b.load_counters({2, 1}, {0, 2}, 4);
    CHECK(b.step({4, 1, -1}) == 0.0);
}

TEST_CASE("lfu never caches files it has not seen") {
    const Catalog cat = Catalog::uniform(4);
    LfuPolicy p(cat, 3.0);
    CHECK(p.step({0, 2, -1}) == 0.0);
    CHECK(p.step({1, 2, -1}) == 1.0);
    CHECK(p.step({2, 3, -1}) == 0.0);
}

TEST_CASE("cyclic worst case defeats the list policies") {
    const std::size_t t = 300;
    const Trace tr = gen_periodic_adversarial(2, t, 5);
    const Catalog cat = Catalog::uniform(5);

    LruPolicy lru(cat, 2.0);
    LfuPolicy lfu(cat, 2.0);
    double lru_total = 0.0, lfu_total = 0.0;
    for (const Request& r : tr.requests) {
        lru_total += lru.step(r);
        lfu_total += lfu.step(r);
    }
    CHECK(lru_total == 0.0);
    CHECK(lfu_total == 0.0);

    const HindsightResult hs = hindsight_best_static(tr, cat, 2.0);
    CHECK(hs.total_utility == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(hs.total_utility - lru_total >= prop1_bound(1.0, 2.0, static_cast<double>(t)));
    CHECK(hs.total_utility - lfu_total >= prop1_bound(1.0, 2.0, static_cast<double>(t)));
}

TEST_CASE("hindsight benchmark matches exhaustive search") {
    Rng rng(31);
    for (int it = 0; it < 200; ++it) {
        const std::size_t n = 2 + rng.uniform_below(7);
        const std::size_t t = 1 + rng.uniform_below(20);
        std::vector<double> weights(n);
        for (double& w : weights) w = 0.25 + 2.0 * rng.uniform01();
        const Catalog cat(n, weights);

        Trace tr;
        tr.n_files = n;
        for (std::size_t s = 0; s < t; ++s) {
            Request r;
            r.slot = static_cast<std::int64_t>(s);
            r.file = static_cast<std::int32_t>(rng.uniform_below(n));
            tr.requests.push_back(r);
        }

        double cap = 1.0 + static_cast<double>(rng.uniform_below(n));
        if (it % 4 == 0 && cap + 0.5 <= static_cast<double>(n)) cap += 0.5;

        std::vector<double> counts(n, 0.0);
        for (const Request& r : tr.requests) counts[static_cast<std::size_t>(r.file)] += 1.0;

        const HindsightResult hs = hindsight_best_static(tr, cat, cap);
        const double oracle = testo::best_static_oracle(counts, weights, cap);
        CHECK(hs.total_utility == doctest::Approx(oracle).epsilon(1e-9));

        double per_slot_sum = 0.0;
        for (double v : hs.per_slot) per_slot_sum += v;
        CHECK(per_slot_sum == doctest::Approx(hs.total_utility).epsilon(1e-9));
        CHECK(hs.cache.is_feasible());
    }
}

TEST_CASE("policy constructors validate their inputs") {
    const Catalog cat = Catalog::uniform(4);
    CHECK_THROWS_AS(OgaPolicy(cat, 0.0, StepSchedule::fixed(0.1)), std::invalid_argument);
    CHECK_THROWS_AS(OgaPolicy(cat, 5.0, StepSchedule::fixed(0.1)), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::fixed(0.0), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::fixed(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(StepSchedule::horizon_optimal(0), std::invalid_argument);
    OgaPolicy ok(cat, 2.0, StepSchedule::fixed(0.1));
    CHECK_THROWS_AS(ok.step({0, 9, -1}), std::invalid_argument);
}
