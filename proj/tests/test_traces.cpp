#include "doctest.h"
#include "oncache/traces.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace oncache;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

bool same_requests(const Trace& a, const Trace& b) {
    if (a.requests.size() != b.requests.size()) return false;
    for (std::size_t i = 0; i < a.requests.size(); ++i) {
        const Request &x = a.requests[i], &y = b.requests[i];
        if (x.slot != y.slot || x.file != y.file || x.location != y.location) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("zipf generator is deterministic and in range") {
    const Trace a = gen_zipf_iid(50, 2000, 0.8, 7);
    const Trace b = gen_zipf_iid(50, 2000, 0.8, 7);
    const Trace c = gen_zipf_iid(50, 2000, 0.8, 8);
    CHECK(same_requests(a, b));
    CHECK_FALSE(same_requests(a, c));
    a.validate();
    CHECK(a.n_files == 50);
    CHECK(a.horizon() == 2000);
    for (const Request& r : a.requests) {
        CHECK(r.file >= 0);
        CHECK(r.file < 50);
        CHECK(r.location == -1);
    }
}

TEST_CASE("zipf frequencies follow the popularity law") {
    const std::size_t n = 20, t = 100000;
    const Trace tr = gen_zipf_iid(n, t, 1.2, 3);
    std::vector<double> count(n, 0.0);
    for (const Request& r : tr.requests) count[static_cast<std::size_t>(r.file)] += 1.0;

    double norm = 0.0;
    for (std::size_t k = 1; k <= n; ++k) norm += std::pow(static_cast<double>(k), -1.2);
    const double p0 = 1.0 / norm;
    const double sd = std::sqrt(p0 * (1.0 - p0) * static_cast<double>(t));
    CHECK(std::abs(count[0] - p0 * static_cast<double>(t)) <= 4.0 * sd);
    CHECK(count[0] > count[n - 1]);

    // Exponent zero is the uniform law: chi-square against equal cells.
    const Trace u = gen_zipf_iid(n, t, 0.0, 3);
    std::vector<double> uc(n, 0.0);
    for (const Request& r : u.requests) uc[static_cast<std::size_t>(r.file)] += 1.0;
    const double expect = static_cast<double>(t) / static_cast<double>(n);
    double chi2 = 0.0;
    for (double v : uc) chi2 += (v - expect) * (v - expect) / expect;
    CHECK(chi2 < 43.8);  // chi-square(19) upper 0.001 quantile
}

TEST_CASE("zipf with locations attaches uniform location draws") {
    const Trace tr = gen_zipf_iid(10, 5000, 0.5, 9, 4);
    CHECK(tr.n_locations == 4);
    std::vector<int> seen(4, 0);
    for (const Request& r : tr.requests) {
        REQUIRE(r.location >= 0);
        REQUIRE(r.location < 4);
        seen[static_cast<std::size_t>(r.location)] = 1;
    }
    CHECK(seen == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("periodic trace cycles through cache size plus one files") {
    const Trace tr = gen_periodic_adversarial(2, 6);
    REQUIRE(tr.horizon() == 6);
    CHECK(tr.n_files == 3);
    std::vector<std::int32_t> files;
    for (const Request& r : tr.requests) files.push_back(r.file);
    CHECK(files == std::vector<std::int32_t>{0, 1, 2, 0, 1, 2});

    const Trace two = gen_periodic_adversarial(1, 4);
    std::vector<std::int32_t> f2;
    for (const Request& r : two.requests) f2.push_back(r.file);
    CHECK(f2 == std::vector<std::int32_t>{0, 1, 0, 1});

    const Trace once = gen_periodic_adversarial(4, 5);
    std::vector<int> seen(5, 0);
    for (const Request& r : once.requests) seen[static_cast<std::size_t>(r.file)] += 1;
    CHECK(seen == std::vector<int>{1, 1, 1, 1, 1});

    const Trace wide = gen_periodic_adversarial(2, 6, 10);
    CHECK(wide.n_files == 10);

    CHECK_THROWS_AS(gen_periodic_adversarial(5, 10, 4), std::invalid_argument);
}

TEST_CASE("shot noise requests follow shot intensities") {
    // One shot across the whole horizon: every request is that file.
    const std::vector<Shot> cover{{0.0, 100.0, 10.0}};
    const Trace all = snm_trace_from_shots(cover, 2, 100, 5);
    for (const Request& r : all.requests) CHECK(r.file == 1);

    // After the shot dies only the background file remains.
    const std::vector<Shot> early{{0.0, 10.0, 10.0}};
    const Trace tail = snm_trace_from_shots(early, 2, 20, 5);
    for (const Request& r : tail.requests) {
        if (r.slot >= 10) CHECK(r.file == 0);
        if (r.slot < 10) CHECK(r.file == 1);
    }

    // No background and a shot-free slot cannot be generated.
    CHECK_THROWS_AS(snm_trace_from_shots(early, 2, 20, 5, false), std::invalid_argument);

    // Two simultaneous shots with volumes 2:1 draw requests roughly 2:1.
    const std::vector<Shot> pair{{0.0, 100000.0, 200000.0}, {0.0, 100000.0, 100000.0}};
    const Trace mix = snm_trace_from_shots(pair, 3, 100000, 11);
    double c1 = 0.0, c2 = 0.0;
    for (const Request& r : mix.requests) {
        if (r.file == 1) c1 += 1.0;
        if (r.file == 2) c2 += 1.0;
    }
    const double p = 2.0 / 3.0;
    const double sd = std::sqrt(p * (1.0 - p) * 100000.0);
    CHECK(std::abs(c1 - p * 100000.0) <= 4.0 * sd);
    CHECK(c1 + c2 == 100000.0);
}

TEST_CASE("shot noise generator is deterministic with a fixed catalog") {
    const Trace a = gen_snm(30, 5000, 0.05, DistSpec::parse("pareto:2:10"), DistSpec::parse("fixed:50"), 13);
    const Trace b = gen_snm(30, 5000, 0.05, DistSpec::parse("pareto:2:10"), DistSpec::parse("fixed:50"), 13);
    CHECK(same_requests(a, b));
    CHECK(a.n_files == 30);
    a.validate();
    for (const Request& r : a.requests) CHECK(r.file < 30);
}

TEST_CASE("distribution specs parse and sample in range") {
    Rng rng(1);
    const DistSpec f = DistSpec::parse("fixed:3.5");
    CHECK(f.sample(rng) == 3.5);
    const DistSpec u = DistSpec::parse("uniform:2:4");
    for (int i = 0; i < 100; ++i) {
        const double v = u.sample(rng);
        CHECK(v >= 2.0);
        CHECK(v <= 4.0);
    }
    const DistSpec p = DistSpec::parse("pareto:2:10");
    for (int i = 0; i < 100; ++i) CHECK(p.sample(rng) >= 10.0);
    CHECK(DistSpec::parse(p.str()).b == 10.0);
    CHECK_THROWS_AS(DistSpec::parse("triangle:1:2"), std::invalid_argument);
    CHECK_THROWS_AS(DistSpec::parse("pareto:0:1"), std::invalid_argument);
}

TEST_CASE("random replacement with no churn matches the plain zipf draw") {
    const Trace a = gen_random_replacement(40, 3000, 0.8, 0.0, 21);
    const Trace z = gen_zipf_iid(40, 3000, 0.8, 21);
    CHECK(same_requests(a, z));
    CHECK(a.n_files == 40);
}

TEST_CASE("random replacement churn grows the catalog") {
    const Trace a = gen_random_replacement(2, 1000, 0.8, 1.0, 5);
    CHECK(a.n_files == 2 + 1000);  // one replacement per slot
    a.validate();
    const Trace b = gen_random_replacement(2, 1000, 0.8, 1.0, 5);
    CHECK(same_requests(a, b));

    const Trace mild = gen_random_replacement(30, 2000, 0.8, 0.01, 5);
    CHECK(mild.n_files >= 30);
    CHECK(mild.n_files < 30 + 2000);
    mild.validate();
}

TEST_CASE("save and load round trip") {
    const auto path = temp_file("oncache_rt.csv");
    const Trace a = gen_zipf_iid(25, 500, 0.7, 3);
    save_trace(a, path.string());
    const Trace b = load_trace(path.string());
    CHECK(same_requests(a, b));
    CHECK(b.n_files == a.n_files);
    CHECK(b.n_locations == a.n_locations);

    // A second round trip neither mangles data nor piles up banners.
    save_trace(b, path.string());
    const Trace c = load_trace(path.string());
    CHECK(same_requests(a, c));
    CHECK(c.provenance == b.provenance);

    const auto located = temp_file("oncache_rt_loc.csv");
    const Trace d = gen_zipf_iid(25, 500, 0.7, 3, 3);
    save_trace(d, located.string());
    const Trace e = load_trace(located.string());
    CHECK(same_requests(d, e));
    CHECK(e.n_locations == 3);

    std::filesystem::remove(path);
    std::filesystem::remove(located);
}

TEST_CASE("loader renumbers gappy slots and remaps sparse ids") {
    const auto path = temp_file("oncache_gappy.csv");
    write_file(path, "slot,file\n0,5\n2,900\n7,5\n");
    const Trace tr = load_trace(path.string());
    REQUIRE(tr.horizon() == 3);
    CHECK(tr.requests[0].slot == 0);
    CHECK(tr.requests[1].slot == 1);
    CHECK(tr.requests[2].slot == 2);
    CHECK(tr.requests[0].file == 0);
    CHECK(tr.requests[1].file == 1);
    CHECK(tr.requests[2].file == 0);
    CHECK(tr.n_files == 2);
    REQUIRE(tr.external_ids.size() == 2);
    CHECK(tr.external_ids[0] == 5);
    CHECK(tr.external_ids[1] == 900);
    bool noted_slots = false, noted_ids = false;
    for (const std::string& p : tr.provenance) {
        if (p.find("renumbered") != std::string::npos) noted_slots = true;
        if (p.find("remapped") != std::string::npos) noted_ids = true;
    }
    CHECK(noted_slots);
    CHECK(noted_ids);
    std::filesystem::remove(path);
}

TEST_CASE("loader keeps declared in-range ids as they are") {
    const auto path = temp_file("oncache_declared.csv");
    write_file(path, "# n_files=10 n_locations=0 horizon=3\nslot,file\n0,7\n1,2\n2,7\n");
    const Trace tr = load_trace(path.string());
    CHECK(tr.n_files == 10);
    CHECK(tr.requests[0].file == 7);
    CHECK(tr.external_ids.empty());
    std::filesystem::remove(path);
}

TEST_CASE("loader rejects malformed inputs") {
    const auto path = temp_file("oncache_bad.csv");

    CHECK_THROWS_AS(load_trace("/nonexistent/place/x.csv"), std::runtime_error);

    write_file(path, "slot,file\n0,1\n0,2\n");
    CHECK_THROWS_WITH_AS(load_trace(path.string()),
                         doctest::Contains("duplicate slot"), std::runtime_error);

    write_file(path, "slot,file\n1,1\n0,2\n");
    CHECK_THROWS_WITH_AS(load_trace(path.string()),
                         doctest::Contains("strictly increasing"), std::runtime_error);

    write_file(path, "slot,file\n0,-3\n");
    CHECK_THROWS_WITH_AS(load_trace(path.string()),
                         doctest::Contains("negative file"), std::runtime_error);

    write_file(path, "slot,file\n0,1,2\n");
    CHECK_THROWS_WITH_AS(load_trace(path.string()),
                         doctest::Contains("malformed row"), std::runtime_error);

    write_file(path, "time,file\n0,1\n");
    CHECK_THROWS_WITH_AS(load_trace(path.string()),
                         doctest::Contains("expected header"), std::runtime_error);

    write_file(path, "slot,file\n");
    CHECK_THROWS_WITH_AS(load_trace(path.string()),
                         doctest::Contains("no rows"), std::runtime_error);

    write_file(path, "slot,file\n0,zebra\n");
    CHECK_THROWS_AS(load_trace(path.string()), std::runtime_error);

    std::filesystem::remove(path);
}
