#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oncache/core.hpp"
#include "oncache/rng.hpp"

namespace oncache {

// Request sequence plus catalog metadata. Slots are consecutive from 0.
struct Trace {
    std::vector<Request> requests;
    std::size_t n_files = 0;
    std::size_t n_locations = 0;  // 0 when the trace has no location column
    std::vector<std::string> provenance;
    // Dense index -> original id, populated when loading remapped a file.
    std::vector<std::int64_t> external_ids;

    std::size_t horizon() const { return requests.size(); }
    bool has_locations() const { return n_locations > 0; }
    void validate() const;
};

// Sampling spec for shot durations and volumes: fixed value, uniform range,
// or Pareto with shape and scale. Parsed from "fixed:V", "uniform:A:B",
// "pareto:SHAPE:SCALE".
struct DistSpec {
    enum class Kind { Fixed, Uniform, Pareto };
    Kind kind = Kind::Fixed;
    double a = 1.0;
    double b = 1.0;

    double sample(Rng& rng) const;
    static DistSpec parse(const std::string& text);
    std::string str() const;
};

struct Shot {
    double start = 0.0;
    double duration = 1.0;
    double volume = 1.0;
};

// Independent Zipf draws: P(file = n) proportional to (n+1)^-exponent.
Trace gen_zipf_iid(std::size_t n_files, std::size_t horizon, double exponent, std::uint64_t seed,
                   std::size_t n_locations = 0);

// Cyclic worst case for cache size C: slot t requests file t mod (C+1).
Trace gen_periodic_adversarial(std::int64_t cache_size, std::size_t horizon, std::int64_t n_files = 0,
                               std::size_t n_locations = 0, std::uint64_t seed = 0);

// Shot-noise requests: shots arrive as a Poisson process, each active over
// [start, start+duration) with request intensity volume/duration. File 0 is
// a background file requested on slots with no active shot (optional).
Trace gen_snm(std::size_t n_files, std::size_t horizon, double shot_rate, const DistSpec& duration,
              const DistSpec& volume, std::uint64_t seed, bool background = true,
              std::size_t n_locations = 0);

// Same request law but over a caller-supplied shot list (kept separate so
// degenerate shot patterns can be tested exactly).
Trace snm_trace_from_shots(const std::vector<Shot>& shots, std::size_t n_files, std::size_t horizon,
                           std::uint64_t seed, bool background = true, std::size_t n_locations = 0);

// Zipf over a ladder of popularity ranks whose occupants churn: each slot,
// with probability churn_prob a uniformly chosen rank is reassigned to a
// brand-new file id, then the request is drawn. The catalog grows with each
// replacement; n_files is the initial size.
Trace gen_random_replacement(std::size_t n_files, std::size_t horizon, double exponent,
                             double churn_prob, std::uint64_t seed, std::size_t n_locations = 0);

Trace load_trace(const std::string& path);
void save_trace(const Trace& trace, const std::string& path);

}  // namespace oncache
