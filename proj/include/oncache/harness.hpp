#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "oncache/bipartite.hpp"
#include "oncache/core.hpp"
#include "oncache/traces.hpp"

namespace oncache {

// One policy entry like "oga", "oga:eta=0.05", "lazy_qlru:q=0.2".
struct PolicySpec {
    std::string name;
    std::vector<std::pair<std::string, std::string>> params;

    static PolicySpec parse(const std::string& text);
    std::string param(const std::string& key, const std::string& fallback) const;
    std::string str() const;
};

// Full description of one experiment. Mirrors the CLI flags; the CSV output
// is a pure function of this struct, so equal configs give equal bytes.
struct ExperimentConfig {
    std::string mode = "single";  // single | bipartite

    // Trace source: a file, or a generator with the parameters below.
    std::string trace_path;
    std::string generator;  // zipf | uniform | periodic | snm | random_replacement
    std::size_t n_files = 0;
    std::size_t horizon = 0;
    std::size_t locations = 0;
    double zipf_s = 0.8;
    double churn = 1e-3;
    double shot_rate = 0.1;
    std::string shot_duration = "pareto:2:10";
    std::string shot_volume = "fixed:50";
    bool snm_background = true;

    std::uint64_t seed = 0;
    std::vector<std::string> policies;

    double capacity = 0.0;      // single mode
    std::string weights_path;   // optional per-file weights, one per line
    std::string network_path;   // bipartite mode
    std::string eta = "auto";   // auto | diminishing | <number>
    double q = 1.0;             // lazy_qlru insertion probability default
    std::size_t hindsight_epochs = 50;

    std::string out;

    void validate() const;
    std::string canonical() const;
    std::uint64_t config_hash() const;
};

struct RunArtifacts {
    std::vector<std::string> policy_names;
    std::vector<std::vector<double>> utilities;  // per policy, per slot
    std::vector<double> hindsight_per_slot;
    double hindsight_total = 0.0;
    // Final states needed by the diagnostics command; empty when the
    // corresponding policy was not part of the run.
    std::vector<double> oga_fractions;
    std::vector<std::int32_t> lru_contents;
};

std::uint64_t fnv1a64(std::string_view text);

// Loads weights from a text file, one positive number per line.
std::vector<double> load_weights(const std::string& path, std::size_t n_files);

// Builds the trace the config describes, either by loading or generating.
Trace make_trace(const ExperimentConfig& cfg);

RunArtifacts run_experiment(const ExperimentConfig& cfg, const Trace& trace);

void write_results_csv(const std::string& path, const ExperimentConfig& cfg,
                       const RunArtifacts& run);

// Rows of the diagnostics table: files currently in the LRU cache from most
// to least recent, each with the gradient policy's fraction for it.
struct InspectRow {
    std::int64_t rank = 0;
    std::int64_t file = 0;
    double oga_fraction = 0.0;
};

std::vector<InspectRow> inspect_rows(const Trace& trace, const RunArtifacts& run);
void write_inspect_csv(const std::string& path, const ExperimentConfig& cfg,
                       const std::vector<InspectRow>& rows);

}  // namespace oncache
