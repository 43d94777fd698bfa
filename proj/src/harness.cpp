#include "oncache/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "oncache/policies.hpp"

namespace oncache {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double_strict(const std::string& text, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + " is not a number: " + text);
    }
    if (pos != text.size()) throw std::invalid_argument(what + " is not a number: " + text);
    return v;
}

StepSchedule schedule_from_text(const std::string& text, std::size_t horizon) {
    if (text == "auto") return StepSchedule::horizon_optimal(horizon);
    if (text == "diminishing") return StepSchedule::diminishing();
    return StepSchedule::fixed(parse_double_strict(text, "step size"));
}

}  // namespace

PolicySpec PolicySpec::parse(const std::string& text) {
    PolicySpec spec;
    const auto colon = text.find(':');
    spec.name = text.substr(0, colon);
    if (spec.name.empty()) throw std::invalid_argument("empty policy name");
    if (colon == std::string::npos) return spec;
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ';')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("policy parameter must look like key=value: " + item);
        spec.params.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return spec;
}

std::string PolicySpec::param(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    return fallback;
}

std::string PolicySpec::str() const {
    std::string out = name;
    for (std::size_t i = 0; i < params.size(); ++i) {
        out += i == 0 ? ":" : ";";
        out += params[i].first + "=" + params[i].second;
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (mode != "single" && mode != "bipartite")
        throw std::invalid_argument("mode must be single or bipartite");
    if (policies.empty()) throw std::invalid_argument("policy list is empty");
    if (trace_path.empty()) {
        if (generator.empty()) throw std::invalid_argument("need a trace file or a generator");
        if (horizon == 0) throw std::invalid_argument("generated traces need a positive horizon");
    } else if (!generator.empty()) {
        throw std::invalid_argument("give either a trace file or a generator, not both");
    }
    std::set<std::string> seen;
    for (const std::string& p : policies) {
        const PolicySpec spec = PolicySpec::parse(p);
        if (!seen.insert(spec.str()).second)
            throw std::invalid_argument("duplicate policy entry: " + spec.str());
        const bool single_policy = spec.name == "oga" || spec.name == "lru" || spec.name == "lfu";
        const bool network_policy = spec.name == "bsa" || spec.name == "mlru" || spec.name == "lazy_qlru";
        if (!single_policy && !network_policy) throw std::invalid_argument("unknown policy: " + spec.name);
        if (mode == "single" && !single_policy)
            throw std::invalid_argument("policy " + spec.name + " needs bipartite mode");
        if (mode == "bipartite" && !network_policy)
            throw std::invalid_argument("policy " + spec.name + " needs single mode");
    }
    if (mode == "single" && !(capacity > 0.0))
        throw std::invalid_argument("single mode needs a positive capacity");
    if (mode == "bipartite" && network_path.empty())
        throw std::invalid_argument("bipartite mode needs a network file");
}

std::string ExperimentConfig::canonical() const {
    std::string s;
    s += "mode=" + mode + "\n";
    s += "trace=" + trace_path + "\n";
    s += "generator=" + generator + "\n";
    s += "n=" + std::to_string(n_files) + "\n";
    s += "t=" + std::to_string(horizon) + "\n";
    s += "locations=" + std::to_string(locations) + "\n";
    s += "s=" + fmt_double(zipf_s) + "\n";
    s += "churn=" + fmt_double(churn) + "\n";
    s += "rate=" + fmt_double(shot_rate) + "\n";
    s += "duration=" + shot_duration + "\n";
    s += "volume=" + shot_volume + "\n";
    s += "background=" + std::to_string(snm_background ? 1 : 0) + "\n";
    s += "seed=" + std::to_string(seed) + "\n";
    for (const std::string& p : policies) s += "policy=" + PolicySpec::parse(p).str() + "\n";
    s += "capacity=" + fmt_double(capacity) + "\n";
    s += "weights=" + weights_path + "\n";
    s += "network=" + network_path + "\n";
    s += "eta=" + eta + "\n";
    s += "q=" + fmt_double(q) + "\n";
    s += "hindsight_epochs=" + std::to_string(hindsight_epochs) + "\n";
    return s;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t ExperimentConfig::config_hash() const { return fnv1a64(canonical()); }

std::vector<double> load_weights(const std::string& path, std::size_t n_files) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open weights file: " + path);
    std::vector<double> w;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        double v = 0.0;
        try {
            v = parse_double_strict(line, "weight");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad weight: " + line);
        }
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": weights must be positive");
        w.push_back(v);
    }
    if (n_files == 0) {
        if (w.empty()) throw std::runtime_error(path + ": no weights found");
        return w;
    }
    if (w.size() < n_files)
        throw std::runtime_error(path + ": has " + std::to_string(w.size()) + " weights, trace needs " +
                                 std::to_string(n_files));
    w.resize(n_files);
    return w;
}

Trace make_trace(const ExperimentConfig& cfg) {
    if (!cfg.trace_path.empty()) {
        Trace tr = load_trace(cfg.trace_path);
        if (cfg.horizon != 0 && cfg.horizon != tr.horizon())
            throw std::invalid_argument("configured horizon " + std::to_string(cfg.horizon) +
                                        " does not match trace length " + std::to_string(tr.horizon()));
        return tr;
    }
    if (cfg.generator == "zipf")
        return gen_zipf_iid(cfg.n_files, cfg.horizon, cfg.zipf_s, cfg.seed, cfg.locations);
    if (cfg.generator == "uniform")
        return gen_zipf_iid(cfg.n_files, cfg.horizon, 0.0, cfg.seed, cfg.locations);
    if (cfg.generator == "periodic") {
        std::int64_t c = static_cast<std::int64_t>(std::floor(cfg.capacity));
        if (c < 1) throw std::invalid_argument("periodic generator needs a cache size of at least 1");
        return gen_periodic_adversarial(c, cfg.horizon, static_cast<std::int64_t>(cfg.n_files),
                                        cfg.locations, cfg.seed);
    }
    if (cfg.generator == "snm")
        return gen_snm(cfg.n_files, cfg.horizon, cfg.shot_rate, DistSpec::parse(cfg.shot_duration),
                       DistSpec::parse(cfg.shot_volume), cfg.seed, cfg.snm_background, cfg.locations);
    if (cfg.generator == "random_replacement")
        return gen_random_replacement(cfg.n_files, cfg.horizon, cfg.zipf_s, cfg.churn, cfg.seed,
                                      cfg.locations);
    throw std::invalid_argument("unknown generator: " + cfg.generator);
}

RunArtifacts run_experiment(const ExperimentConfig& cfg, const Trace& trace) {
    cfg.validate();
    trace.validate();
    if (trace.requests.empty()) throw std::invalid_argument("trace is empty");

    RunArtifacts out;
    const std::size_t n = trace.n_files;

    if (cfg.mode == "single") {
        Catalog catalog = cfg.weights_path.empty() ? Catalog::uniform(n)
                                                   : Catalog{n, load_weights(cfg.weights_path, n)};
        catalog.validate();
        for (const std::string& ptext : cfg.policies) {
            const PolicySpec spec = PolicySpec::parse(ptext);
            out.policy_names.push_back(spec.str());
            std::vector<double> series;
            series.reserve(trace.horizon());
            if (spec.name == "oga") {
                const StepSchedule sched =
                    schedule_from_text(spec.param("eta", cfg.eta), trace.horizon());
                OgaPolicy p(catalog, cfg.capacity, sched);
                for (const Request& r : trace.requests) series.push_back(p.step(r));
                if (out.oga_fractions.empty()) out.oga_fractions = p.fractions();
            } else if (spec.name == "lru") {
                LruPolicy p(catalog, cfg.capacity);
                for (const Request& r : trace.requests) series.push_back(p.step(r));
                if (out.lru_contents.empty()) out.lru_contents = p.contents();
            } else {
                LfuPolicy p(catalog, cfg.capacity);
                for (const Request& r : trace.requests) series.push_back(p.step(r));
            }
            out.utilities.push_back(std::move(series));
        }
        const HindsightResult hs = hindsight_best_static(trace, catalog, cfg.capacity);
        out.hindsight_per_slot = hs.per_slot;
        out.hindsight_total = hs.total_utility;
        return out;
    }

    const BipartiteNetwork net = BipartiteNetwork::from_json_file(cfg.network_path);
    if (net.n_locations > 1 && !trace.has_locations())
        throw std::invalid_argument("network has several locations but the trace has none");
    if (trace.n_locations > net.n_locations)
        throw std::invalid_argument("trace uses more locations than the network has");
    if (!net.file_multipliers.empty() && net.file_multipliers.size() < n)
        throw std::invalid_argument("network file multipliers do not cover the trace catalog");

    std::size_t index = 0;
    for (const std::string& ptext : cfg.policies) {
        const PolicySpec spec = PolicySpec::parse(ptext);
        out.policy_names.push_back(spec.str());
        std::vector<double> series;
        series.reserve(trace.horizon());
        const std::uint64_t pseed = mix_seed(cfg.seed, 100 + index);
        if (spec.name == "bsa") {
            const std::string etext = spec.param("eta", cfg.eta);
            const double eta = etext == "auto" ? bsa_horizon_step(net, n, trace.horizon())
                                               : parse_double_strict(etext, "step size");
            BsaPolicy p(net, n, eta);
            for (const Request& r : trace.requests) series.push_back(p.step(r));
        } else if (spec.name == "mlru") {
            MlruPolicy p(net, n, pseed);
            for (const Request& r : trace.requests) series.push_back(p.step(r));
        } else {
            const double qv = parse_double_strict(spec.param("q", fmt_double(cfg.q)), "q");
            LazyQLruPolicy p(net, n, qv, pseed);
            for (const Request& r : trace.requests) series.push_back(p.step(r));
        }
        out.utilities.push_back(std::move(series));
        ++index;
    }
    const HindsightNetworkResult hs = hindsight_best_static_network(trace, net, cfg.hindsight_epochs);
    out.hindsight_per_slot = hs.per_slot;
    out.hindsight_total = hs.total_utility;
    return out;
}

void write_results_csv(const std::string& path, const ExperimentConfig& cfg,
                       const RunArtifacts& run) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot write results file: " + path);
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.config_hash()));
    outf << "# oncache results v" << kVersion << "\n";
    outf << "# config_hash=" << hash << " seed=" << cfg.seed << "\n";
    outf << "# hindsight_total=" << fmt_double(run.hindsight_total) << "\n";
    outf << "slot,policy,cum_utility,avg_utility,cum_regret\n";

    std::vector<double> hind_cum(run.hindsight_per_slot.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < run.hindsight_per_slot.size(); ++t) {
        acc += run.hindsight_per_slot[t];
        hind_cum[t] = acc;
    }
    for (std::size_t p = 0; p < run.policy_names.size(); ++p) {
        double cum = 0.0;
        for (std::size_t t = 0; t < run.utilities[p].size(); ++t) {
            cum += run.utilities[p][t];
            outf << t << ',' << run.policy_names[p] << ',' << fmt_double(cum) << ','
                 << fmt_double(cum / static_cast<double>(t + 1)) << ','
                 << fmt_double(hind_cum[t] - cum) << "\n";
        }
    }
    if (!outf) throw std::runtime_error("failed while writing results file: " + path);
}

std::vector<InspectRow> inspect_rows(const Trace& trace, const RunArtifacts& run) {
    bool has_oga = false;
    bool has_lru = false;
    for (const std::string& name : run.policy_names) {
        if (name.rfind("oga", 0) == 0) has_oga = true;
        if (name.rfind("lru", 0) == 0) has_lru = true;
    }
    if (!has_oga || !has_lru)
        throw std::invalid_argument("diagnostics need both oga and lru in the policy list");
    std::vector<InspectRow> rows;
    rows.reserve(run.lru_contents.size());
    std::int64_t rank = 0;
    for (std::int32_t f : run.lru_contents) {
        InspectRow row;
        row.rank = rank++;
        row.file = trace.external_ids.empty() ? f : trace.external_ids[static_cast<std::size_t>(f)];
        row.oga_fraction = run.oga_fractions[static_cast<std::size_t>(f)];
        rows.push_back(row);
    }
    return rows;
}

void write_inspect_csv(const std::string& path, const ExperimentConfig& cfg,
                       const std::vector<InspectRow>& rows) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot write diagnostics file: " + path);
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.config_hash()));
    outf << "# oncache inspect v" << kVersion << "\n";
    outf << "# config_hash=" << hash << " seed=" << cfg.seed << "\n";
    outf << "rank,file,oga_y\n";
    for (const InspectRow& r : rows)
        outf << r.rank << ',' << r.file << ',' << fmt_double(r.oga_fraction) << "\n";
    if (!outf) throw std::runtime_error("failed while writing diagnostics file: " + path);
}

}  // namespace oncache
