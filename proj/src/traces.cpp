#include "oncache/traces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace oncache {

namespace {

std::string format_params(const std::string& s) { return s; }

// Cumulative-weight sampler over ranks 0..n-1 with weight (rank+1)^-exponent.
struct ZipfSampler {
    std::vector<double> cumulative;

    ZipfSampler(std::size_t n, double exponent) {
        if (n == 0) throw std::invalid_argument("zipf: empty catalog");
        cumulative.resize(n);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += std::pow(static_cast<double>(k + 1), -exponent);
            cumulative[k] = acc;
        }
    }

    std::size_t sample(Rng& rng) const {
        const double u = rng.uniform01() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
    }
};

std::int32_t draw_location(Rng& rng, std::size_t n_locations) {
    return static_cast<std::int32_t>(rng.uniform_below(n_locations));
}

}  // namespace

void Trace::validate() const {
    for (std::size_t t = 0; t < requests.size(); ++t) {
        const Request& r = requests[t];
        if (r.slot != static_cast<std::int64_t>(t)) throw std::invalid_argument("trace: slots must be consecutive from 0");
        if (r.file < 0 || static_cast<std::size_t>(r.file) >= n_files)
            throw std::invalid_argument("trace: file index out of range");
        if (n_locations == 0) {
            if (r.location != -1) throw std::invalid_argument("trace: unexpected location");
        } else if (r.location < 0 || static_cast<std::size_t>(r.location) >= n_locations) {
            throw std::invalid_argument("trace: location index out of range");
        }
    }
}

double DistSpec::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Fixed: return a;
        case Kind::Uniform: return a + (b - a) * rng.uniform01();
        case Kind::Pareto: return rng.pareto(a, b);
    }
    return a;
}

DistSpec DistSpec::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw std::invalid_argument("distribution: empty spec");
    DistSpec d;
    try {
        if (parts[0] == "fixed" && parts.size() == 2) {
            d.kind = Kind::Fixed;
            d.a = std::stod(parts[1]);
        } else if (parts[0] == "uniform" && parts.size() == 3) {
            d.kind = Kind::Uniform;
            d.a = std::stod(parts[1]);
            d.b = std::stod(parts[2]);
        } else if (parts[0] == "pareto" && parts.size() == 3) {
            d.kind = Kind::Pareto;
            d.a = std::stod(parts[1]);
            d.b = std::stod(parts[2]);
        } else {
            throw std::invalid_argument("distribution: expected fixed:V, uniform:A:B or pareto:SHAPE:SCALE");
        }
    } catch (const std::logic_error&) {
        throw std::invalid_argument("distribution: bad numeric field in '" + text + "'");
    }
    if (d.kind == Kind::Uniform && d.b < d.a) throw std::invalid_argument("distribution: uniform range reversed");
    if (d.kind == Kind::Pareto && (d.a <= 0.0 || d.b <= 0.0))
        throw std::invalid_argument("distribution: pareto needs positive shape and scale");
    return d;
}

std::string DistSpec::str() const {
    char buf[64];
    switch (kind) {
        case Kind::Fixed: std::snprintf(buf, sizeof buf, "fixed:%g", a); break;
        case Kind::Uniform: std::snprintf(buf, sizeof buf, "uniform:%g:%g", a, b); break;
        case Kind::Pareto: std::snprintf(buf, sizeof buf, "pareto:%g:%g", a, b); break;
    }
    return buf;
}

Trace gen_zipf_iid(std::size_t n_files, std::size_t horizon, double exponent, std::uint64_t seed,
                   std::size_t n_locations) {
    if (n_files == 0 || horizon == 0) throw std::invalid_argument("zipf: need files and a positive horizon");
    if (exponent < 0.0) throw std::invalid_argument("zipf: exponent must be nonnegative");
    Trace trace;
    trace.n_files = n_files;
    trace.n_locations = n_locations;
    trace.requests.reserve(horizon);
    ZipfSampler sampler(n_files, exponent);
    Rng rng(seed);
    for (std::size_t t = 0; t < horizon; ++t) {
        Request r;
        r.slot = static_cast<std::int64_t>(t);
        r.file = static_cast<std::int32_t>(sampler.sample(rng));
        if (n_locations > 0) r.location = draw_location(rng, n_locations);
        trace.requests.push_back(r);
    }
    std::ostringstream p;
    p << "generator=zipf n=" << n_files << " t=" << horizon << " s=" << exponent << " seed=" << seed
      << " locations=" << n_locations;
    trace.provenance.push_back(format_params(p.str()));
    return trace;
}

Trace gen_periodic_adversarial(std::int64_t cache_size, std::size_t horizon, std::int64_t n_files,
                               std::size_t n_locations, std::uint64_t seed) {
    if (cache_size < 1) throw std::invalid_argument("periodic: cache size must be at least 1");
    if (horizon == 0) throw std::invalid_argument("periodic: positive horizon required");
    const std::int64_t cycle = cache_size + 1;
    if (n_files == 0) n_files = cycle;
    if (n_files < cycle) throw std::invalid_argument("periodic: catalog must cover cache size + 1 files");
    Trace trace;
    trace.n_files = static_cast<std::size_t>(n_files);
    trace.n_locations = n_locations;
    trace.requests.reserve(horizon);
    Rng rng(seed);
    for (std::size_t t = 0; t < horizon; ++t) {
        Request r;
        r.slot = static_cast<std::int64_t>(t);
        r.file = static_cast<std::int32_t>(static_cast<std::int64_t>(t) % cycle);
        if (n_locations > 0) r.location = draw_location(rng, n_locations);
        trace.requests.push_back(r);
    }
    std::ostringstream p;
    p << "generator=periodic c=" << cache_size << " t=" << horizon << " n=" << n_files
      << " locations=" << n_locations;
    if (n_locations > 0) p << " seed=" << seed;
    trace.provenance.push_back(p.str());
    return trace;
}

Trace snm_trace_from_shots(const std::vector<Shot>& shots, std::size_t n_files, std::size_t horizon,
                           std::uint64_t seed, bool background, std::size_t n_locations) {
    if (horizon == 0) throw std::invalid_argument("snm: positive horizon required");
    for (const Shot& s : shots) {
        if (!(s.duration > 0.0) || !(s.volume > 0.0))
            throw std::invalid_argument("snm: shots need positive duration and volume");
    }
    const std::size_t first_id = background ? 1 : 0;
    std::size_t catalog = std::max(n_files, first_id + shots.size());
    if (catalog == 0) catalog = 1;

    // Shots sorted by start; an index pointer admits them to the active set
    // as slots advance, expiry is checked per slot.
    std::vector<std::size_t> order(shots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return shots[a].start < shots[b].start; });

    Trace trace;
    trace.n_files = catalog;
    trace.n_locations = n_locations;
    trace.requests.reserve(horizon);
    Rng rng(seed);
    std::vector<std::size_t> active;
    std::size_t next = 0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const double now = static_cast<double>(t);
        while (next < order.size() && shots[order[next]].start <= now) {
            active.push_back(order[next]);
            ++next;
        }
        std::size_t kept = 0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const Shot& s = shots[active[k]];
            if (s.start + s.duration > now) active[kept++] = active[k];
        }
        active.resize(kept);

        std::int32_t file;
        if (active.empty()) {
            if (!background) throw std::invalid_argument("snm: no active shot and no background file");
            file = 0;
        } else {
            double total = 0.0;
            for (std::size_t s : active) total += shots[s].volume / shots[s].duration;
            const double u = rng.uniform01() * total;
            double acc = 0.0;
            std::size_t chosen = active.back();
            for (std::size_t s : active) {
                acc += shots[s].volume / shots[s].duration;
                if (u < acc) {
                    chosen = s;
                    break;
                }
            }
            file = static_cast<std::int32_t>(first_id + chosen);
        }
        Request r;
        r.slot = static_cast<std::int64_t>(t);
        r.file = file;
        if (n_locations > 0) r.location = draw_location(rng, n_locations);
        trace.requests.push_back(r);
    }
    std::ostringstream p;
    p << "generator=snm shots=" << shots.size() << " n=" << catalog << " t=" << horizon
      << " seed=" << seed << " background=" << (background ? 1 : 0) << " locations=" << n_locations;
    trace.provenance.push_back(p.str());
    return trace;
}

Trace gen_snm(std::size_t n_files, std::size_t horizon, double shot_rate, const DistSpec& duration,
              const DistSpec& volume, std::uint64_t seed, bool background, std::size_t n_locations) {
    if (!(shot_rate > 0.0)) throw std::invalid_argument("snm: shot rate must be positive");
    if (n_files == 0) throw std::invalid_argument("snm: need at least one file");
    // One shot per non-background file, in arrival order: file ids follow
    // the order the shots appear. Shots starting past the horizon leave
    // their file inert.
    const std::size_t n_shots = n_files - (background ? 1 : 0);
    Rng arrival_rng(mix_seed(seed, 0));
    std::vector<Shot> shots;
    shots.reserve(n_shots);
    double t = 0.0;
    for (std::size_t k = 0; k < n_shots; ++k) {
        t += arrival_rng.exponential(shot_rate);
        Shot s;
        s.start = t;
        s.duration = std::max(duration.sample(arrival_rng), 1.0);
        s.volume = std::max(volume.sample(arrival_rng), 1e-12);
        shots.push_back(s);
    }
    Trace trace = snm_trace_from_shots(shots, n_files, horizon, mix_seed(seed, 1), background, n_locations);
    std::ostringstream p;
    p << "generator=snm rate=" << shot_rate << " duration=" << duration.str() << " volume=" << volume.str()
      << " n=" << trace.n_files << " t=" << horizon << " seed=" << seed << " background=" << (background ? 1 : 0)
      << " locations=" << n_locations;
    trace.provenance.clear();
    trace.provenance.push_back(p.str());
    return trace;
}

Trace gen_random_replacement(std::size_t n_files, std::size_t horizon, double exponent, double churn_prob,
                             std::uint64_t seed, std::size_t n_locations) {
    if (n_files == 0 || horizon == 0) throw std::invalid_argument("random replacement: need files and a horizon");
    if (churn_prob < 0.0 || churn_prob > 1.0) throw std::invalid_argument("random replacement: churn must be in [0,1]");
    Trace trace;
    trace.n_locations = n_locations;
    trace.requests.reserve(horizon);
    ZipfSampler sampler(n_files, exponent);
    Rng rng(seed);
    std::vector<std::int32_t> ladder(n_files);
    for (std::size_t k = 0; k < n_files; ++k) ladder[k] = static_cast<std::int32_t>(k);
    std::size_t next_id = n_files;
    for (std::size_t t = 0; t < horizon; ++t) {
        if (churn_prob > 0.0 && rng.uniform01() < churn_prob) {
            const std::size_t rank = static_cast<std::size_t>(rng.uniform_below(n_files));
            ladder[rank] = static_cast<std::int32_t>(next_id++);
        }
        Request r;
        r.slot = static_cast<std::int64_t>(t);
        r.file = ladder[sampler.sample(rng)];
        if (n_locations > 0) r.location = draw_location(rng, n_locations);
        trace.requests.push_back(r);
    }
    trace.n_files = next_id;
    std::ostringstream p;
    p << "generator=random_replacement n0=" << n_files << " n=" << next_id << " t=" << horizon
      << " s=" << exponent << " churn=" << churn_prob << " seed=" << seed << " locations=" << n_locations;
    trace.provenance.push_back(p.str());
    return trace;
}

void save_trace(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_trace: cannot open " + path);
    out << "# oncache trace v" << kVersion << "\n";
    for (const std::string& line : trace.provenance) out << "# " << line << "\n";
    out << "# n_files=" << trace.n_files << " n_locations=" << trace.n_locations
        << " horizon=" << trace.horizon() << "\n";
    out << (trace.has_locations() ? "slot,file,location\n" : "slot,file\n");
    for (const Request& r : trace.requests) {
        out << r.slot << ',' << r.file;
        if (trace.has_locations()) out << ',' << r.location;
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_trace: write failed for " + path);
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_trace: cannot open " + path);
    Trace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool with_location = false;
    std::int64_t declared_files = -1;
    std::int64_t declared_locations = -1;
    std::int64_t prev_slot = -1;
    bool consecutive = true;
    std::vector<std::int64_t> raw_files;

    auto parse_error = [&](const std::string& what) {
        throw std::runtime_error("load_trace: " + what + " at " + path + ":" + std::to_string(line_no));
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body[0] == ' ') body = body.substr(1);
            if (body.rfind("oncache trace v", 0) == 0) continue;
            // Pull structured metadata out of the provenance block if present.
            std::stringstream ss(body);
            std::string tok;
            bool structured = false;
            while (ss >> tok) {
                if (tok.rfind("n_files=", 0) == 0) {
                    declared_files = std::stoll(tok.substr(8));
                    structured = true;
                } else if (tok.rfind("n_locations=", 0) == 0) {
                    declared_locations = std::stoll(tok.substr(12));
                    structured = true;
                }
            }
            if (!structured) trace.provenance.push_back(body);
            continue;
        }
        if (!header_seen) {
            if (line == "slot,file") {
                with_location = false;
            } else if (line == "slot,file,location") {
                with_location = true;
            } else {
                parse_error("expected header 'slot,file' or 'slot,file,location'");
            }
            header_seen = true;
            continue;
        }
        std::int64_t slot = 0, file = 0, loc = -1;
        {
            std::stringstream ss(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            const std::size_t expect = with_location ? 3 : 2;
            if (fields.size() != expect) parse_error("malformed row");
            try {
                slot = std::stoll(fields[0]);
                file = std::stoll(fields[1]);
                if (with_location) loc = std::stoll(fields[2]);
            } catch (const std::logic_error&) {
                parse_error("malformed row");
            }
        }
        if (slot == prev_slot) parse_error("duplicate slot index");
        if (slot < prev_slot) parse_error("slots must be strictly increasing");
        if (file < 0) parse_error("negative file id");
        if (with_location && loc < 0) parse_error("negative location");
        if (slot != prev_slot + 1) consecutive = false;
        prev_slot = slot;
        Request r;
        r.slot = slot;
        r.file = 0;  // assigned after densification decision
        r.location = static_cast<std::int32_t>(loc);
        trace.requests.push_back(r);
        raw_files.push_back(file);
    }
    if (!header_seen) {
        line_no = 0;
        parse_error("missing header");
    }
    if (trace.requests.empty()) {
        line_no = 0;
        parse_error("trace has no rows");
    }

    // Renumber slots when the file was strictly increasing but not dense.
    if (!consecutive || trace.requests.front().slot != 0) {
        for (std::size_t t = 0; t < trace.requests.size(); ++t)
            trace.requests[t].slot = static_cast<std::int64_t>(t);
        trace.provenance.push_back("slots renumbered to consecutive on load");
    }

    std::int64_t max_file = 0;
    for (std::int64_t f : raw_files) max_file = std::max(max_file, f);
    const bool in_range = declared_files > 0 && max_file < declared_files &&
                          declared_files <= std::numeric_limits<std::int32_t>::max();
    if (in_range) {
        trace.n_files = static_cast<std::size_t>(declared_files);
        for (std::size_t t = 0; t < raw_files.size(); ++t)
            trace.requests[t].file = static_cast<std::int32_t>(raw_files[t]);
    } else {
        std::unordered_map<std::int64_t, std::int32_t> dense;
        dense.reserve(raw_files.size());
        for (std::size_t t = 0; t < raw_files.size(); ++t) {
            auto [it, inserted] = dense.try_emplace(raw_files[t], static_cast<std::int32_t>(dense.size()));
            if (inserted) trace.external_ids.push_back(raw_files[t]);
            trace.requests[t].file = it->second;
        }
        trace.n_files = std::max<std::size_t>(dense.size(),
                                              declared_files > 0 ? static_cast<std::size_t>(declared_files) : 0);
        bool identity = true;
        for (std::size_t k = 0; k < trace.external_ids.size(); ++k)
            if (trace.external_ids[k] != static_cast<std::int64_t>(k)) identity = false;
        if (identity) {
            trace.external_ids.clear();
        } else {
            trace.provenance.push_back("remapped " + std::to_string(trace.external_ids.size()) +
                                       " external file ids to dense indices");
        }
    }

    if (with_location) {
        std::int64_t max_loc = 0;
        for (const Request& r : trace.requests) max_loc = std::max<std::int64_t>(max_loc, r.location);
        trace.n_locations = static_cast<std::size_t>(
            std::max<std::int64_t>(max_loc + 1, declared_locations > 0 ? declared_locations : 0));
    } else {
        trace.n_locations = 0;
    }
    trace.validate();
    return trace;
}

}  // namespace oncache
