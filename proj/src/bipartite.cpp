#include "oncache/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace oncache {

double BipartiteNetwork::weight(std::size_t file, std::size_t loc, std::size_t cache) const {
    const double base = base_weights[loc * n_caches + cache];
    if (file_multipliers.empty()) return base;
    return base * file_multipliers[file];
}

std::size_t BipartiteNetwork::max_right_degree() const {
    std::size_t deg = 0;
    for (std::size_t i = 0; i < n_locations; ++i) {
        std::size_t d = 0;
        for (std::size_t j = 0; j < n_caches; ++j)
            if (reachable(i, j)) ++d;
        deg = std::max(deg, d);
    }
    return deg;
}

double BipartiteNetwork::max_weight() const {
    double w = 0.0;
    for (std::size_t i = 0; i < n_locations; ++i)
        for (std::size_t j = 0; j < n_caches; ++j)
            if (reachable(i, j)) w = std::max(w, base_weight(i, j));
    if (!file_multipliers.empty()) {
        double m = 0.0;
        for (double v : file_multipliers) m = std::max(m, v);
        w *= m;
    }
    return w;
}

void BipartiteNetwork::validate() const {
    if (n_locations == 0) throw std::invalid_argument("network needs at least one location");
    if (n_caches == 0) throw std::invalid_argument("network needs at least one cache");
    if (capacities.size() != n_caches) throw std::invalid_argument("capacity count must match cache count");
    const std::size_t cells = n_locations * n_caches;
    if (reach.size() != cells) throw std::invalid_argument("connectivity size must be locations x caches");
    if (base_weights.size() != cells) throw std::invalid_argument("weight size must be locations x caches");
    for (double c : capacities)
        if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("capacities must be positive and finite");
    for (std::uint8_t r : reach)
        if (r > 1) throw std::invalid_argument("connectivity entries must be 0 or 1");
    for (double w : base_weights)
        if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("weights must be nonnegative and finite");
    for (double m : file_multipliers)
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("file multipliers must be positive and finite");
}

BipartiteNetwork BipartiteNetwork::single_cache(double capacity, const std::vector<double>& file_weights) {
    BipartiteNetwork net;
    net.n_locations = 1;
    net.n_caches = 1;
    net.capacities = {capacity};
    net.reach = {1};
    net.base_weights = {1.0};
    net.file_multipliers = file_weights;
    net.validate();
    return net;
}

BipartiteNetwork BipartiteNetwork::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open network file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("cannot parse network file " + path + ": " + e.what());
    }
    BipartiteNetwork net;
    try {
        net.n_locations = doc.at("locations").get<std::size_t>();
        net.n_caches = doc.at("caches").get<std::size_t>();
        net.capacities = doc.at("capacities").get<std::vector<double>>();
        const auto conn = doc.at("connectivity").get<std::vector<std::vector<int>>>();
        const auto wts = doc.at("weights").get<std::vector<std::vector<double>>>();
        if (conn.size() != net.n_locations || wts.size() != net.n_locations)
            throw std::runtime_error("connectivity/weights row count must equal locations");
        for (std::size_t i = 0; i < net.n_locations; ++i) {
            if (conn[i].size() != net.n_caches || wts[i].size() != net.n_caches)
                throw std::runtime_error("connectivity/weights column count must equal caches");
            for (std::size_t j = 0; j < net.n_caches; ++j) {
                if (conn[i][j] != 0 && conn[i][j] != 1)
                    throw std::runtime_error("connectivity entries must be 0 or 1");
                net.reach.push_back(static_cast<std::uint8_t>(conn[i][j]));
                net.base_weights.push_back(wts[i][j]);
            }
        }
        if (doc.contains("file_multipliers"))
            net.file_multipliers = doc.at("file_multipliers").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad network file " + path + ": " + e.what());
    }
    try {
        net.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("bad network file " + path + ": " + e.what());
    }
    return net;
}

void BipartiteNetwork::to_json_file(const std::string& path) const {
    nlohmann::json doc;
    doc["locations"] = n_locations;
    doc["caches"] = n_caches;
    doc["capacities"] = capacities;
    std::vector<std::vector<int>> conn(n_locations, std::vector<int>(n_caches));
    std::vector<std::vector<double>> wts(n_locations, std::vector<double>(n_caches));
    for (std::size_t i = 0; i < n_locations; ++i)
        for (std::size_t j = 0; j < n_caches; ++j) {
            conn[i][j] = reach[i * n_caches + j];
            wts[i][j] = base_weights[i * n_caches + j];
        }
    doc["connectivity"] = conn;
    doc["weights"] = wts;
    if (!file_multipliers.empty()) doc["file_multipliers"] = file_multipliers;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write network file: " + path);
    out << doc.dump(2) << "\n";
}

namespace {

std::size_t resolve_location(const BipartiteNetwork& net, const Request& req) {
    if (req.location < 0) {
        if (net.n_locations != 1)
            throw std::invalid_argument("request without location on a multi-location network");
        return 0;
    }
    const auto loc = static_cast<std::size_t>(req.location);
    if (loc >= net.n_locations) throw std::invalid_argument("request location outside network");
    return loc;
}

// Serve the unit request greedily from the highest-weight reachable caches.
// alpha is the weight of the first cache whose share was cut short by the
// budget; every cache with weight above alpha is fully used, so the greedy
// point is LP-optimal and alpha is the tightest marginal.
template <class YFn>
RoutingSolution route_impl(const BipartiteNetwork& net, const Request& req, YFn&& yval) {
    const std::size_t loc = resolve_location(net, req);
    RoutingSolution sol;
    sol.z.assign(net.n_caches, 0.0);

    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(net.n_caches);
    for (std::size_t j = 0; j < net.n_caches; ++j)
        if (net.reachable(loc, j)) order.emplace_back(net.weight(static_cast<std::size_t>(req.file), loc, j), j);
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    // No early exit: alpha is the weight of the first cache whose share got
    // cut short, which can sit after the cache where the budget ran out
    // exactly. Caches with nothing left to give settle at z = 0.
    double budget = 1.0;
    bool alpha_set = false;
    for (const auto& [w, j] : order) {
        const double y = yval(j);
        const double take = std::min(y, budget);
        sol.z[j] = take;
        sol.value += w * take;
        budget -= take;
        if (take < y && !alpha_set) {
            sol.alpha = w;
            alpha_set = true;
        }
    }
    sol.origin_share = budget;
    return sol;
}

}  // namespace

RoutingSolution route(const BipartiteNetwork& net, const std::vector<CappedColumn>& placement,
                      const Request& req) {
    if (placement.size() != net.n_caches) throw std::invalid_argument("placement size must match cache count");
    for (const CappedColumn& col : placement)
        if (req.file < 0 || static_cast<std::size_t>(req.file) >= col.values().size())
            throw std::invalid_argument("request file outside catalog");
    return route_impl(net, req, [&](std::size_t j) { return placement[j].value(req.file); });
}

RoutingSolution route_matrix(const BipartiteNetwork& net, const std::vector<double>& placement_flat,
                             std::size_t n_files, const Request& req) {
    if (placement_flat.size() != n_files * net.n_caches)
        throw std::invalid_argument("placement size must be files x caches");
    if (req.file < 0 || static_cast<std::size_t>(req.file) >= n_files)
        throw std::invalid_argument("request file outside catalog");
    const auto row = static_cast<std::size_t>(req.file) * net.n_caches;
    return route_impl(net, req, [&](std::size_t j) { return placement_flat[row + j]; });
}

std::vector<double> supergradient(const BipartiteNetwork& net, const RoutingSolution& sol,
                                  const Request& req) {
    const std::size_t loc = resolve_location(net, req);
    std::vector<double> g(net.n_caches, 0.0);
    for (std::size_t j = 0; j < net.n_caches; ++j) {
        if (!net.reachable(loc, j)) continue;
        const double w = net.weight(static_cast<std::size_t>(req.file), loc, j);
        g[j] = std::max(w - sol.alpha, 0.0);
    }
    return g;
}

double network_diameter(const BipartiteNetwork& net, std::size_t n_files) {
    double sq = 0.0;
    for (double c : net.capacities) {
        if (c > static_cast<double>(n_files))
            throw std::invalid_argument("cache capacity exceeds catalog size");
        sq += 2.0 * std::min(c, static_cast<double>(n_files) - c);
    }
    return std::sqrt(sq);
}

double bsa_horizon_step(const BipartiteNetwork& net, std::size_t n_files, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("horizon must be positive");
    const std::size_t deg = net.max_right_degree();
    if (deg == 0) throw std::invalid_argument("network has no reachable cache");
    const double lip = net.max_weight() * std::sqrt(static_cast<double>(deg));
    if (lip <= 0.0) throw std::invalid_argument("network weights are all zero");
    return network_diameter(net, n_files) / (lip * std::sqrt(static_cast<double>(horizon)));
}

BsaPolicy::BsaPolicy(const BipartiteNetwork& net, std::size_t n_files, double eta)
    : net_(net), n_files_(n_files), eta_(eta) {
    net_.validate();
    if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("step size must be positive and finite");
    if (!net_.file_multipliers.empty() && net_.file_multipliers.size() < n_files)
        throw std::invalid_argument("file multipliers do not cover the catalog");
    columns_.reserve(net_.n_caches);
    for (double c : net_.capacities) {
        if (c > static_cast<double>(n_files))
            throw std::invalid_argument("cache capacity exceeds catalog size");
        columns_.push_back(CappedColumn::uniform_fill(n_files, c));
    }
}

double BsaPolicy::step(const Request& req) {
    if (req.file < 0 || static_cast<std::size_t>(req.file) >= n_files_)
        throw std::invalid_argument("request file outside catalog");
    const RoutingSolution sol = route(net_, columns_, req);
    const std::vector<double> g = supergradient(net_, sol, req);
    for (std::size_t j = 0; j < net_.n_caches; ++j)
        if (g[j] > 0.0) columns_[j].bump_and_project(req.file, eta_ * g[j]);
    return sol.value;
}

void MlruPolicy::CacheList::touch(std::int32_t f) {
    order.splice(order.begin(), order, where.at(f));
}

void MlruPolicy::CacheList::insert(std::int32_t f) {
    if (order.size() >= cap) {
        where.erase(order.back());
        order.pop_back();
    }
    order.push_front(f);
    where[f] = order.begin();
}

MlruPolicy::MlruPolicy(const BipartiteNetwork& net, std::size_t n_files, std::uint64_t seed)
    : net_(net), n_files_(n_files), rng_(seed) {
    net_.validate();
    caches_.resize(net_.n_caches);
    for (std::size_t j = 0; j < net_.n_caches; ++j) {
        const auto cap = static_cast<std::size_t>(net_.capacities[j]);
        if (cap == 0) throw std::invalid_argument("list caches need capacity of at least one file");
        caches_[j].cap = cap;
    }
}

int MlruPolicy::serve(const Request& req, std::vector<std::size_t>& targets, double& utility) {
    if (req.file < 0 || static_cast<std::size_t>(req.file) >= n_files_)
        throw std::invalid_argument("request file outside catalog");
    const std::size_t loc = resolve_location(net_, req);
    targets.clear();
    utility = 0.0;
    int best = -1;
    double best_w = 0.0;
    for (std::size_t j = 0; j < net_.n_caches; ++j) {
        if (!net_.reachable(loc, j)) continue;
        targets.push_back(j);
        if (caches_[j].contains(req.file)) {
            const double w = net_.weight(static_cast<std::size_t>(req.file), loc, j);
            if (best < 0 || w > best_w) {
                best = static_cast<int>(j);
                best_w = w;
            }
        }
    }
    if (best >= 0) {
        utility = best_w;
        caches_[static_cast<std::size_t>(best)].touch(req.file);
    }
    return best;
}

double MlruPolicy::step(const Request& req) {
    std::vector<std::size_t> targets;
    double utility = 0.0;
    const int hit = serve(req, targets, utility);
    if (hit < 0 && !targets.empty()) {
        const std::size_t pick = targets[rng_.uniform_below(targets.size())];
        caches_[pick].insert(req.file);
    }
    return utility;
}

LazyQLruPolicy::LazyQLruPolicy(const BipartiteNetwork& net, std::size_t n_files, double q,
                               std::uint64_t seed)
    : MlruPolicy(net, n_files, seed), q_(q) {
    if (!(q > 0.0) || q > 1.0) throw std::invalid_argument("insertion probability must be in (0, 1]");
}

double LazyQLruPolicy::step(const Request& req) {
    std::vector<std::size_t> targets;
    double utility = 0.0;
    const int hit = serve(req, targets, utility);
    if (hit < 0 && !targets.empty()) {
        // At q = 1 the coin is skipped so the draw sequence, and therefore
        // the whole trajectory, matches the always-insert policy exactly.
        const bool admit = q_ >= 1.0 || rng_.uniform01() < q_;
        if (admit) {
            const std::size_t pick = targets[rng_.uniform_below(targets.size())];
            caches_[pick].insert(req.file);
        }
    }
    return utility;
}

namespace {

struct CompressedCounts {
    // Distinct (file, location) pairs with their request counts.
    std::vector<std::int32_t> files;
    std::vector<std::int32_t> locs;
    std::vector<double> counts;
    double total = 0.0;
};

CompressedCounts compress_trace(const Trace& trace, const BipartiteNetwork& net) {
    std::unordered_map<std::int64_t, double> acc;
    for (const Request& r : trace.requests) {
        const std::int64_t loc = r.location < 0 ? 0 : r.location;
        acc[static_cast<std::int64_t>(r.file) * static_cast<std::int64_t>(net.n_locations) + loc] += 1.0;
    }
    CompressedCounts cc;
    cc.files.reserve(acc.size());
    for (const auto& [key, c] : acc) {
        cc.files.push_back(static_cast<std::int32_t>(key / static_cast<std::int64_t>(net.n_locations)));
        cc.locs.push_back(static_cast<std::int32_t>(key % static_cast<std::int64_t>(net.n_locations)));
        cc.counts.push_back(c);
        cc.total += c;
    }
    return cc;
}

double evaluate_placement(const CompressedCounts& cc, const BipartiteNetwork& net,
                          const std::vector<double>& flat, std::size_t n_files) {
    double v = 0.0;
    for (std::size_t k = 0; k < cc.counts.size(); ++k) {
        Request r{0, cc.files[k], cc.locs[k]};
        v += cc.counts[k] * route_matrix(net, flat, n_files, r).value;
    }
    return v;
}

void project_columns(std::vector<double>& flat, const BipartiteNetwork& net, std::size_t n_files) {
    std::vector<double> col(n_files);
    for (std::size_t j = 0; j < net.n_caches; ++j) {
        for (std::size_t n = 0; n < n_files; ++n) col[n] = flat[n * net.n_caches + j];
        col = project_capped_simplex(col, net.capacities[j]);
        for (std::size_t n = 0; n < n_files; ++n) flat[n * net.n_caches + j] = col[n];
    }
}

}  // namespace

HindsightNetworkResult hindsight_best_static_network(const Trace& trace, const BipartiteNetwork& net,
                                                     std::size_t epochs) {
    net.validate();
    trace.validate();
    const auto n_files = static_cast<std::size_t>(trace.n_files);
    if (!net.file_multipliers.empty() && net.file_multipliers.size() < n_files)
        throw std::invalid_argument("file multipliers do not cover the trace catalog");
    for (double c : net.capacities)
        if (c > static_cast<double>(n_files))
            throw std::invalid_argument("cache capacity exceeds catalog size");

    const CompressedCounts cc = compress_trace(trace, net);
    const std::size_t cells = n_files * net.n_caches;

    std::vector<double> y(cells, 0.0);
    for (std::size_t j = 0; j < net.n_caches; ++j) {
        const double fill = std::min(net.capacities[j] / static_cast<double>(n_files), 1.0);
        for (std::size_t n = 0; n < n_files; ++n) y[n * net.n_caches + j] = fill;
    }

    const double diam = network_diameter(net, n_files);
    const std::size_t deg = std::max<std::size_t>(net.max_right_degree(), 1);
    const double lip = std::max(net.max_weight() * std::sqrt(static_cast<double>(deg)),
                                std::numeric_limits<double>::min());

    std::vector<double> best = y;
    double best_value = evaluate_placement(cc, net, y, n_files);

    std::vector<double> grad(cells);
    for (std::size_t e = 1; e <= epochs; ++e) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t k = 0; k < cc.counts.size(); ++k) {
            Request r{0, cc.files[k], cc.locs[k]};
            const RoutingSolution sol = route_matrix(net, y, n_files, r);
            const std::vector<double> g = supergradient(net, sol, r);
            const double scale = cc.counts[k] / cc.total;
            const auto row = static_cast<std::size_t>(cc.files[k]) * net.n_caches;
            for (std::size_t j = 0; j < net.n_caches; ++j) grad[row + j] += scale * g[j];
        }
        const double eta = diam / (lip * std::sqrt(static_cast<double>(e)));
        for (std::size_t c = 0; c < cells; ++c) y[c] += eta * grad[c];
        project_columns(y, net, n_files);
        const double value = evaluate_placement(cc, net, y, n_files);
        if (value > best_value) {
            best_value = value;
            best = y;
        }
    }

    HindsightNetworkResult res;
    res.placement = std::move(best);
    res.per_slot.reserve(trace.requests.size());
    double total = 0.0;
    for (const Request& r : trace.requests) {
        const double v = route_matrix(net, res.placement, n_files, r).value;
        res.per_slot.push_back(v);
        total += v;
    }
    res.total_utility = total;
    return res;
}

double hindsight_network_bruteforce_integral(const Trace& trace, const BipartiteNetwork& net) {
    net.validate();
    const auto n_files = static_cast<std::size_t>(trace.n_files);
    const std::size_t cells = n_files * net.n_caches;
    if (cells > 12) throw std::invalid_argument("exhaustive search needs files x caches <= 12");
    std::vector<std::size_t> caps(net.n_caches);
    for (std::size_t j = 0; j < net.n_caches; ++j) {
        const double c = net.capacities[j];
        const double r = std::round(c);
        if (std::abs(c - r) > 1e-9) throw std::invalid_argument("exhaustive search needs integral capacities");
        caps[j] = static_cast<std::size_t>(r);
    }

    const CompressedCounts cc = compress_trace(trace, net);
    std::vector<double> flat(cells);
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
        bool ok = true;
        for (std::size_t j = 0; j < net.n_caches && ok; ++j) {
            std::size_t used = 0;
            for (std::size_t n = 0; n < n_files; ++n)
                if (mask & (1u << (n * net.n_caches + j))) ++used;
            ok = used <= caps[j];
        }
        if (!ok) continue;
        for (std::size_t c = 0; c < cells; ++c) flat[c] = (mask & (1u << c)) ? 1.0 : 0.0;
        best = std::max(best, evaluate_placement(cc, net, flat, n_files));
    }
    return best;
}

}  // namespace oncache
