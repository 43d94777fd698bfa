#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <vector>

#include "oncache/bipartite.hpp"
#include "oncache/bounds.hpp"
#include "oncache/core.hpp"
#include "oncache/policies.hpp"
#include "oncache/projection.hpp"
#include "oncache/rng.hpp"
#include "oncache/traces.hpp"

namespace py = pybind11;
using namespace oncache;

PYBIND11_MODULE(oncache, m) {
    m.doc() = "Online caching: gradient and eviction policies, trace generators, regret bounds";
    m.attr("__version__") = kVersion;

    py::class_<Request>(m, "Request")
        .def(py::init<>())
        .def(py::init([](std::int64_t slot, std::int32_t file, std::int32_t location) {
                 return Request{slot, file, location};
             }),
             py::arg("slot"), py::arg("file"), py::arg("location") = -1)
        .def_readwrite("slot", &Request::slot)
        .def_readwrite("file", &Request::file)
        .def_readwrite("location", &Request::location)
        .def("__repr__", [](const Request& r) {
            return "Request(slot=" + std::to_string(r.slot) + ", file=" + std::to_string(r.file) +
                   ", location=" + std::to_string(r.location) + ")";
        });

    py::class_<Catalog>(m, "Catalog")
        .def(py::init<std::size_t, std::vector<double>>(), py::arg("n_files"), py::arg("weights"))
        .def_static("uniform", &Catalog::uniform, py::arg("n_files"), py::arg("weight") = 1.0)
        .def_readonly("n_files", &Catalog::n_files)
        .def_readonly("weights", &Catalog::weights)
        .def("weight", &Catalog::weight, py::arg("file"))
        .def("max_weight", &Catalog::max_weight);

    py::class_<CacheVector>(m, "CacheVector")
        .def(py::init<std::vector<double>, double>(), py::arg("values"), py::arg("capacity"))
        .def_static("uniform_fill", &CacheVector::uniform_fill, py::arg("n_files"), py::arg("capacity"))
        .def_readonly("y", &CacheVector::y)
        .def_readonly("capacity", &CacheVector::capacity)
        .def("total", &CacheVector::total)
        .def("is_feasible", &CacheVector::is_feasible, py::arg("eps") = kFeasEps);

    m.def("slot_utility", &slot_utility, py::arg("request"), py::arg("cache"), py::arg("catalog"));

    py::class_<Trace>(m, "Trace")
        .def(py::init<>())
        .def_readwrite("requests", &Trace::requests)
        .def_readwrite("n_files", &Trace::n_files)
        .def_readwrite("n_locations", &Trace::n_locations)
        .def_readonly("provenance", &Trace::provenance)
        .def_readonly("external_ids", &Trace::external_ids)
        .def("horizon", &Trace::horizon)
        .def("has_locations", &Trace::has_locations)
        .def("validate", &Trace::validate);

    m.def("gen_zipf_iid", &gen_zipf_iid, py::arg("n_files"), py::arg("horizon"), py::arg("exponent"),
          py::arg("seed"), py::arg("n_locations") = 0);
    m.def("gen_periodic_adversarial", &gen_periodic_adversarial, py::arg("cache_size"),
          py::arg("horizon"), py::arg("n_files") = 0, py::arg("n_locations") = 0, py::arg("seed") = 0);
    m.def(
        "gen_snm",
        [](std::size_t n_files, std::size_t horizon, double shot_rate, const std::string& duration,
           const std::string& volume, std::uint64_t seed, bool background, std::size_t n_locations) {
            return gen_snm(n_files, horizon, shot_rate, DistSpec::parse(duration),
                           DistSpec::parse(volume), seed, background, n_locations);
        },
        py::arg("n_files"), py::arg("horizon"), py::arg("shot_rate"),
        py::arg("duration") = "pareto:2:10", py::arg("volume") = "fixed:50", py::arg("seed") = 0,
        py::arg("background") = true, py::arg("n_locations") = 0);
    m.def("gen_random_replacement", &gen_random_replacement, py::arg("n_files"), py::arg("horizon"),
          py::arg("exponent"), py::arg("churn_prob"), py::arg("seed"), py::arg("n_locations") = 0);
    m.def("load_trace", &load_trace, py::arg("path"));
    m.def("save_trace", &save_trace, py::arg("trace"), py::arg("path"));

    m.def("project_capped_simplex", &project_capped_simplex, py::arg("point"), py::arg("capacity"));

    py::class_<CappedColumn>(m, "CappedColumn")
        .def(py::init<std::size_t, double>(), py::arg("n_files"), py::arg("capacity"))
        .def_static("uniform_fill", &CappedColumn::uniform_fill, py::arg("n_files"), py::arg("capacity"))
        .def_static("from_values", &CappedColumn::from_values, py::arg("values"), py::arg("capacity"))
        .def("__len__", &CappedColumn::size)
        .def("capacity", &CappedColumn::capacity)
        .def("value", &CappedColumn::value, py::arg("file"))
        .def("values", &CappedColumn::values)
        .def("bump_and_project", &CappedColumn::bump_and_project, py::arg("file"), py::arg("delta"));

    m.def("cache_set_diameter", &cache_set_diameter, py::arg("capacity"), py::arg("n_files"));
    m.def("horizon_optimal_step", &horizon_optimal_step, py::arg("capacity"), py::arg("n_files"),
          py::arg("horizon"), py::arg("w_max"));

    py::class_<StepSchedule>(m, "StepSchedule")
        .def_static("fixed", &StepSchedule::fixed, py::arg("eta"))
        .def_static("horizon_optimal", &StepSchedule::horizon_optimal, py::arg("horizon"))
        .def_static("diminishing", &StepSchedule::diminishing);

    py::class_<OgaPolicy>(m, "OgaPolicy")
        .def(py::init<const Catalog&, double, StepSchedule>(), py::arg("catalog"), py::arg("capacity"),
             py::arg("schedule"), py::keep_alive<1, 2>())
        .def("step", &OgaPolicy::step, py::arg("request"))
        .def("fractions", &OgaPolicy::fractions)
        .def("capacity", &OgaPolicy::capacity)
        .def("current_eta", &OgaPolicy::current_eta);

    py::class_<LruPolicy>(m, "LruPolicy")
        .def(py::init<const Catalog&, double>(), py::arg("catalog"), py::arg("capacity"),
             py::keep_alive<1, 2>())
        .def("step", &LruPolicy::step, py::arg("request"))
        .def("contents", &LruPolicy::contents)
        .def("capacity_slots", &LruPolicy::capacity_slots);

    py::class_<LfuPolicy>(m, "LfuPolicy")
        .def(py::init<const Catalog&, double>(), py::arg("catalog"), py::arg("capacity"),
             py::keep_alive<1, 2>())
        .def("step", &LfuPolicy::step, py::arg("request"));

    py::class_<HindsightResult>(m, "HindsightResult")
        .def_readonly("cache", &HindsightResult::cache)
        .def_readonly("total_utility", &HindsightResult::total_utility)
        .def_readonly("per_slot", &HindsightResult::per_slot);

    m.def("hindsight_best_static", &hindsight_best_static, py::arg("trace"), py::arg("catalog"),
          py::arg("capacity"));

    py::class_<RegretLedger>(m, "RegretLedger")
        .def(py::init<>())
        .def("record", &RegretLedger::record, py::arg("policy_utility"), py::arg("hindsight_utility"))
        .def("slots", &RegretLedger::slots)
        .def("cumulative_utility", &RegretLedger::cumulative_utility)
        .def("cumulative_regret", &RegretLedger::cumulative_regret)
        .def("regret_series", &RegretLedger::regret_series)
        .def("cumulative_utility_series", &RegretLedger::cumulative_utility_series);

    py::class_<BipartiteNetwork>(m, "BipartiteNetwork")
        .def(py::init<>())
        .def_readwrite("n_locations", &BipartiteNetwork::n_locations)
        .def_readwrite("n_caches", &BipartiteNetwork::n_caches)
        .def_readwrite("capacities", &BipartiteNetwork::capacities)
        .def_readwrite("reach", &BipartiteNetwork::reach)
        .def_readwrite("base_weights", &BipartiteNetwork::base_weights)
        .def_readwrite("file_multipliers", &BipartiteNetwork::file_multipliers)
        .def("reachable", &BipartiteNetwork::reachable, py::arg("location"), py::arg("cache"))
        .def("base_weight", &BipartiteNetwork::base_weight, py::arg("location"), py::arg("cache"))
        .def("weight", &BipartiteNetwork::weight, py::arg("file"), py::arg("location"), py::arg("cache"))
        .def("max_right_degree", &BipartiteNetwork::max_right_degree)
        .def("max_weight", &BipartiteNetwork::max_weight)
        .def("validate", &BipartiteNetwork::validate)
        .def_static("single_cache", &BipartiteNetwork::single_cache, py::arg("capacity"),
                    py::arg("file_weights"))
        .def_static("from_json_file", &BipartiteNetwork::from_json_file, py::arg("path"))
        .def("to_json_file", &BipartiteNetwork::to_json_file, py::arg("path"));

    py::class_<RoutingSolution>(m, "RoutingSolution")
        .def_readonly("value", &RoutingSolution::value)
        .def_readonly("origin_share", &RoutingSolution::origin_share)
        .def_readonly("alpha", &RoutingSolution::alpha)
        .def_readonly("z", &RoutingSolution::z);

    m.def("route_matrix", &route_matrix, py::arg("network"), py::arg("placement_flat"),
          py::arg("n_files"), py::arg("request"));
    m.def("supergradient", &supergradient, py::arg("network"), py::arg("solution"), py::arg("request"));
    m.def("network_diameter", &network_diameter, py::arg("network"), py::arg("n_files"));
    m.def("bsa_horizon_step", &bsa_horizon_step, py::arg("network"), py::arg("n_files"),
          py::arg("horizon"));

    py::class_<BsaPolicy>(m, "BsaPolicy")
        .def(py::init<const BipartiteNetwork&, std::size_t, double>(), py::arg("network"),
             py::arg("n_files"), py::arg("eta"), py::keep_alive<1, 2>())
        .def("step", &BsaPolicy::step, py::arg("request"))
        .def("eta", &BsaPolicy::eta)
        .def("placement",
             [](const BsaPolicy& p) {
                 std::vector<std::vector<double>> out;
                 out.reserve(p.placement().size());
                 for (const CappedColumn& col : p.placement()) out.push_back(col.values());
                 return out;
             });

    py::class_<MlruPolicy>(m, "MlruPolicy")
        .def(py::init<const BipartiteNetwork&, std::size_t, std::uint64_t>(), py::arg("network"),
             py::arg("n_files"), py::arg("seed"), py::keep_alive<1, 2>())
        .def("step", &MlruPolicy::step, py::arg("request"));

    py::class_<LazyQLruPolicy>(m, "LazyQLruPolicy")
        .def(py::init<const BipartiteNetwork&, std::size_t, double, std::uint64_t>(),
             py::arg("network"), py::arg("n_files"), py::arg("q"), py::arg("seed"),
             py::keep_alive<1, 2>())
        .def("step", &LazyQLruPolicy::step, py::arg("request"));

    py::class_<HindsightNetworkResult>(m, "HindsightNetworkResult")
        .def_readonly("placement", &HindsightNetworkResult::placement)
        .def_readonly("total_utility", &HindsightNetworkResult::total_utility)
        .def_readonly("per_slot", &HindsightNetworkResult::per_slot);

    m.def("hindsight_best_static_network", &hindsight_best_static_network, py::arg("trace"),
          py::arg("network"), py::arg("epochs") = 50);

    m.def("prop1_bound", &prop1_bound, py::arg("w"), py::arg("capacity"), py::arg("horizon"));
    m.def("oga_upper_bound", &oga_upper_bound, py::arg("capacity"), py::arg("n_files"),
          py::arg("horizon"), py::arg("w_max"));
    m.def("bsa_upper_bound", &bsa_upper_bound, py::arg("max_degree"), py::arg("n_caches"),
          py::arg("capacity"), py::arg("horizon"), py::arg("w_max"));
    m.def("lb_uniform", &lb_uniform, py::arg("w"), py::arg("gamma"), py::arg("capacity"),
          py::arg("horizon"));
    m.def("lb_pairing", &lb_pairing, py::arg("weights"), py::arg("pairs"));
    m.def("lb_pairing_exact", &lb_pairing_exact, py::arg("weights"), py::arg("pairs"));
    m.def("lb_pairing_heuristic", &lb_pairing_heuristic, py::arg("weights"), py::arg("pairs"));

    py::class_<GaussianRequestModel>(m, "GaussianRequestModel")
        .def(py::init<std::vector<double>>(), py::arg("weights"))
        .def_readonly("weights", &GaussianRequestModel::weights)
        .def_readonly("inverse_weight_sum", &GaussianRequestModel::inverse_weight_sum)
        .def("__len__", &GaussianRequestModel::size)
        .def("request_probability", &GaussianRequestModel::request_probability, py::arg("file"))
        .def("covariance", &GaussianRequestModel::covariance, py::arg("i"), py::arg("j"));

    py::class_<MonteCarloBound>(m, "MonteCarloBound")
        .def_readonly("estimate", &MonteCarloBound::estimate)
        .def_readonly("std_error", &MonteCarloBound::std_error)
        .def_readonly("samples", &MonteCarloBound::samples);

    m.def("lb_monte_carlo", &lb_monte_carlo, py::arg("model"), py::arg("top"), py::arg("samples"),
          py::arg("seed"));

    m.def("mix_seed", &mix_seed, py::arg("seed"), py::arg("stream"));
}
