#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oncache/bounds.hpp"
#include "oncache/harness.hpp"
#include "oncache/policies.hpp"

namespace {

std::string default_out(const std::string& name) {
    const char* dir = std::getenv("ONCACHE_OUT_DIR");
    if (dir == nullptr || *dir == '\0') return name;
    std::string d(dir);
    if (d.back() != '/') d += '/';
    return d + name;
}

std::vector<std::string> split_policies(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// Shared between run and inspect; both rebuild the experiment from flags.
struct RunFlags {
    oncache::ExperimentConfig cfg;
    std::string policies_text = "oga,lru";
    std::string config_path;
    std::string out;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// The config option on run/inspect is resolved before CLI11 sees the argument
// list: every key=value line becomes --key=value unless that flag was passed
// explicitly, so command-line flags always win. CLI11 only reads config files
// attached to the root command, which would force section headers here.
std::vector<std::string> with_config_defaults(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::size_t sub = args.size();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!args[i].empty() && args[i][0] != '-') {
            sub = i;
            break;
        }
    }
    if (sub == args.size() || (args[sub] != "run" && args[sub] != "inspect")) return args;

    std::string path;
    for (std::size_t i = sub + 1; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i + 2));
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::vector<std::string> extra;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos || trim(entry.substr(0, eq)).empty())
            throw std::invalid_argument("config file " + path + " line " +
                                        std::to_string(lineno) + ": expected key=value");
        const std::string flag = "--" + trim(entry.substr(0, eq));
        bool given = false;
        for (std::size_t i = sub + 1; i < args.size() && !given; ++i)
            given = args[i] == flag || args[i].rfind(flag + "=", 0) == 0;
        if (!given) extra.push_back(flag + "=" + trim(entry.substr(eq + 1)));
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub + 1), extra.begin(), extra.end());
    return args;
}

void add_trace_options(CLI::App* cmd, oncache::ExperimentConfig& cfg) {
    cmd->add_option("--n", cfg.n_files, "catalog size for generated traces");
    cmd->add_option("--t", cfg.horizon, "horizon (slots); must match the trace file if both given");
    cmd->add_option("--s", cfg.zipf_s, "popularity exponent (zipf, random_replacement)");
    cmd->add_option("--churn", cfg.churn, "per-slot replacement probability (random_replacement)");
    cmd->add_option("--rate", cfg.shot_rate, "shot arrivals per slot (snm)");
    cmd->add_option("--duration", cfg.shot_duration, "shot duration law, e.g. pareto:2:10 (snm)");
    cmd->add_option("--volume", cfg.shot_volume, "shot request volume law, e.g. fixed:50 (snm)");
    cmd->add_flag("--background,!--no-background", cfg.snm_background,
                  "emit a background file on shot-free slots (snm)");
    cmd->add_option("--locations", cfg.locations, "number of request locations (0 = none)");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
}

void add_run_options(CLI::App* cmd, RunFlags& rf) {
    cmd->add_option("--config", rf.config_path,
                    "read key=value defaults from a file; explicit flags override");
    cmd->add_option("--mode", rf.cfg.mode, "single or bipartite")->capture_default_str();
    cmd->add_option("--trace", rf.cfg.trace_path, "trace CSV to load instead of generating");
    cmd->add_option("--generator", rf.cfg.generator,
                    "zipf | uniform | periodic | snm | random_replacement");
    add_trace_options(cmd, rf.cfg);
    cmd->add_option("--policies", rf.policies_text, "comma-separated policy list")
        ->capture_default_str();
    cmd->add_option("--capacity", rf.cfg.capacity, "cache capacity (single mode)");
    cmd->add_option("--weights", rf.cfg.weights_path, "per-file weights, one per line (single mode)");
    cmd->add_option("--network", rf.cfg.network_path, "network JSON (bipartite mode)");
    cmd->add_option("--eta", rf.cfg.eta, "gradient step: auto, diminishing, or a number")
        ->capture_default_str();
    cmd->add_option("--q", rf.cfg.q, "insertion probability for lazy_qlru")->capture_default_str();
    cmd->add_option("--hindsight-epochs", rf.cfg.hindsight_epochs,
                    "ascent epochs for the bipartite benchmark")
        ->capture_default_str();
    cmd->add_option("-o,--out", rf.out, "output CSV path");
}

oncache::RunArtifacts execute(RunFlags& rf, oncache::Trace& trace) {
    rf.cfg.policies = split_policies(rf.policies_text);
    rf.cfg.validate();
    trace = oncache::make_trace(rf.cfg);
    return oncache::run_experiment(rf.cfg, trace);
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct BoundsFlags {
    std::size_t n = 0;
    double c = 0.0;
    std::size_t t = 0;
    double w = 1.0;
    std::string weights_path;
    std::size_t deg = 1;
    std::size_t j = 1;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    std::string out;
};

void cmd_bounds(const BoundsFlags& bf) {
    if (bf.n == 0) throw std::invalid_argument("bounds need --n > 0");
    if (!(bf.c > 0.0) || bf.c > static_cast<double>(bf.n))
        throw std::invalid_argument("bounds need 0 < --c <= n");
    if (bf.t == 0) throw std::invalid_argument("bounds need --t > 0");

    const bool uniform = bf.weights_path.empty();
    std::vector<double> weights;
    if (uniform) {
        weights.assign(bf.n, bf.w);
    } else {
        weights = oncache::load_weights(bf.weights_path, bf.n);
    }
    double w_max = 0.0;
    for (double v : weights) w_max = std::max(w_max, v);

    struct Row {
        std::string name;
        std::string value;
        std::string note;
    };
    std::vector<Row> rows;
    const std::string na = "n/a";

    if (uniform) {
        rows.push_back({"prop1_lower", fmt6(oncache::prop1_bound(bf.w, bf.c, static_cast<double>(bf.t))),
                        "periodic trace, list policies"});
    } else {
        rows.push_back({"prop1_lower", na, "uniform weights required"});
    }
    rows.push_back({"oga_upper", fmt6(oncache::oga_upper_bound(bf.c, bf.n, bf.t, w_max)),
                    "horizon-optimal step"});
    rows.push_back({"bsa_upper",
                    fmt6(oncache::bsa_upper_bound(bf.deg, bf.j, bf.c, bf.t, w_max)),
                    "deg=" + std::to_string(bf.deg) + " j=" + std::to_string(bf.j)});

    const bool small_half = 2.0 * bf.c < static_cast<double>(bf.n);
    if (!small_half) {
        rows.push_back({"gaussian_lower_uniform", na, "C<N/2 required"});
        rows.push_back({"gaussian_lower_pairing", na, "C<N/2 required"});
        rows.push_back({"gaussian_lower_mc", na, "C<N/2 required"});
    } else {
        const auto pairs = static_cast<std::size_t>(bf.c);
        if (uniform) {
            const double gamma = bf.c / static_cast<double>(bf.n);
            rows.push_back({"gaussian_lower_uniform",
                            fmt6(oncache::lb_uniform(bf.w, gamma, bf.c, static_cast<double>(bf.t))),
                            "i.i.d. uniform requests"});
        } else {
            rows.push_back({"gaussian_lower_uniform", na, "uniform weights required"});
        }
        rows.push_back({"gaussian_lower_pairing",
                        fmt6(oncache::lb_pairing(weights, pairs) * std::sqrt(static_cast<double>(bf.t))),
                        bf.n <= 10 ? "exact pairing" : "greedy pairing"});
        const oncache::GaussianRequestModel model(weights);
        const oncache::MonteCarloBound mc =
            oncache::lb_monte_carlo(model, pairs, bf.samples, bf.seed);
        rows.push_back({"gaussian_lower_mc",
                        fmt6(mc.estimate * std::sqrt(static_cast<double>(bf.t))),
                        "std_err=" + fmt6(mc.std_error * std::sqrt(static_cast<double>(bf.t))) +
                            " samples=" + std::to_string(bf.samples)});
    }

    std::printf("%-24s %-14s %s\n", "bound", "value", "note");
    for (const Row& r : rows) std::printf("%-24s %-14s %s\n", r.name.c_str(), r.value.c_str(), r.note.c_str());

    if (!bf.out.empty()) {
        std::ofstream outf(bf.out);
        if (!outf) throw std::runtime_error("cannot write bounds file: " + bf.out);
        outf << "bound,value,note\n";
        for (const Row& r : rows) outf << r.name << ',' << r.value << ",\"" << r.note << "\"\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online caching experiments: trace generation, policy runs, regret bounds"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic trace CSV");
    oncache::ExperimentConfig gen_cfg;
    std::string gen_name;
    std::string gen_out;
    gen->add_option("generator", gen_name, "zipf | uniform | periodic | snm | random_replacement")
        ->required()
        ->check(CLI::IsMember({"zipf", "uniform", "periodic", "snm", "random_replacement"}));
    add_trace_options(gen, gen_cfg);
    gen->add_option("--c", gen_cfg.capacity, "cache size the cyclic trace defeats (periodic)");
    gen->add_option("-o,--out", gen_out, "output trace path");
    gen->callback([&]() {
        gen_cfg.generator = gen_name;
        gen_cfg.trace_path.clear();
        if (gen_cfg.horizon == 0) throw std::invalid_argument("generate needs --t > 0");
        const oncache::Trace tr = oncache::make_trace(gen_cfg);
        const std::string path = gen_out.empty() ? default_out("trace.csv") : gen_out;
        oncache::save_trace(tr, path);
        std::cout << path << ": " << tr.horizon() << " requests over " << tr.n_files << " files\n";
    });

    // run
    auto* run = app.add_subcommand("run", "run policies on a trace and write per-slot results");
    RunFlags run_flags;
    add_run_options(run, run_flags);
    run->callback([&]() {
        oncache::Trace trace;
        const oncache::RunArtifacts art = execute(run_flags, trace);
        const std::string path = run_flags.out.empty() ? default_out("results.csv") : run_flags.out;
        run_flags.cfg.out = path;
        oncache::write_results_csv(path, run_flags.cfg, art);
        const auto t = static_cast<double>(trace.horizon());
        std::cout << path << ": " << trace.horizon() << " slots, hindsight avg "
                  << fmt6(art.hindsight_total / t) << "\n";
        for (std::size_t p = 0; p < art.policy_names.size(); ++p) {
            double cum = 0.0;
            for (double u : art.utilities[p]) cum += u;
            std::cout << "  " << art.policy_names[p] << ": avg " << fmt6(cum / t) << ", regret "
                      << fmt6(art.hindsight_total - cum) << "\n";
        }
    });

    // bounds
    auto* bounds = app.add_subcommand("bounds", "print regret bounds for a configuration");
    BoundsFlags bounds_flags;
    bounds->add_option("--n", bounds_flags.n, "catalog size")->required();
    bounds->add_option("--c", bounds_flags.c, "cache capacity")->required();
    bounds->add_option("--t", bounds_flags.t, "horizon")->required();
    bounds->add_option("--w", bounds_flags.w, "uniform file weight")->capture_default_str();
    bounds->add_option("--weights", bounds_flags.weights_path, "per-file weights, one per line");
    bounds->add_option("--deg", bounds_flags.deg, "maximum caches per location")->capture_default_str();
    bounds->add_option("--j", bounds_flags.j, "number of caches")->capture_default_str();
    bounds->add_option("--samples", bounds_flags.samples, "Monte-Carlo samples")->capture_default_str();
    bounds->add_option("--seed", bounds_flags.seed, "Monte-Carlo seed");
    bounds->add_option("-o,--out", bounds_flags.out, "also write the table as CSV");
    bounds->callback([&]() { cmd_bounds(bounds_flags); });

    // inspect
    auto* insp = app.add_subcommand(
        "inspect", "re-run a config and list LRU contents with the gradient policy's fractions");
    RunFlags insp_flags;
    add_run_options(insp, insp_flags);
    insp->callback([&]() {
        oncache::Trace trace;
        const oncache::RunArtifacts art = execute(insp_flags, trace);
        const std::vector<oncache::InspectRow> rows = oncache::inspect_rows(trace, art);
        const std::string path = insp_flags.out.empty() ? default_out("inspect.csv") : insp_flags.out;
        insp_flags.cfg.out = path;
        oncache::write_inspect_csv(path, insp_flags.cfg, rows);
        std::cout << path << ": " << rows.size() << " cached files\n";
    });

    try {
        std::vector<std::string> args = with_config_defaults(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
