// Copyright 2026 The qchop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner: generates or loads instances, runs Q-CHOP / SAA sweeps
// and writes per-run CSV files plus a JSON summary.
//
//   qchop run --problem mis --n 10 --seeds 10 --algorithm qchop,saa --T 2piN2 --out runs/
//   qchop run --config runs/summary.json --out rerun/
//   qchop generate --problem knapsack --n 6 --seed 3 --out ks3.json
//   qchop compare runs/summary.json --a qchop --b saa

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "qchop/qchop.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qchop {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct RunConfig {
    std::string problem = "mis";
    int n = 6;
    double density = 0.3;  // edge probability for graph problems
    int items = 3;         // auction item count
    int sector = 0;        // enforced ETF sector
    std::uint64_t seed = 0;
    int seeds = 1;  // consecutive generator seeds starting at `seed`
    std::vector<std::string> instances;
    std::vector<std::string> algorithms{"qchop"};
    std::vector<std::string> times{"2piN2"};
    std::optional<double> lambda;
    std::optional<double> eps;
    std::string policy = "automatic";
    int checkpoints = 101;
    double atol = 1e-8;
    double rtol = 1e-8;
};

json config_to_json(const RunConfig& c) {
    json j{{"problem", c.problem}, {"n", c.n},           {"p", c.density},
           {"items", c.items},     {"sector", c.sector}, {"seed", c.seed},
           {"seeds", c.seeds},     {"instances", c.instances},
           {"algorithm", c.algorithms},                  {"T", c.times},
           {"lambda", nullptr},    {"eps", nullptr},     {"policy", c.policy},
           {"checkpoints", c.checkpoints},               {"atol", c.atol},
           {"rtol", c.rtol}};
    if (c.lambda) j["lambda"] = *c.lambda;
    if (c.eps) j["eps"] = *c.eps;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        c.problem = j.value("problem", c.problem);
        c.n = j.value("n", c.n);
        c.density = j.value("p", c.density);
        c.items = j.value("items", c.items);
        c.sector = j.value("sector", c.sector);
        c.seed = j.value("seed", c.seed);
        c.seeds = j.value("seeds", c.seeds);
        c.instances = j.value("instances", c.instances);
        c.algorithms = j.value("algorithm", c.algorithms);
        c.times = j.value("T", c.times);
        if (j.contains("lambda") && !j["lambda"].is_null()) c.lambda = j["lambda"].get<double>();
        if (j.contains("eps") && !j["eps"].is_null()) c.eps = j["eps"].get<double>();
        c.policy = j.value("policy", c.policy);
        c.checkpoints = j.value("checkpoints", c.checkpoints);
        c.atol = j.value("atol", c.atol);
        c.rtol = j.value("rtol", c.rtol);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

/// Accepts either a bare config object or a run summary carrying one.
RunConfig read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config_from_json(j.contains("config") ? j["config"] : j);
}

/// "2piN" and "2piN2" scale with the qubit count; anything else is a number,
/// optionally prefixed by a factor as in "4*2piN2".
double resolve_time(const std::string& text, int n_qubits) {
    std::string s = text;
    double factor = 1.0;
    if (const auto star = s.find('*'); star != std::string::npos) {
        factor = std::stod(s.substr(0, star));
        s = s.substr(star + 1);
    }
    const double n = n_qubits;
    double T = 0.0;
    if (s == "2piN") {
        T = 2 * kPi * n;
    } else if (s == "2piN2") {
        T = 2 * kPi * n * n;
    } else {
        std::size_t used = 0;
        try {
            T = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size()) throw ConfigError("bad --T value '" + text + "'");
    }
    T *= factor;
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("--T must be positive: '" + text + "'");
    return T;
}

GeneratedInstance generate(const RunConfig& c, std::uint64_t seed) {
    if (c.problem == "mis") return gen_mis_instance(c.n, c.density, seed);
    if (c.problem == "dmds") return gen_dmds_instance(c.n, c.density, seed);
    if (c.problem == "knapsack") return gen_knapsack_uniform(c.n, seed);
    if (c.problem == "auction") return gen_auction_instance(c.n, c.items, seed);
    if (c.problem == "etf") return gen_etf_instance(c.n, seed, c.sector);
    throw ConfigError("unknown problem '" + c.problem + "' (mis, dmds, knapsack, auction, etf)");
}

struct NamedInstance {
    std::string id;
    Instance instance;
    std::uint64_t seed = 0;
};

std::vector<NamedInstance> resolve_instances(const RunConfig& c) {
    std::vector<NamedInstance> out;
    if (!c.instances.empty()) {
        for (const auto& path : c.instances) out.push_back({fs::path(path).stem().string(), read_instance(path), 0});
        return out;
    }
    if (c.seeds < 1) throw ConfigError("--seeds must be at least 1");
    if (c.n < 1) throw ConfigError("--n must be at least 1");
    for (int k = 0; k < c.seeds; ++k) {
        const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(k);
        try {
            out.push_back({c.problem + "-n" + std::to_string(c.n) + "-s" + std::to_string(seed),
                           generate(c, seed).instance, seed});
        } catch (const InstanceRejected& e) {
            throw ConfigError(std::string("generator: ") + e.what());
        }
    }
    return out;
}

std::vector<WorkItem> work_list(const RunConfig& c, const std::vector<NamedInstance>& instances) {
    if (c.algorithms.empty()) throw ConfigError("--algorithm is empty");
    if (c.times.empty()) throw ConfigError("--T is empty");
    if (c.checkpoints < 2) throw ConfigError("--checkpoints must be at least 2");
    if (c.lambda && !(*c.lambda > 0.0)) throw ConfigError("--lambda must be positive");
    if (c.eps && !(*c.eps >= 0.0)) throw ConfigError("--eps must be non-negative");
    std::vector<Variant> variants;
    for (const auto& a : c.algorithms) {
        const Variant v = variant_from_string(a);
        if (v == Variant::yww) throw ConfigError("--algorithm yww is not runnable from an instance");
        variants.push_back(v);
    }
    const RotationPolicy policy = rotation_policy_from_string(c.policy);
    std::vector<WorkItem> items;
    for (const auto& inst : instances) {
        const int n_qubits = instance_size(inst.instance);
        for (const auto& t : c.times) {
            const double T = resolve_time(t, n_qubits);
            for (Variant v : variants) {
                WorkItem w;
                w.instance_id = inst.id;
                w.instance = inst.instance;
                w.variant = v;
                w.total_time = T;
                w.lambda = c.lambda;
                w.eps = c.eps;
                w.policy = policy;
                w.integration = {c.checkpoints, c.atol, c.rtol};
                w.seed = inst.seed;
                items.push_back(std::move(w));
            }
        }
    }
    return items;
}

std::string csv_name(const WorkItem& w) {
    return w.instance_id + "__" + to_string(w.variant) + "__T" + format_number(w.total_time) + ".csv";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

/// Pairs the first algorithm against every other one, per T, over instances
/// that succeeded on both sides.
json paired_comparisons(const RunConfig& c, const std::vector<WorkItem>& items, const std::vector<RunOutcome>& outs) {
    json all = json::array();
    if (c.algorithms.size() < 2) return all;
    std::map<std::pair<std::string, double>, std::vector<MetricsReport>> by_group;
    std::set<double> times;
    for (std::size_t k = 0; k < items.size(); ++k) {
        times.insert(items[k].total_time);
        if (outs[k].ok()) by_group[{to_string(items[k].variant), items[k].total_time}].push_back(*outs[k].report);
    }
    const std::string base = to_string(variant_from_string(c.algorithms.front()));
    for (std::size_t i = 1; i < c.algorithms.size(); ++i) {
        const std::string other = to_string(variant_from_string(c.algorithms[i]));
        for (double T : times) {
            auto a = by_group[{base, T}];
            auto b = by_group[{other, T}];
            std::set<std::string> ids_a, ids_b;
            for (const auto& r : a) ids_a.insert(r.meta.instance_id);
            for (const auto& r : b) ids_b.insert(r.meta.instance_id);
            auto keep = [](std::vector<MetricsReport>& v, const std::set<std::string>& ids) {
                std::erase_if(v, [&](const MetricsReport& r) { return !ids.count(r.meta.instance_id); });
            };
            keep(a, ids_b);
            keep(b, ids_a);
            json entry{{"a", base}, {"b", other}, {"T", T}};
            try {
                entry["comparison"] = to_json(compare(a, b));
            } catch (const ConfigError& e) {
                entry["error"] = e.what();
            }
            all.push_back(std::move(entry));
        }
    }
    return all;
}

int run_command(const RunConfig& config, const std::string& out_dir) {
    const auto instances = resolve_instances(config);
    const auto items = work_list(config, instances);
    fs::create_directories(out_dir);
    const auto outs = sweep(items);

    json runs = json::array();
    std::vector<MetricsReport> reports;
    int failures = 0;
    for (std::size_t k = 0; k < items.size(); ++k) {
        const auto& w = items[k];
        if (!outs[k].ok()) {
            ++failures;
            std::cerr << "run failed: " << w.instance_id << ' ' << to_string(w.variant) << " T="
                      << format_number(w.total_time) << ": " << outs[k].error << '\n';
            runs.push_back({{"instance_id", w.instance_id},
                            {"variant", to_string(w.variant)},
                            {"T", w.total_time},
                            {"error", outs[k].error}});
            continue;
        }
        const auto& rep = *outs[k].report;
        std::ostringstream csv;
        write_csv(rep, csv);
        write_text(fs::path(out_dir) / csv_name(w), csv.str());
        json j = to_json(rep);
        j["csv"] = csv_name(w);
        runs.push_back(std::move(j));
        reports.push_back(rep);
        const auto& f = rep.final_point();
        std::cout << w.instance_id << ' ' << to_string(w.variant) << " T=" << format_number(w.total_time)
                  << " r=" << format_number(f.r) << " p_opt=" << format_number(f.p_opt)
                  << " p_feas=" << format_number(f.p_feas) << '\n';
    }
    json aggregates = json::array();
    for (const auto& a : aggregate(reports)) aggregates.push_back(to_json(a));
    const json summary{{"config", config_to_json(config)},
                       {"runs", runs},
                       {"aggregates", aggregates},
                       {"comparisons", paired_comparisons(config, items, outs)},
                       {"failures", failures}};
    write_text(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
    return failures == 0 ? kExitOk : kExitPartial;
}

std::vector<MetricsReport> read_runs(const std::string& path, const std::string& variant, std::optional<double> T) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open summary '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("summary '" + path + "': " + e.what());
    }
    if (!j.contains("runs") || !j["runs"].is_array()) throw ParseError("summary '" + path + "': no runs array");
    std::vector<MetricsReport> out;
    for (const auto& r : j["runs"]) {
        if (r.contains("error")) continue;
        auto rep = report_from_json(r);
        if (!variant.empty() && rep.meta.variant != to_string(variant_from_string(variant))) continue;
        if (T && rep.meta.total_time != *T) continue;
        out.push_back(std::move(rep));
    }
    return out;
}

}  // namespace
}  // namespace qchop

int main(int argc, char** argv) {
    using namespace qchop;
    CLI::App app{"Exact state-vector simulator for constrained adiabatic optimization"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string out_dir = "qchop_out";
    std::optional<double> lambda, eps;
    auto* run = app.add_subcommand("run", "Run a sweep and write CSV/JSON results");
    run->add_option("--config", config_path, "Config JSON (or a previous summary.json); flags override it");
    auto* o_problem = run->add_option("--problem", cfg.problem, "mis, dmds, knapsack, auction or etf");
    auto* o_n = run->add_option("--n", cfg.n, "Problem size (vertices, items, bids or assets)");
    auto* o_p = run->add_option("--p", cfg.density, "Edge probability for mis/dmds");
    auto* o_items = run->add_option("--items", cfg.items, "Item count for auction");
    auto* o_sector = run->add_option("--sector", cfg.sector, "Enforced ETF sector");
    auto* o_seed = run->add_option("--seed", cfg.seed, "First generator seed");
    auto* o_seeds = run->add_option("--seeds", cfg.seeds, "Number of consecutive seeds");
    auto* o_inst = run->add_option("--instance", cfg.instances, "Instance JSON file(s); replaces the generator");
    auto* o_alg = run->add_option("--algorithm", cfg.algorithms, "Comma list of qchop, qchop-cd, saa")->delimiter(',');
    auto* o_T = run->add_option("--T", cfg.times, "Comma list of runtimes or presets 2piN, 2piN2, k*2piN2")->delimiter(',');
    auto* o_lambda = run->add_option("--lambda", lambda, "Penalty scale (default: qubit count)");
    auto* o_eps = run->add_option("--eps", eps, "Tolerance for P_eps (default: 0.01 for etf, else 0)");
    auto* o_policy = run->add_option("--policy", cfg.policy, "Rotation policy: automatic, global-odd, per-term, hybrid");
    auto* o_ckpt = run->add_option("--checkpoints", cfg.checkpoints, "Checkpoints including t=0 and t=T");
    auto* o_atol = run->add_option("--atol", cfg.atol, "Absolute integrator tolerance");
    auto* o_rtol = run->add_option("--rtol", cfg.rtol, "Relative integrator tolerance");
    run->add_option("--out", out_dir, "Output directory");

    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Write a generated instance as JSON");
    gen->add_option("--problem", cfg.problem, "mis, dmds, knapsack, auction or etf")->required();
    gen->add_option("--n", cfg.n, "Problem size")->required();
    gen->add_option("--p", cfg.density, "Edge probability for mis/dmds");
    gen->add_option("--items", cfg.items, "Item count for auction");
    gen->add_option("--sector", cfg.sector, "Enforced ETF sector");
    gen->add_option("--seed", cfg.seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output file (default: stdout)");

    std::string file_a, file_b, variant_a, variant_b, cmp_out;
    std::optional<double> cmp_T;
    auto* cmp = app.add_subcommand("compare", "Paired final-time deltas between two sets of runs");
    cmp->add_option("first", file_a, "summary.json of set A")->required();
    cmp->add_option("second", file_b, "summary.json of set B (default: same file)");
    cmp->add_option("--a", variant_a, "Keep only this variant from set A");
    cmp->add_option("--b", variant_b, "Keep only this variant from set B");
    cmp->add_option("--T", cmp_T, "Keep only runs with this runtime");
    cmp->add_option("--out", cmp_out, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*run) {
            if (!config_path.empty()) {
                RunConfig file = read_config(config_path);
                // Explicit flags win over the file.
                auto take = [](CLI::Option* o, auto& dst, const auto& src) {
                    if (o->count() > 0) dst = src;
                };
                take(o_problem, file.problem, cfg.problem);
                take(o_n, file.n, cfg.n);
                take(o_p, file.density, cfg.density);
                take(o_items, file.items, cfg.items);
                take(o_sector, file.sector, cfg.sector);
                take(o_seed, file.seed, cfg.seed);
                take(o_seeds, file.seeds, cfg.seeds);
                take(o_inst, file.instances, cfg.instances);
                take(o_alg, file.algorithms, cfg.algorithms);
                take(o_T, file.times, cfg.times);
                take(o_policy, file.policy, cfg.policy);
                take(o_ckpt, file.checkpoints, cfg.checkpoints);
                take(o_atol, file.atol, cfg.atol);
                take(o_rtol, file.rtol, cfg.rtol);
                if (o_lambda->count() > 0) file.lambda = lambda;
                if (o_eps->count() > 0) file.eps = eps;
                cfg = std::move(file);
            } else {
                cfg.lambda = lambda;
                cfg.eps = eps;
            }
            return run_command(cfg, out_dir);
        }
        if (*gen) {
            const auto g = generate(cfg, cfg.seed);
            const std::string text = instance_to_json(g.instance).dump(2) + "\n";
            if (gen_out.empty()) std::cout << text;
            else write_text(gen_out, text);
            return kExitOk;
        }
        if (*cmp) {
            const auto a = read_runs(file_a, variant_a, cmp_T);
            const auto b = read_runs(file_b.empty() ? file_a : file_b, variant_b, cmp_T);
            const std::string text = to_json(compare(a, b)).dump(2) + "\n";
            if (cmp_out.empty()) std::cout << text;
            else write_text(cmp_out, text);
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "qchop: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
