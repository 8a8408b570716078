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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qchop/encoders.hpp"
#include "qchop/evolve.hpp"
#include "qchop/hamiltonians.hpp"
#include "qchop/metrics.hpp"

namespace qchop {

struct IntegrationSettings {
    int checkpoints = 101;
    double atol = 1e-8;
    double rtol = 1e-8;
};

/// Evolves `prog` from `psi0` and samples every checkpoint with `metrics`.
inline MetricsReport run_program(const HamiltonianProgram& prog, const StateVector& psi0,
                                 const MetricEvaluator& metrics, const IntegrationSettings& settings,
                                 RunMetadata meta = {}) {
    MetricsReport rep;
    meta.variant = to_string(prog.variant());
    meta.policy = to_string(prog.policy());
    meta.lambda = prog.lambda();
    meta.total_time = prog.total_time();
    meta.norm = prog.normalization().norm;
    meta.eps = metrics.eps();
    rep.meta = std::move(meta);
    const auto sched = Schedule::uniform(prog.total_time(), settings.checkpoints, settings.atol, settings.rtol);
    rep.points.reserve(sched.checkpoints.size());
    const auto traj = evolve(prog, psi0, sched, [&](std::size_t, double t, const StateVector& psi) {
        rep.points.push_back(metrics.evaluate(t, psi.amplitudes));
    });
    rep.stats = traj.stats;
    rep.max_norm_drift = traj.max_norm_drift;
    return rep;
}

/// One (instance, variant, T) combination.
struct WorkItem {
    std::string instance_id;
    Instance instance;
    Variant variant = Variant::qchop;
    double total_time = 1.0;
    std::optional<double> lambda;  // defaults to the qubit count
    std::optional<double> eps;     // defaults per problem kind
    RotationPolicy policy = RotationPolicy::automatic;
    IntegrationSettings integration;
    std::uint64_t seed = 0;
};

/// Encodes, solves exhaustively, builds the program and integrates.
inline MetricsReport run_one(const WorkItem& item) {
    const ConstrainedProblem p = encode(item.instance);
    const OracleResult oracle = brute_force_solve(p);
    require_constrained(oracle);
    const CompositeSpace space = composite_space(p);
    const auto [obj, norm] = normalize_objective(p.objective);
    const double lambda = choose_lambda(space, norm, item.lambda);
    const double eps = item.eps.value_or(default_eps(p.kind));
    RunMetadata meta;
    meta.instance_id = item.instance_id;
    meta.problem = p.kind;
    meta.n = p.n_vars;
    meta.seed = item.seed;
    const MetricEvaluator metrics(p, oracle, space, eps);
    switch (item.variant) {
        case Variant::qchop:
        case Variant::qchop_cd: {
            const auto prog = build_qchop(p, lambda, item.total_time,
                                          QchopOptions{item.variant == Variant::qchop_cd, item.policy});
            return run_program(prog, qchop_initial_state(p, space), metrics, item.integration, meta);
        }
        case Variant::saa: {
            const auto prog = build_saa(p, lambda, item.total_time);
            return run_program(prog, saa_initial_state(space), metrics, item.integration, meta);
        }
        case Variant::yww:
            break;
    }
    throw ConfigError("run_one: variant " + to_string(item.variant) + " is not runnable from an instance");
}

struct RunOutcome {
    std::size_t index = 0;
    std::optional<MetricsReport> report;
    std::string error;  // set when the run failed

    bool ok() const { return report.has_value(); }
};

/// Worker count: QCHOP_THREADS when set, else the hardware concurrency.
inline unsigned sweep_thread_count(std::size_t work) {
    unsigned n = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QCHOP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

/// Runs every item; failures are recorded per item. Output order follows the
/// input order regardless of scheduling.
inline std::vector<RunOutcome> sweep(const std::vector<WorkItem>& items, unsigned threads = 0) {
    std::vector<RunOutcome> out(items.size());
    if (items.empty()) return out;
    if (threads == 0) threads = sweep_thread_count(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < items.size(); k = next++) {
            out[k].index = k;
            try {
                out[k].report = run_one(items[k]);
            } catch (const std::exception& e) {
                out[k].error = e.what();
            }
        }
    };
    if (threads == 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

inline Summary summarize(const std::vector<double>& v) {
    Summary s;
    if (v.empty()) return s;
    s.count = v.size();
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    return s;
}

/// Final-time statistics across the reports of one (variant, T) group.
struct Aggregate {
    std::string variant;
    double total_time = 0.0;
    Summary r, p_feas, p_opt, p_eps;
};

inline std::vector<Aggregate> aggregate(const std::vector<MetricsReport>& reports) {
    std::map<std::pair<std::string, double>, std::vector<const MetricsReport*>> groups;
    for (const auto& rep : reports) groups[{rep.meta.variant, rep.meta.total_time}].push_back(&rep);
    std::vector<Aggregate> out;
    for (const auto& [key, members] : groups) {
        Aggregate a;
        a.variant = key.first;
        a.total_time = key.second;
        std::vector<double> r, pf, po, pe;
        for (const auto* rep : members) {
            const auto& m = rep->final_point();
            r.push_back(m.r);
            pf.push_back(m.p_feas);
            po.push_back(m.p_opt);
            pe.push_back(m.p_eps);
        }
        a.r = summarize(r);
        a.p_feas = summarize(pf);
        a.p_opt = summarize(po);
        a.p_eps = summarize(pe);
        out.push_back(std::move(a));
    }
    return out;
}

struct PairedDelta {
    std::string instance_id;
    double delta_r = 0.0;      // A minus B at t = T
    double delta_p_opt = 0.0;  // A minus B at t = T
};

struct Tally {
    int wins = 0;
    int losses = 0;
    int ties = 0;
};

struct Comparison {
    std::vector<PairedDelta> deltas;  // ordered by instance id
    Tally r;
    Tally p_opt;
};

/// Differences below this count as ties.
inline constexpr double kCompareTieTolerance = 1e-9;

/// Pairs reports by instance id. Both sides must cover the same instances,
/// each exactly once.
inline Comparison compare(const std::vector<MetricsReport>& a, const std::vector<MetricsReport>& b) {
    auto index = [](const std::vector<MetricsReport>& reps, const char* side) {
        std::map<std::string, const MetricsReport*> m;
        for (const auto& rep : reps) {
            if (!m.emplace(rep.meta.instance_id, &rep).second) {
                throw ConfigError(std::string("compare: duplicate instance '") + rep.meta.instance_id + "' in " + side);
            }
        }
        return m;
    };
    const auto ia = index(a, "first set");
    const auto ib = index(b, "second set");
    if (ia.size() != ib.size()) throw ConfigError("compare: instance sets differ");
    Comparison cmp;
    auto tally = [](Tally& t, double d) {
        if (d > kCompareTieTolerance) ++t.wins;
        else if (d < -kCompareTieTolerance) ++t.losses;
        else ++t.ties;
    };
    for (const auto& [id, ra] : ia) {
        const auto it = ib.find(id);
        if (it == ib.end()) throw ConfigError("compare: instance '" + id + "' missing from second set");
        const auto& fa = ra->final_point();
        const auto& fb = it->second->final_point();
        PairedDelta d{id, fa.r - fb.r, fa.p_opt - fb.p_opt};
        tally(cmp.r, d.delta_r);
        tally(cmp.p_opt, d.delta_p_opt);
        cmp.deltas.push_back(d);
    }
    return cmp;
}

}  // namespace qchop
