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

// Acceptance suite. Prints one PASS/FAIL line per criterion (detail lines are
// indented) and exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>

#include "test_support.hpp"

namespace qchop {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failed = 0;
std::vector<MetricsReport> g_reports;  // every run, for the norm and chain check

void verdict(const char* id, bool ok, const std::string& what) {
    std::printf("%s %s %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failed;
}

void detail(const std::string& line) {
    std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double two_pi_n(int n) { return 2 * kPi * n; }
double two_pi_n2(int n) { return 2 * kPi * n * n; }

using Generator = std::function<Instance(std::uint64_t seed)>;

// Final reports keyed by variant, each ordered by seed. Throws on any failed run.
std::map<Variant, std::vector<MetricsReport>> run_ensemble(const std::string& label, const Generator& gen,
                                                           int count, const std::vector<Variant>& variants,
                                                           double total_time) {
    std::vector<WorkItem> items;
    for (int s = 0; s < count; ++s) {
        const Instance inst = gen(static_cast<std::uint64_t>(s));
        for (Variant v : variants) {
            WorkItem w;
            w.instance_id = label + "-s" + std::to_string(s);
            w.instance = inst;
            w.variant = v;
            w.total_time = total_time;
            w.seed = static_cast<std::uint64_t>(s);
            items.push_back(std::move(w));
        }
    }
    const auto t0 = Clock::now();
    const auto outs = sweep(items);
    std::map<Variant, std::vector<MetricsReport>> by_variant;
    for (std::size_t k = 0; k < outs.size(); ++k) {
        if (!outs[k].ok()) throw std::runtime_error(items[k].instance_id + " " + to_string(items[k].variant) + ": " + outs[k].error);
        by_variant[items[k].variant].push_back(*outs[k].report);
        g_reports.push_back(*outs[k].report);
    }
    detail(fmt("%s: %zu runs at T=%.6g in %.1f s", label.c_str(), items.size(), total_time, seconds_since(t0)));
    return by_variant;
}

double final_r(const MetricPoint& m) { return m.r; }
double final_p_opt(const MetricPoint& m) { return m.p_opt; }

void print_pairs(const std::vector<MetricsReport>& a, const std::vector<MetricsReport>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& fa = a[k].final_point();
        const auto& fb = b[k].final_point();
        detail(fmt("%-14s r %.6f vs %.6f   P_opt %.6f vs %.6f   P_eps %.6f vs %.6f", a[k].meta.instance_id.c_str(),
                   fa.r, fb.r, fa.p_opt, fb.p_opt, fa.p_eps, fb.p_eps));
    }
}

// ---------------------------------------------------------------------------

void ac1_oracle() {
    const auto t0 = Clock::now();
    int checked = 0;
    std::string first_mismatch;
    auto check = [&](const Instance& inst, bool integral, const std::string& label) {
        const auto o = brute_force_solve(encode(inst));
        const auto ref = testing::reference_solve(inst);
        bool ok = o.feasible_set == ref.feasible;
        if (integral) {
            ok = ok && o.best_energy == ref.best && o.worst_energy == ref.worst;
        } else {
            const double scale = std::max({1.0, std::abs(ref.best), std::abs(ref.worst)});
            ok = ok && std::abs(o.best_energy - ref.best) <= 1e-9 * scale &&
                 std::abs(o.worst_energy - ref.worst) <= 1e-9 * scale;
        }
        ++checked;
        if (!ok && first_mismatch.empty()) first_mismatch = label;
    };
    for (std::uint64_t s = 0; s < 50; ++s) {
        const int graph_n = 3 + static_cast<int>(s % 6);  // 3..8
        const int small_n = 2 + static_cast<int>(s % 5);  // 2..6
        check(gen_mis_instance(graph_n, 0.3, s).instance, true, "mis seed " + std::to_string(s));
        check(gen_dmds_instance(graph_n, 0.3, s).instance, true, "dmds seed " + std::to_string(s));
        check(gen_knapsack_uniform(small_n, s).instance, true, "knapsack seed " + std::to_string(s));
        check(gen_auction_instance(small_n, 3, s).instance, false, "auction seed " + std::to_string(s));
        check(gen_etf_instance(small_n, s).instance, false, "etf seed " + std::to_string(s));
    }
    const double secs = seconds_since(t0);
    const bool ok = first_mismatch.empty() && secs < 60.0;
    verdict("AC1", ok,
            fmt("oracle equivalence: %d instances (50 per family), %s, %.2f s (limit 60 s)", checked,
                first_mismatch.empty() ? "all match" : ("first mismatch " + first_mismatch).c_str(), secs));
}

DenseMatrix diag_matrix(const std::vector<double>& d, double coef) {
    DenseMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = coef * d[i];
    return m;
}

void ac2_operators() {
    constexpr double kTol = 1e-12;
    double worst_endpoint = 0.0, worst_saa = 0.0, worst_yww = 0.0;
    std::vector<Instance> instances{gen_mis_instance(10, 0.3, 0).instance, gen_dmds_instance(6, 0.3, 1).instance,
                                    gen_knapsack_uniform(4, 2).instance, gen_auction_instance(6, 3, 3).instance,
                                    gen_etf_instance(5, 4).instance};
    for (const auto& inst : instances) {
        const auto p = encode(inst);
        const auto space = composite_space(p);
        if (space.dimension() > 1024) throw std::runtime_error("AC2 instance too large: " + kind_name(inst));
        const double lambda = p.n_vars;
        const double T = 3.0;
        const auto obj = objective_diagonal(normalize_objective(p.objective).first, space);
        const auto con = constraint_diagonal(p, space);
        std::vector<RotationPolicy> policies{RotationPolicy::automatic, RotationPolicy::per_term, RotationPolicy::hybrid};
        for (auto policy : policies) {
            const auto prog = build_qchop(p, lambda, T, {false, policy});
            DenseMatrix at0 = diag_matrix(con, 1.0);
            at0 += diag_matrix(obj, -1.0 / lambda);
            DenseMatrix atT = diag_matrix(con, 1.0);
            atT += diag_matrix(obj, 1.0 / lambda);
            worst_endpoint = std::max({worst_endpoint, prog.operator_at(0.0).max_abs_diff(at0),
                                       prog.operator_at(T).max_abs_diff(atT)});
        }
        const auto saa = build_saa(p, lambda, 5.0).operator_at(5.0);
        worst_saa = std::max(worst_saa, saa.max_abs_diff(build_qchop(p, lambda, T).operator_at(T)));
    }
    for (std::uint64_t s = 0; s < 4; ++s) {
        const Graph g = std::get<MisInstance>(gen_mis_instance(3 + static_cast<int>(s), 0.4, s).instance).graph;
        const double lambda = g.n;
        const double T = 4.0 * g.n * g.n;
        const auto prog = build_qchop(encode_mis(g), lambda, T);
        for (double u : {0.0, 0.2, 0.5, 0.9, 1.0}) {
            DenseMatrix four = prog.operator_at(u * T);
            four *= 4.0;
            worst_yww = std::max(worst_yww, build_yww(g, -4.0 / lambda, prog.theta(u * T), 0.0).max_abs_diff(four));
        }
    }
    detail(fmt("rotation endpoints max |diff| %.3g, SAA(T) vs Q-CHOP(pi) %.3g, rotating-frame identity %.3g",
               worst_endpoint, worst_saa, worst_yww));
    verdict("AC2", worst_endpoint <= kTol && worst_saa <= kTol && worst_yww <= kTol,
            fmt("operator identities within %.0e", kTol));
}

void ac4_ac10_mis() {
    const int n = 10;
    const Generator gen = [n](std::uint64_t s) { return gen_mis_instance(n, 0.3, s).instance; };
    const auto long_runs = run_ensemble("mis10", gen, 10, {Variant::qchop, Variant::saa}, two_pi_n2(n));
    const auto& q = long_runs.at(Variant::qchop);
    const auto& a = long_runs.at(Variant::saa);
    print_pairs(q, a);
    const double qp = testing::mean_final(q, final_p_opt), ap = testing::mean_final(a, final_p_opt);
    const double qr = testing::mean_final(q, final_r), ar = testing::mean_final(a, final_r);
    verdict("AC4", qp > ap && qr > ar,
            fmt("MIS n=10, T=2piN^2: mean P_opt %.4f vs SAA %.4f, mean r %.4f vs SAA %.4f", qp, ap, qr, ar));

    const auto short_runs = run_ensemble("mis10", gen, 10, {Variant::qchop, Variant::saa}, two_pi_n(n));
    const double qp_short = testing::mean_final(short_runs.at(Variant::qchop), final_p_opt);
    const double ap_short = testing::mean_final(short_runs.at(Variant::saa), final_p_opt);
    verdict("AC10", qp > qp_short && qp > ap && qp_short > ap_short,
            fmt("runtime scaling: Q-CHOP mean P_opt %.4f at 2piN^2 vs %.4f at 2piN (margin %.4f); SAA %.4f and %.4f",
                qp, qp_short, qp - qp_short, ap, ap_short));
}

void ac5_dmds() {
    const int n = 10;
    const auto runs = run_ensemble(
        "dmds10", [n](std::uint64_t s) { return gen_dmds_instance(n, 0.3, s).instance; }, 10,
        {Variant::qchop, Variant::saa}, two_pi_n2(n));
    const auto& q = runs.at(Variant::qchop);
    const auto& a = runs.at(Variant::saa);
    print_pairs(q, a);
    const double qp = testing::mean_final(q, final_p_opt), ap = testing::mean_final(a, final_p_opt);
    const double qr = testing::mean_final(q, final_r), ar = testing::mean_final(a, final_r);
    verdict("AC5", qp > ap && qr > ar,
            fmt("DMDS n=10, T=2piN^2: mean P_opt %.4f vs SAA %.4f, mean r %.4f vs SAA %.4f", qp, ap, qr, ar));
}

void ac6_knapsack() {
    const int n = 6;
    const auto runs = run_ensemble(
        "knapsack6", [n](std::uint64_t s) { return gen_knapsack_uniform(n, s).instance; }, 10,
        {Variant::qchop, Variant::saa}, two_pi_n2(n));
    const auto& q = runs.at(Variant::qchop);
    const auto& a = runs.at(Variant::saa);
    print_pairs(q, a);
    int dominated = 0;
    std::string losers;
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (q[k].final_point().p_opt >= a[k].final_point().p_opt) ++dominated;
        else losers += " " + q[k].meta.instance_id;
    }
    const double qp = testing::mean_final(q, final_p_opt), ap = testing::mean_final(a, final_p_opt);
    verdict("AC6", dominated == static_cast<int>(q.size()) && qp > ap,
            fmt("knapsack n=6, T=2piN^2: Q-CHOP P_opt >= SAA on %d/%zu instances%s%s; mean %.4f vs %.4f", dominated,
                q.size(), losers.empty() ? "" : ", losses:", losers.c_str(), qp, ap));
}

void ac7_auction() {
    const int n = 6;
    const auto runs = run_ensemble(
        "auction6", [n](std::uint64_t s) { return gen_auction_instance(n, 3, s).instance; }, 10,
        {Variant::qchop, Variant::saa}, two_pi_n2(n));
    const auto& q = runs.at(Variant::qchop);
    const auto& a = runs.at(Variant::saa);
    print_pairs(q, a);
    int wins = 0;
    for (std::size_t k = 0; k < q.size(); ++k) wins += q[k].final_point().r > a[k].final_point().r ? 1 : 0;
    verdict("AC7", wins == static_cast<int>(q.size()),
            fmt("auction 6 bids x 3 items, T=2piN^2: Q-CHOP r > SAA r on %d/%zu instances", wins, q.size()));
}

void ac8_etf() {
    const int n = 6;
    const auto runs = run_ensemble(
        "etf6", [n](std::uint64_t s) { return gen_etf_instance(n, s).instance; }, 10, {Variant::qchop, Variant::saa},
        two_pi_n2(n));
    const auto& q = runs.at(Variant::qchop);
    const auto& a = runs.at(Variant::saa);
    print_pairs(q, a);
    int wins = 0;
    double worst_eps_delta = 1.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        wins += q[k].final_point().r > a[k].final_point().r ? 1 : 0;
        const double d = q[k].final_point().p_eps - a[k].final_point().p_eps;
        worst_eps_delta = std::min(worst_eps_delta, d);
        detail(fmt("%-14s delta P_0.01 %+.6f", q[k].meta.instance_id.c_str(), d));
    }
    detail(fmt("min delta P_0.01 %+.6f (recorded, not gated)", worst_eps_delta));
    verdict("AC8", wins == static_cast<int>(q.size()),
            fmt("ETF n=6, eps=0.01, T=2piN^2: Q-CHOP r > SAA r on %d/%zu instances", wins, q.size()));
}

void ac9_leakage() {
    const int n = 8;
    const Instance inst = gen_mis_instance(n, 0.3, 0).instance;
    std::vector<WorkItem> items;
    for (double lambda : {n / 2.0, 1.0 * n, 2.0 * n, 4.0 * n}) {
        WorkItem w;
        w.instance_id = "mis8-s0";
        w.instance = inst;
        w.total_time = two_pi_n2(n);
        w.lambda = lambda;
        items.push_back(std::move(w));
    }
    const auto outs = sweep(items);
    std::vector<double> leak;
    std::string line;
    for (std::size_t k = 0; k < outs.size(); ++k) {
        if (!outs[k].ok()) throw std::runtime_error("AC9 run failed: " + outs[k].error);
        g_reports.push_back(*outs[k].report);
        leak.push_back(1.0 - outs[k].report->final_point().p_feas);
        line += fmt(" lambda=%g: %.3e", *items[k].lambda, leak.back());
    }
    detail("1 - P_feas(T):" + line);
    bool monotone = true;
    // Differences inside the integration tolerance are not a trend.
    for (std::size_t k = 1; k < leak.size(); ++k) monotone = monotone && leak[k] <= leak[k - 1] + 1e-9;
    verdict("AC9", monotone, "feasibility leakage non-increasing in lambda (MIS n=8, T=2piN^2)");
}

DenseMatrix spin_y(const CompositeSpace& space, double coef) {
    return materialize(space.dimension(), [&](std::span<const Complex> in, std::span<Complex> out) {
        std::fill(out.begin(), out.end(), Complex{0.0});
        add_global_spin(space.n_qubits(), Axis::y, coef, in, out);
    });
}

void ac11_counterdiabatic() {
    const int n = 8;
    const auto runs = run_ensemble(
        "mis8", [n](std::uint64_t s) { return gen_mis_instance(n, 0.3, s).instance; }, 10,
        {Variant::qchop, Variant::qchop_cd}, two_pi_n(n));
    const double plain = testing::mean_final(runs.at(Variant::qchop), final_p_opt);
    const double cd = testing::mean_final(runs.at(Variant::qchop_cd), final_p_opt);

    // The CD operator minus the plain one is exactly theta_dot S_y at both ends.
    double endpoint_diff = 0.0;
    const auto p = encode(gen_mis_instance(6, 0.3, 0).instance);
    const double T = two_pi_n(6);
    const auto plain_prog = build_qchop(p, 6, T);
    const auto cd_prog = build_qchop(p, 6, T, {true});
    for (double t : {0.0, T}) {
        DenseMatrix want = plain_prog.operator_at(t);
        want += spin_y(plain_prog.space(), kPi / T);
        endpoint_diff = std::max(endpoint_diff, cd_prog.operator_at(t).max_abs_diff(want));
    }
    detail(fmt("CD endpoint operators differ from plain + theta_dot S_y by %.3g", endpoint_diff));
    verdict("AC11", cd >= plain - 0.02 && endpoint_diff <= 1e-12,
            fmt("MIS n=8, T=2piN: mean P_opt with CD %.4f vs plain %.4f (allowed slack 0.02)", cd, plain));
}

// Evolves with `metrics` sampled at 101 checkpoints; returns the report and
// the final state.
std::pair<MetricsReport, StateVector> run_with_state(const HamiltonianProgram& prog, const StateVector& psi0,
                                                     const MetricEvaluator& metrics, const std::string& id) {
    MetricsReport rep;
    rep.meta.instance_id = id;
    rep.meta.variant = to_string(prog.variant());
    const auto traj = evolve(prog, psi0, Schedule::uniform(prog.total_time()), [&](std::size_t, double t, const StateVector& psi) {
        rep.points.push_back(metrics.evaluate(t, psi.amplitudes));
    });
    rep.stats = traj.stats;
    rep.max_norm_drift = traj.max_norm_drift;
    return {std::move(rep), traj.final_state};
}

// Two-stage procedure scored as measured: stage one runs on the relaxed
// problem from x_star; an outcome equal to an original optimum succeeds
// outright, and an outcome equal to an original worst state seeds the ordinary
// run. Success probability is p1_opt + p1_worst * p2_opt.
void ac12_relaxation() {
    std::mt19937_64 rng(12);
    int recovered = 0, worst_property = 0;
    const int count = 5;
    for (std::uint64_t s = 0; s < count; ++s) {
        const int n = 6;
        const auto p = encode(gen_mis_instance(n, 0.3, s).instance);
        const auto oracle = brute_force_solve(p);
        const auto space = composite_space(p);
        std::vector<Bits> candidates;
        for (Bits x : oracle.feasible_set)
            if (p.objective.evaluate(x) < oracle.worst_energy) candidates.push_back(x);
        const Bits x_star = candidates[rng() % candidates.size()];
        const auto sub = build_relaxed(p, x_star);
        const auto sub_oracle = brute_force_solve(sub);
        if (std::find(sub_oracle.argmax.begin(), sub_oracle.argmax.end(), x_star) != sub_oracle.argmax.end())
            ++worst_property;

        const double T = 4 * two_pi_n2(n);
        const MetricEvaluator original(p, oracle, space, 0.0);
        const std::string id = "mis6-s" + std::to_string(s);
        auto [first, psi] = run_with_state(build_qchop(sub, n, T), qchop_initial_state(sub, space), original, id + "-relaxed");
        const double p1_opt = first.final_point().p_opt;
        g_reports.push_back(std::move(first));
        const auto con = constraint_diagonal(p, space);
        const Bits qubit_mask = (Bits{1} << n) - 1;
        double p1_worst = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const Bits x = static_cast<Bits>(i) & qubit_mask;
            if (con[i] == 0.0 && p.objective.evaluate(x) == oracle.worst_energy) p1_worst += std::norm(psi[i]);
        }
        auto [second, unused] = run_with_state(build_qchop(p, n, T), qchop_initial_state(p, space), original, id + "-original");
        const double p2_opt = second.final_point().p_opt;
        g_reports.push_back(std::move(second));
        const double success = p1_opt + p1_worst * p2_opt;

        int degeneracy = 0;
        for (Bits x : oracle.feasible_set) degeneracy += p.objective.evaluate(x) == p.objective.evaluate(x_star) ? 1 : 0;
        detail(fmt("%s x_star=%llu (energy shared by %d feasible states): stage 1 P_opt %.4f P_worst %.4f, stage 2 "
                   "P_opt %.4f, success %.4f",
                   id.c_str(), static_cast<unsigned long long>(x_star), degeneracy, p1_opt, p1_worst, p2_opt, success));
        recovered += success > 0.5 ? 1 : 0;
    }
    verdict("AC12", recovered == count && worst_property == count,
            fmt("relaxation: optimum recovered with probability > 0.5 on %d/%d, x_star is a subproblem worst state on "
                "%d/%d",
                recovered, count, worst_property, count));
}

void ac3_invariants() {
    int bad = 0;
    double drift = 0.0;
    std::string first;
    for (const auto& rep : g_reports) {
        drift = std::max(drift, rep.max_norm_drift);
        const auto v = invariant_violations(rep);
        if (!v.empty()) {
            ++bad;
            if (first.empty()) first = rep.meta.instance_id + " " + rep.meta.variant + ": " + v.front();
        }
    }
    if (!first.empty()) detail("first violation: " + first);
    verdict("AC3", bad == 0,
            fmt("norm drift <= 1e-6 and P_opt <= P_eps <= P_feas on %zu runs (max drift %.3g, %d violating)",
                g_reports.size(), drift, bad));
}

// Reports every criterion covered by `body` as failed if it throws.
void guarded(std::initializer_list<const char*> ids, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        for (const char* id : ids) verdict(id, false, std::string("error: ") + e.what());
    }
}

}  // namespace
}  // namespace qchop

int main() {
    using namespace qchop;
    const auto t0 = Clock::now();
    guarded({"AC1"}, ac1_oracle);
    guarded({"AC2"}, ac2_operators);
    guarded({"AC4", "AC10"}, ac4_ac10_mis);
    guarded({"AC5"}, ac5_dmds);
    guarded({"AC6"}, ac6_knapsack);
    guarded({"AC7"}, ac7_auction);
    guarded({"AC8"}, ac8_etf);
    guarded({"AC9"}, ac9_leakage);
    guarded({"AC11"}, ac11_counterdiabatic);
    guarded({"AC12"}, ac12_relaxation);
    guarded({"AC3"}, ac3_invariants);
    std::printf("acceptance: %d failing criteria, %.0f s\n", g_failed, seconds_since(t0));
    return g_failed == 0 ? 0 : 1;
}
