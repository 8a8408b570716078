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

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "qchop/common.hpp"
#include "qchop/evolve.hpp"
#include "qchop/hilbert.hpp"
#include "qchop/problem.hpp"

namespace qchop {

struct MetricPoint {
    double t = 0.0;
    double r = 0.0;       // feasibility-projected approximation ratio
    double p_feas = 0.0;  // probability of a zero-penalty composite state
    double p_opt = 0.0;   // probability of a feasible optimum
    double p_eps = 0.0;   // probability of a feasible state with ratio >= 1 - eps
};

struct RunMetadata {
    std::string instance_id;
    std::string problem;
    int n = 0;
    std::string variant;
    std::string policy;
    double lambda = 0.0;
    double total_time = 0.0;
    std::uint64_t seed = 0;
    double norm = 1.0;
    double eps = 0.0;
};

struct MetricsReport {
    RunMetadata meta;
    std::vector<MetricPoint> points;
    IntegratorStats stats;
    double max_norm_drift = 0.0;

    const MetricPoint& final_point() const {
        if (points.empty()) throw ConfigError("MetricsReport: no checkpoints");
        return points.back();
    }
};

/// Default epsilon for the P_eps observable.
inline double default_eps(const std::string& problem_kind) { return problem_kind == "etf" ? 0.01 : 0.0; }

/// Per-basis-state lookup tables, so that each checkpoint costs one pass over
/// the amplitudes.
class MetricEvaluator {
  public:
    MetricEvaluator(const ConstrainedProblem& p, const OracleResult& oracle, const CompositeSpace& space, double eps)
        : eps_(eps) {
        if (!(eps >= 0.0)) throw ConfigError("eps must be nonnegative");
        const auto con = constraint_diagonal(p, space);
        const std::size_t q = space.qubit_dimension();
        std::vector<double> ratio_q(q, 0.0);
        for (Bits x : oracle.feasible_set) ratio_q[x] = oracle.ratio(p.objective.evaluate(x));
        feasible_.resize(space.dimension());
        ratio_.resize(space.dimension());
        for (std::size_t i = 0; i < space.dimension(); ++i) {
            feasible_[i] = con[i] == 0.0;
            ratio_[i] = feasible_[i] ? ratio_q[i & (q - 1)] : 0.0;
        }
    }

    double eps() const { return eps_; }

    MetricPoint evaluate(double t, std::span<const Complex> psi) const {
        if (psi.size() != feasible_.size()) throw ConfigError("MetricEvaluator: dimension mismatch");
        MetricPoint m;
        m.t = t;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            if (!feasible_[i]) continue;
            const double w = std::norm(psi[i]);
            const double r = ratio_[i];
            m.p_feas += w;
            m.r += w * r;
            if (r >= 1.0 - kRatioTieTolerance) m.p_opt += w;
            if (r >= 1.0 - eps_ - kRatioTieTolerance) m.p_eps += w;
        }
        return m;
    }

  private:
    double eps_;
    std::vector<char> feasible_;
    std::vector<double> ratio_;
};

inline double approx_ratio(const StateVector& psi, const ConstrainedProblem& p, const OracleResult& oracle) {
    return MetricEvaluator(p, oracle, psi.space, 0.0).evaluate(0.0, psi.amplitudes).r;
}

inline double feasible_prob(const StateVector& psi, const ConstrainedProblem& p, const OracleResult& oracle) {
    return MetricEvaluator(p, oracle, psi.space, 0.0).evaluate(0.0, psi.amplitudes).p_feas;
}

inline double optimal_prob(const StateVector& psi, const ConstrainedProblem& p, const OracleResult& oracle) {
    return MetricEvaluator(p, oracle, psi.space, 0.0).evaluate(0.0, psi.amplitudes).p_opt;
}

inline double eps_optimal_prob(const StateVector& psi, const ConstrainedProblem& p, const OracleResult& oracle,
                               double eps) {
    return MetricEvaluator(p, oracle, psi.space, eps).evaluate(0.0, psi.amplitudes).p_eps;
}

/// Same observables from the measurement distribution, classifying each
/// outcome by decoding it and checking the constraints directly.
inline MetricPoint metrics_from_histogram(const std::vector<double>& probabilities, const CompositeSpace& space,
                                          const ConstrainedProblem& p, const OracleResult& oracle, double eps) {
    if (probabilities.size() != space.dimension()) throw ConfigError("histogram: dimension mismatch");
    const auto forms = p.normalized_inequalities();
    MetricPoint m;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const auto outcome = space.decode(i);
        bool ok = p.is_feasible(outcome.qubits);
        for (std::size_t d = 0; ok && d < forms.size(); ++d) {
            ok = space.slack_values(d)[outcome.digits[d]] == forms[d].evaluate(outcome.qubits);
        }
        if (!ok) continue;
        const double w = probabilities[i];
        const double r = oracle.ratio(p.objective.evaluate(outcome.qubits));
        m.p_feas += w;
        m.r += w * r;
        if (r >= 1.0 - kRatioTieTolerance) m.p_opt += w;
        if (r >= 1.0 - eps - kRatioTieTolerance) m.p_eps += w;
    }
    return m;
}

/// Violations of the range and ordering invariants, empty when all hold.
inline std::vector<std::string> invariant_violations(const MetricsReport& rep, double tol = 1e-9) {
    std::vector<std::string> out;
    for (const auto& m : rep.points) {
        auto flag = [&](const char* what) {
            std::ostringstream msg;
            msg << what << " at t = " << m.t;
            out.push_back(msg.str());
        };
        for (double v : {m.r, m.p_feas, m.p_opt, m.p_eps})
            if (v < -tol || v > 1.0 + tol) flag("metric outside [0, 1]");
        if (m.p_opt > m.p_eps + tol) flag("P_opt exceeds P_eps");
        if (m.p_eps > m.p_feas + tol) flag("P_eps exceeds P_feas");
        if (m.r > m.p_feas + tol) flag("r exceeds P_feas");
    }
    if (rep.max_norm_drift > kNormDriftLimit) out.push_back("norm drift above limit");
    return out;
}

}  // namespace qchop
