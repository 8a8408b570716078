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
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qchop/common.hpp"
#include "qchop/hilbert.hpp"
#include "qchop/polynomial.hpp"

namespace qchop {

/// Projector |pattern><pattern| on the qubits in `mask`: evaluates to 1 when
/// (x & mask) == pattern and to 0 otherwise. Equality constraints are sums of
/// these, so they are nonnegative and vanish exactly on feasible bitstrings.
struct EqualityProjector {
    Bits mask = 0;
    Bits pattern = 0;

    int evaluate(Bits x) const { return (x & mask) == pattern ? 1 : 0; }
    bool operator==(const EqualityProjector&) const = default;
};

/// minimize objective(x) subject to sum of equality projectors = 0 and
/// D(x) >= 0 for every inequality form.
struct ConstrainedProblem {
    std::string kind;
    int n_vars = 0;
    ZPolynomial objective;
    std::vector<EqualityProjector> equalities;
    std::vector<AffineForm> inequalities;
    std::optional<Bits> worst_feasible;

    int equality_violation(Bits x) const {
        int v = 0;
        for (const auto& e : equalities) v += e.evaluate(x);
        return v;
    }

    bool is_feasible(Bits x) const {
        if (equality_violation(x) != 0) return false;
        for (const auto& d : inequalities)
            if (d.evaluate(x) < 0) return false;
        return true;
    }

    /// Inequality forms after division by the gcd of their coefficients.
    std::vector<AffineForm> normalized_inequalities() const {
        std::vector<AffineForm> out;
        out.reserve(inequalities.size());
        for (const auto& d : inequalities) out.push_back(d.gcd_normalized());
        return out;
    }
};

struct OracleResult {
    std::vector<Bits> feasible_set;  // ascending
    double best_energy = 0.0;        // min objective over feasible states
    double worst_energy = 0.0;       // max objective over feasible states
    std::vector<Bits> argmin;
    std::vector<Bits> argmax;
    std::size_t n_states = 0;

    bool all_feasible() const { return feasible_set.size() == n_states; }

    /// Approximation ratio of a feasible objective value: 1 at best, 0 at worst.
    double ratio(double energy) const { return (energy - worst_energy) / (best_energy - worst_energy); }
};

/// Tie tolerance for classifying states as optimal in ratio units.
inline constexpr double kRatioTieTolerance = 1e-9;

inline void validate_problem(const ConstrainedProblem& p) {
    if (p.n_vars < 0 || p.n_vars > 40) throw ConfigError("problem: variable count out of range");
    const Bits mask = all_ones(p.n_vars);
    if ((p.objective.support() & ~mask) != 0) throw ConfigError("problem: objective references unknown variable");
    for (const auto& e : p.equalities) {
        if ((e.mask & ~mask) != 0 || (e.pattern & ~e.mask) != 0) throw ConfigError("problem: malformed projector");
    }
    for (const auto& d : p.inequalities) {
        for (const auto& [j, c] : d.linear)
            if (j < 0 || j >= p.n_vars) throw ConfigError("problem: inequality references unknown variable");
    }
    if (p.worst_feasible) {
        if ((*p.worst_feasible & ~mask) != 0) throw ConfigError("problem: worst state out of range");
        if (p.n_vars <= 20 && !p.is_feasible(*p.worst_feasible)) {
            throw ConfigError("problem: designated worst state is infeasible");
        }
    }
}

/// Exhaustive enumeration of all 2^n assignments.
inline OracleResult brute_force_solve(const ConstrainedProblem& p) {
    if (p.n_vars > 24) throw ConfigError("brute_force_solve: too many variables");
    OracleResult res;
    res.n_states = std::size_t{1} << p.n_vars;
    std::vector<double> energies;
    for (Bits x = 0; x < res.n_states; ++x) {
        if (!p.is_feasible(x)) continue;
        res.feasible_set.push_back(x);
        energies.push_back(p.objective.evaluate(x));
    }
    if (res.feasible_set.empty()) throw InstanceRejected("no feasible assignment");
    res.best_energy = *std::min_element(energies.begin(), energies.end());
    res.worst_energy = *std::max_element(energies.begin(), energies.end());
    const double scale = std::max({1.0, std::abs(res.best_energy), std::abs(res.worst_energy)});
    if (res.worst_energy - res.best_energy <= 1e-12 * scale) {
        throw InstanceRejected("objective is constant on the feasible set");
    }
    for (std::size_t k = 0; k < energies.size(); ++k) {
        const double r = res.ratio(energies[k]);
        if (r >= 1.0 - kRatioTieTolerance) res.argmin.push_back(res.feasible_set[k]);
        if (r <= kRatioTieTolerance) res.argmax.push_back(res.feasible_set[k]);
    }
    return res;
}

/// Rejects instances on which every assignment is feasible.
inline void require_constrained(const OracleResult& oracle) {
    if (oracle.all_feasible()) throw InstanceRejected("every assignment is feasible");
}

/// Allowed slack values for D(x) >= 0: the residue class of the constant
/// modulo gcd of the variable coefficients, clipped to [0, Dmax] where Dmax is
/// the constant plus the sum of the positive coefficients.
inline std::vector<long long> slack_value_set(const AffineForm& d) {
    if (d.linear.empty()) throw InstanceRejected("constant inequality constraint");
    const long long g = d.linear_gcd();
    long long dmax = d.constant;
    for (const auto& [j, c] : d.linear)
        if (c > 0) dmax += c;
    if (dmax < 0) throw InstanceRejected("inequality constraint can never be satisfied");
    std::vector<long long> values;
    for (long long v = ((d.constant % g) + g) % g; v <= dmax; v += g) values.push_back(v);
    return values;
}

/// Qubits for the decision variables plus one pruned slack qudit per inequality.
inline CompositeSpace composite_space(const ConstrainedProblem& p) {
    std::vector<std::vector<long long>> slack;
    for (const auto& d : p.normalized_inequalities()) slack.push_back(slack_value_set(d));
    return CompositeSpace(p.n_vars, std::move(slack));
}

/// Sum of equality projectors plus sum_D (D(x) - n_D)^2 over the composite
/// basis, using gcd-normalized inequality forms. Zero exactly on feasible
/// composite states (feasible qubit part and slack values equal to D(x)).
inline std::vector<double> constraint_diagonal(const ConstrainedProblem& p, const CompositeSpace& space) {
    if (space.n_qubits() != p.n_vars || space.n_slack() != p.inequalities.size()) {
        throw ConfigError("constraint_diagonal: space does not match problem");
    }
    const auto forms = p.normalized_inequalities();
    const std::size_t q = space.qubit_dimension();
    std::vector<double> qubit_part(q);
    std::vector<std::vector<long long>> dvals(forms.size(), std::vector<long long>(q));
    for (Bits x = 0; x < q; ++x) {
        qubit_part[x] = p.equality_violation(x);
        for (std::size_t d = 0; d < forms.size(); ++d) dvals[d][x] = forms[d].evaluate(x);
    }
    std::vector<double> diag(space.dimension());
    for (std::size_t b = 0; b < space.slack_dimension(); ++b) {
        // Decode the slack block once.
        std::vector<long long> nvals(forms.size());
        std::size_t rest = b;
        for (std::size_t d = 0; d < forms.size(); ++d) {
            nvals[d] = space.slack_values(d)[rest % space.slack_dim(d)];
            rest /= space.slack_dim(d);
        }
        for (Bits x = 0; x < q; ++x) {
            double v = qubit_part[x];
            for (std::size_t d = 0; d < forms.size(); ++d) {
                const double diff = static_cast<double>(dvals[d][x] - nvals[d]);
                v += diff * diff;
            }
            diag[b * q + x] = v;
        }
    }
    return diag;
}

}  // namespace qchop
