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

// Time-dependent Hamiltonians for constrained adiabatic optimization.
//
// Q-CHOP keeps the constraint Hamiltonian on at all times and rotates the
// objective from -H_obj to +H_obj:
//
//     H(t) = H_con - lambda^{-1} H_obj(theta) S(theta) [+ theta' S_y],
//     theta = pi t / T,
//
// where H_obj(theta) conjugates Z factors by the global y rotation and
// S(theta) = 1 + sin(theta) prod_D T_D mixes slack values. The baseline SAA
// interpolates from a transverse-field driver to the penalized objective:
//
//     H(t) = -(1 - t/T) [S_x + sum_D |+><+|_D] + (t/T) [H_con + lambda^{-1} H_obj].
//
// Constant objective terms shift every energy uniformly and are dropped from
// all operators; metrics evaluate the full objective.

#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qchop/common.hpp"
#include "qchop/encoders.hpp"
#include "qchop/hilbert.hpp"
#include "qchop/polynomial.hpp"
#include "qchop/problem.hpp"

namespace qchop {

struct NormalizationReport {
    double norm = 1.0;                  // root mean square of nonconstant coefficients
    std::size_t coefficient_count = 0;  // number of nonconstant coefficients
    double lambda = 0.0;                // penalty factor chosen for the run
};

/// Divides every coefficient by sqrt(mean of c_S^2 over nonzero, nonconstant S).
inline std::pair<ZPolynomial, NormalizationReport> normalize_objective(const ZPolynomial& obj) {
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (const auto& [s, c] : obj.terms()) {
        if (s == 0) continue;
        sum_sq += c * c;
        ++count;
    }
    if (count == 0) throw InstanceRejected("objective is constant");
    NormalizationReport rep;
    rep.norm = std::sqrt(sum_sq / static_cast<double>(count));
    rep.coefficient_count = count;
    return {obj * (1.0 / rep.norm), rep};
}

/// Penalty factor: the qubit count unless overridden.
inline double choose_lambda(const CompositeSpace& space, const NormalizationReport& /*report*/,
                            std::optional<double> override_value = std::nullopt) {
    if (override_value) {
        if (!(*override_value > 0.0)) throw ConfigError("lambda must be positive");
        return *override_value;
    }
    return static_cast<double>(std::max(1, space.n_qubits()));
}

enum class Variant { qchop, qchop_cd, saa, yww };

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::qchop: return "qchop";
        case Variant::qchop_cd: return "qchop-cd";
        case Variant::saa: return "saa";
        case Variant::yww: return "yww";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "qchop") return Variant::qchop;
    if (s == "qchop-cd" || s == "qchop_cd" || s == "cd") return Variant::qchop_cd;
    if (s == "saa") return Variant::saa;
    if (s == "yww") return Variant::yww;
    throw ConfigError("unknown algorithm '" + s + "'");
}

/// How Z factors are rotated as theta runs from 0 to pi.
///   global_odd: conjugate every factor (requires an odd objective)
///   per_term:   rotate one factor per term, averaged over the choice
///   hybrid:     global for odd-cardinality terms, per_term for even ones
enum class RotationPolicy { automatic, global_odd, per_term, hybrid };

inline std::string to_string(RotationPolicy p) {
    switch (p) {
        case RotationPolicy::automatic: return "automatic";
        case RotationPolicy::global_odd: return "global-odd";
        case RotationPolicy::per_term: return "per-term";
        case RotationPolicy::hybrid: return "hybrid";
    }
    return "?";
}

inline RotationPolicy rotation_policy_from_string(const std::string& s) {
    if (s == "automatic" || s == "auto") return RotationPolicy::automatic;
    if (s == "global-odd") return RotationPolicy::global_odd;
    if (s == "per-term") return RotationPolicy::per_term;
    if (s == "hybrid") return RotationPolicy::hybrid;
    throw ConfigError("unknown rotation policy '" + s + "'");
}

/// coef * prod_{j in rotated}(cos Z_j + sin X_j) prod_{k in string \ rotated} Z_k
struct RotatedTerm {
    Bits string = 0;
    Bits rotated = 0;
    double coef = 0.0;
};

inline RotationPolicy resolve_policy(const ZPolynomial& obj, RotationPolicy policy) {
    if (policy == RotationPolicy::automatic) return obj.is_odd() ? RotationPolicy::global_odd : RotationPolicy::per_term;
    if (policy == RotationPolicy::global_odd && !obj.is_odd()) {
        throw ConfigError("global rotation requires an odd objective");
    }
    return policy;
}

/// Decomposes the nonconstant part of `obj` into rotated Pauli strings whose
/// sum equals obj at theta = 0 and -obj at theta = pi.
inline std::vector<RotatedTerm> rotation_terms(const ZPolynomial& obj, RotationPolicy policy) {
    policy = resolve_policy(obj, policy);
    std::vector<RotatedTerm> terms;
    for (const auto& [s, c] : obj.terms()) {
        if (s == 0) continue;
        const bool global = policy == RotationPolicy::global_odd ||
                            (policy == RotationPolicy::hybrid && popcount(s) % 2 == 1);
        if (global) {
            terms.push_back({s, s, 0.5 * c});
        } else {
            const double share = 0.5 * c / popcount(s);
            for (int j : bits_to_indices(s)) terms.push_back({s, bit(j), share});
        }
    }
    return terms;
}

struct QchopOptions {
    bool counterdiabatic = false;
    RotationPolicy policy = RotationPolicy::automatic;
};

class HamiltonianProgram;
inline HamiltonianProgram build_qchop(const ConstrainedProblem& p, double lambda, double total_time, QchopOptions opts = {});
inline HamiltonianProgram build_saa(const ConstrainedProblem& p, double lambda, double total_time);
inline HamiltonianProgram build_yww_program(const Graph& g, double phi_dot, double total_time);

class HamiltonianProgram {
  public:
    const CompositeSpace& space() const { return space_; }
    Variant variant() const { return variant_; }
    RotationPolicy policy() const { return policy_; }
    double lambda() const { return lambda_; }
    double total_time() const { return total_time_; }
    const NormalizationReport& normalization() const { return norm_; }
    const std::vector<double>& constraint_diag() const { return con_diag_; }
    const std::vector<RotatedTerm>& terms() const { return terms_; }
    bool has_mixer() const { return mixer_; }

    double theta(double t) const { return kPi * t / total_time_; }
    double theta_dot() const { return kPi / total_time_; }

    /// out = H(t) in. `out` is overwritten.
    void apply(double t, std::span<const Complex> in, std::span<Complex> out) const {
        if (in.size() != space_.dimension() || out.size() != in.size()) throw ConfigError("apply: dimension mismatch");
        std::fill(out.begin(), out.end(), Complex{0.0});
        switch (variant_) {
            case Variant::qchop:
            case Variant::qchop_cd: apply_qchop(t, in, out); break;
            case Variant::saa: apply_saa(t, in, out); break;
            case Variant::yww: apply_yww(t, in, out); break;
        }
    }

    /// out += coef * H_obj(theta) S(theta) in, the rotated (and mixed) objective.
    void add_rotated_objective(double theta, double coef, std::span<const Complex> in, std::span<Complex> out) const {
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        std::vector<Complex> mixed;
        std::span<const Complex> src = in;
        if (mixer_) {
            mixed.assign(in.begin(), in.end());
            add_slack_all_to_all(space_, s, in, mixed);
            src = mixed;
        }
        for (const auto& term : terms_) add_rotated_zstring(term.string, term.rotated, c, s, coef * term.coef, src, out);
    }

    DenseMatrix operator_at(double t) const {
        return materialize(space_.dimension(), [&](std::span<const Complex> in, std::span<Complex> out) {
            apply(t, in, out);
        });
    }

  private:
    friend HamiltonianProgram build_qchop(const ConstrainedProblem&, double, double, QchopOptions);
    friend HamiltonianProgram build_saa(const ConstrainedProblem&, double, double);
    friend HamiltonianProgram build_yww_program(const Graph&, double, double);

    void apply_qchop(double t, std::span<const Complex> in, std::span<Complex> out) const {
        add_diagonal(con_diag_, 1.0, in, out);
        add_rotated_objective(theta(t), -1.0 / lambda_, in, out);
        if (variant_ == Variant::qchop_cd) add_global_spin(space_.n_qubits(), Axis::y, theta_dot(), in, out);
    }

    void apply_saa(double t, std::span<const Complex> in, std::span<Complex> out) const {
        const double s = t / total_time_;
        const double driver = -(1.0 - s);
        if (driver != 0.0) {
            add_global_spin(space_.n_qubits(), Axis::x, driver, in, out);
            for (std::size_t d = 0; d < space_.n_slack(); ++d) add_slack_uniform_projector(space_, d, driver, in, out);
        }
        add_diagonal(problem_diag_, s, in, out);
    }

    void apply_yww(double t, std::span<const Complex> in, std::span<Complex> out) const {
        add_diagonal(con_diag_, 1.0, in, out);
        add_rotated_objective(theta(t), phi_dot_, in, out);
        add_global_spin(space_.n_qubits(), Axis::y, theta_dot(), in, out);
    }

    CompositeSpace space_;
    Variant variant_ = Variant::qchop;
    RotationPolicy policy_ = RotationPolicy::automatic;
    NormalizationReport norm_;
    double lambda_ = 1.0;
    double total_time_ = 1.0;
    double phi_dot_ = 0.0;
    bool mixer_ = false;
    std::vector<double> con_diag_;
    std::vector<double> problem_diag_;  // H_con + H_obj / lambda, SAA endpoint
    std::vector<RotatedTerm> terms_;
};

/// Q-CHOP program; the objective is normalized internally.
inline HamiltonianProgram build_qchop(const ConstrainedProblem& p, double lambda, double total_time,
                                      QchopOptions opts) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(total_time > 0.0)) throw ConfigError("total time must be positive");
    if (!p.worst_feasible) throw ConfigError("Q-CHOP needs a worst feasible state; relax the problem first");
    HamiltonianProgram prog;
    prog.space_ = composite_space(p);
    prog.variant_ = opts.counterdiabatic ? Variant::qchop_cd : Variant::qchop;
    auto [obj, rep] = normalize_objective(p.objective);
    rep.lambda = lambda;
    prog.norm_ = rep;
    prog.policy_ = resolve_policy(obj, opts.policy);
    prog.terms_ = rotation_terms(obj, prog.policy_);
    prog.lambda_ = lambda;
    prog.total_time_ = total_time;
    prog.mixer_ = prog.space_.n_slack() > 0;
    prog.con_diag_ = constraint_diagonal(p, prog.space_);
    return prog;
}

/// Nonconstant part of `obj` over the composite basis (slack digits ignored).
inline std::vector<double> objective_diagonal(const ZPolynomial& obj, const CompositeSpace& space) {
    const ZPolynomial body = obj.without_constant();
    const std::size_t q = space.qubit_dimension();
    std::vector<double> qd(q);
    for (Bits x = 0; x < q; ++x) qd[x] = body.evaluate(x);
    std::vector<double> diag(space.dimension());
    for (std::size_t i = 0; i < diag.size(); ++i) diag[i] = qd[i & (q - 1)];
    return diag;
}

/// Penalty-based standard adiabatic algorithm.
inline HamiltonianProgram build_saa(const ConstrainedProblem& p, double lambda, double total_time) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(total_time > 0.0)) throw ConfigError("total time must be positive");
    HamiltonianProgram prog;
    prog.space_ = composite_space(p);
    prog.variant_ = Variant::saa;
    auto [obj, rep] = normalize_objective(p.objective);
    rep.lambda = lambda;
    prog.norm_ = rep;
    prog.policy_ = RotationPolicy::automatic;
    prog.lambda_ = lambda;
    prog.total_time_ = total_time;
    prog.con_diag_ = constraint_diagonal(p, prog.space_);
    const auto od = objective_diagonal(obj, prog.space_);
    prog.problem_diag_.resize(od.size());
    for (std::size_t i = 0; i < od.size(); ++i) prog.problem_diag_[i] = prog.con_diag_[i] + od[i] / lambda;
    return prog;
}

/// Computational basis state |x_worst> with every slack at D(x_worst).
inline StateVector qchop_initial_state(const ConstrainedProblem& p, const CompositeSpace& space) {
    if (!p.worst_feasible) throw ConfigError("no worst feasible state");
    const Bits x = *p.worst_feasible;
    const auto forms = p.normalized_inequalities();
    std::vector<std::size_t> digits;
    for (std::size_t d = 0; d < forms.size(); ++d) {
        auto digit = space.digit_of(d, forms[d].evaluate(x));
        if (!digit) throw ConfigError("slack value of the worst state is not representable");
        digits.push_back(*digit);
    }
    return StateVector::basis(space, space.encode(x, digits));
}

/// |+>^N on the qubits and a uniform superposition over each slack range.
inline StateVector saa_initial_state(const CompositeSpace& space) {
    StateVector psi(space);
    const double a = 1.0 / std::sqrt(static_cast<double>(space.dimension()));
    std::fill(psi.amplitudes.begin(), psi.amplitudes.end(), Complex{a});
    return psi;
}

/// Subproblem with objective -(f - f(x_star))^2, whose worst feasible state is x_star.
inline ConstrainedProblem build_relaxed(const ConstrainedProblem& p, Bits x_star) {
    if (!p.is_feasible(x_star)) throw ConfigError("build_relaxed: x_star is infeasible");
    ConstrainedProblem sub = p;
    sub.kind = p.kind + "-relaxed";
    const ZPolynomial shifted = p.objective - ZPolynomial::constant(p.objective.evaluate(x_star));
    sub.objective = -(shifted * shifted);
    sub.worst_feasible = x_star;
    return sub;
}

/// Matrix-free form of the rotating-frame MIS Hamiltonian
/// 4 H_con + phi' R_y S_z R_y^dag + theta' S_y with theta = pi t / T.
inline HamiltonianProgram build_yww_program(const Graph& g, double phi_dot, double total_time) {
    if (!(total_time > 0.0)) throw ConfigError("total time must be positive");
    const ConstrainedProblem p = encode_mis(g);
    HamiltonianProgram prog;
    prog.space_ = composite_space(p);
    prog.variant_ = Variant::yww;
    prog.policy_ = RotationPolicy::global_odd;
    prog.total_time_ = total_time;
    prog.phi_dot_ = phi_dot;
    prog.lambda_ = -4.0 / phi_dot;
    prog.con_diag_ = constraint_diagonal(p, prog.space_);
    for (auto& v : prog.con_diag_) v *= 4.0;
    for (int j = 0; j < g.n; ++j) prog.terms_.push_back({bit(j), bit(j), 0.5});
    prog.norm_.coefficient_count = static_cast<std::size_t>(g.n);
    return prog;
}

/// Dense 4 H_con^MIS + phi' R_y(theta) S_z R_y(theta)^dag + theta' S_y, built
/// from explicit Kronecker-product rotations. Test-scale only (n <= 8).
inline DenseMatrix build_yww(const Graph& g, double phi_dot, double theta, double theta_dot) {
    if (g.n > 8) throw ConfigError("build_yww: at most 8 vertices");
    detail::check_graph(g, false);
    const int n = g.n;
    const std::size_t dim = std::size_t{1} << n;

    // Single-qubit exp(-i theta Y / 2).
    const double ch = std::cos(theta / 2), sh = std::sin(theta / 2);
    const double r1[2][2] = {{ch, -sh}, {sh, ch}};
    DenseMatrix rot(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            double v = 1.0;
            for (int j = 0; j < n; ++j) v *= r1[(r >> j) & 1U][(c >> j) & 1U];
            rot(r, c) = v;
        }
    }
    // rot * S_z * rot^dag with S_z diagonal.
    DenseMatrix out(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double sz = 0.5 * (n - 2 * popcount(static_cast<Bits>(k)));
                acc += rot(r, k) * sz * std::conj(rot(c, k));
            }
            out(r, c) = phi_dot * acc;
        }
    }
    // theta' S_y with Y = -i Z X on each qubit.
    const Complex y1[2][2] = {{0.0, Complex(0, -1)}, {Complex(0, 1), 0.0}};
    for (int j = 0; j < n; ++j) {
        for (std::size_t c = 0; c < dim; ++c) {
            const std::size_t r = c ^ (std::size_t{1} << j);
            out(r, c) += 0.5 * theta_dot * y1[(r >> j) & 1U][(c >> j) & 1U];
        }
    }
    for (std::size_t x = 0; x < dim; ++x) {
        int violated = 0;
        for (auto [u, v] : g.edges) violated += ((x >> u) & 1U) && ((x >> v) & 1U);
        out(x, x) += 4.0 * violated;
    }
    return out;
}

}  // namespace qchop
