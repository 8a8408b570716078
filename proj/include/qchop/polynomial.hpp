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

#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "qchop/common.hpp"

namespace qchop {

/// Real multilinear function of binary variables in the Pauli-Z basis:
///
///     f(x) = 1/2 * sum_S c_S * prod_{j in S} z_j,    z_j = 1 - 2 x_j.
///
/// Subsets are bitmasks; the empty mask holds the constant term. Zero
/// coefficients are never stored.
class ZPolynomial {
  public:
    using Terms = std::map<Bits, double>;

    ZPolynomial() = default;

    static ZPolynomial constant(double value) {
        ZPolynomial p;
        p.add_term(0, 2.0 * value);
        return p;
    }

    /// The binary variable x_j = (1 - Z_j) / 2.
    static ZPolynomial variable(int j) {
        ZPolynomial p;
        p.add_term(0, 1.0);
        p.add_term(bit(j), -1.0);
        return p;
    }

    /// Adds c to the coefficient of subset S (in the 1/2-prefactor convention).
    void add_term(Bits subset, double c) {
        if (c == 0.0) return;
        auto [it, inserted] = terms_.try_emplace(subset, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    double coefficient(Bits subset) const {
        auto it = terms_.find(subset);
        return it == terms_.end() ? 0.0 : it->second;
    }

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    /// Value of the constant term, i.e. c_{} / 2.
    double constant_value() const { return 0.5 * coefficient(0); }

    std::size_t nonconstant_count() const { return terms_.size() - (terms_.count(0) ? 1 : 0); }

    /// True if every nonconstant subset has odd cardinality.
    bool is_odd() const {
        for (const auto& [s, c] : terms_)
            if (s != 0 && popcount(s) % 2 == 0) return false;
        return true;
    }

    /// Bitmask of all variables that appear in some term.
    Bits support() const {
        Bits m = 0;
        for (const auto& [s, c] : terms_) m |= s;
        return m;
    }

    double evaluate(Bits x) const {
        double v = 0.0;
        for (const auto& [s, c] : terms_) v += c * parity_sign(x & s);
        return 0.5 * v;
    }

    ZPolynomial without_constant() const {
        ZPolynomial p = *this;
        p.terms_.erase(0);
        return p;
    }

    ZPolynomial& operator+=(const ZPolynomial& o) {
        for (const auto& [s, c] : o.terms_) add_term(s, c);
        return *this;
    }
    ZPolynomial& operator-=(const ZPolynomial& o) {
        for (const auto& [s, c] : o.terms_) add_term(s, -c);
        return *this;
    }
    ZPolynomial& operator*=(double a) {
        if (a == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [s, c] : terms_) c *= a;
        return *this;
    }

    friend ZPolynomial operator+(ZPolynomial a, const ZPolynomial& b) { return a += b; }
    friend ZPolynomial operator-(ZPolynomial a, const ZPolynomial& b) { return a -= b; }
    friend ZPolynomial operator*(ZPolynomial a, double s) { return a *= s; }
    friend ZPolynomial operator*(double s, ZPolynomial a) { return a *= s; }
    friend ZPolynomial operator-(ZPolynomial a) { return a *= -1.0; }

    /// Pointwise product of the represented functions, reducing Z_j^2 = 1.
    friend ZPolynomial operator*(const ZPolynomial& a, const ZPolynomial& b) {
        ZPolynomial p;
        for (const auto& [s, cs] : a.terms_)
            for (const auto& [t, ct] : b.terms_) p.add_term(s ^ t, 0.5 * cs * ct);
        return p;
    }

    bool operator==(const ZPolynomial& o) const = default;

  private:
    Terms terms_;
};

/// Integer-valued affine function D(x) = c0 + sum_j c_j x_j of binary
/// variables, used for inequality constraints D(x) >= 0.
struct AffineForm {
    long long constant = 0;
    std::map<int, long long> linear;  // variable -> coefficient, zeros never stored

    void add(int var, long long c) {
        if (c == 0) return;
        auto [it, inserted] = linear.try_emplace(var, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) linear.erase(it);
        }
    }

    long long evaluate(Bits x) const {
        long long v = constant;
        for (const auto& [j, c] : linear)
            if ((x >> j) & 1U) v += c;
        return v;
    }

    /// gcd of the nonconstant coefficients, 0 if there are none.
    long long linear_gcd() const {
        long long g = 0;
        for (const auto& [j, c] : linear) g = std::gcd(g, c);
        return g;
    }

    /// Copy divided by the gcd of all nonzero coefficients, constant included.
    AffineForm gcd_normalized() const {
        long long g = linear_gcd();
        if (constant != 0) g = std::gcd(g, constant);
        if (g <= 1) return *this;
        AffineForm out;
        out.constant = constant / g;
        for (const auto& [j, c] : linear) out.linear.emplace(j, c / g);
        return out;
    }

    bool operator==(const AffineForm&) const = default;
};

}  // namespace qchop
