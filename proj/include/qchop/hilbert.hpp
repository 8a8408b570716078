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

// Composite Hilbert space of N qubits and pruned slack qudits, plus the
// matrix-free operator kernels everything else is assembled from.
//
// Basis ordering: the qubit register occupies the low bits of a composite
// index (qubit 0 least significant). Slack qudits follow in mixed radix,
// qudit 0 least significant, so index = x + 2^N * (d_0 + |S_0| * (d_1 + ...)).
//
// Pauli conventions: Z = |0><0| - |1><1|, X = |0><1| + |1><0|, Y = -iZX.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qchop/common.hpp"

namespace qchop {

class CompositeSpace {
  public:
    CompositeSpace() = default;

    explicit CompositeSpace(int n_qubits, std::vector<std::vector<long long>> slack_values = {})
        : n_qubits_(n_qubits), slack_values_(std::move(slack_values)) {
        if (n_qubits < 0 || n_qubits > 40) throw ConfigError("CompositeSpace: qubit count out of range");
        qubit_dim_ = std::size_t{1} << n_qubits;
        std::size_t dim = qubit_dim_;
        strides_.reserve(slack_values_.size());
        for (const auto& values : slack_values_) {
            if (values.empty()) throw ConfigError("CompositeSpace: empty slack value set");
            if (!std::is_sorted(values.begin(), values.end()) ||
                std::adjacent_find(values.begin(), values.end()) != values.end()) {
                throw ConfigError("CompositeSpace: slack values must be strictly ascending");
            }
            strides_.push_back(dim);
            if (dim > std::numeric_limits<std::size_t>::max() / values.size()) {
                throw ConfigError("CompositeSpace: dimension overflows");
            }
            dim *= values.size();
        }
        if (dim > std::vector<Complex>().max_size()) throw ConfigError("CompositeSpace: dimension too large");
        dim_ = dim;
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t n_slack() const { return slack_values_.size(); }
    std::size_t dimension() const { return dim_; }
    std::size_t qubit_dimension() const { return qubit_dim_; }
    /// Product of all slack dimensions.
    std::size_t slack_dimension() const { return dim_ / qubit_dim_; }

    std::size_t slack_dim(std::size_t d) const { return slack_values_.at(d).size(); }
    const std::vector<long long>& slack_values(std::size_t d) const { return slack_values_.at(d); }
    const std::vector<std::vector<long long>>& all_slack_values() const { return slack_values_; }
    std::size_t slack_stride(std::size_t d) const { return strides_.at(d); }

    std::vector<std::size_t> slack_dims() const {
        std::vector<std::size_t> out;
        for (const auto& v : slack_values_) out.push_back(v.size());
        return out;
    }

    /// Digit whose slack value equals `value`, if the value is allowed.
    std::optional<std::size_t> digit_of(std::size_t d, long long value) const {
        const auto& values = slack_values_.at(d);
        auto it = std::lower_bound(values.begin(), values.end(), value);
        if (it == values.end() || *it != value) return std::nullopt;
        return static_cast<std::size_t>(it - values.begin());
    }

    struct Decoded {
        Bits qubits = 0;
        std::vector<std::size_t> digits;

        bool operator==(const Decoded&) const = default;
    };

    std::size_t encode(Bits qubits, std::span<const std::size_t> digits) const {
        if (digits.size() != slack_values_.size()) throw ConfigError("encode: wrong number of slack digits");
        if (qubits >= qubit_dim_) throw ConfigError("encode: qubit bits out of range");
        std::size_t index = static_cast<std::size_t>(qubits);
        for (std::size_t d = 0; d < digits.size(); ++d) {
            if (digits[d] >= slack_values_[d].size()) throw ConfigError("encode: slack digit out of range");
            index += digits[d] * strides_[d];
        }
        return index;
    }

    Decoded decode(std::size_t index) const {
        if (index >= dim_) throw ConfigError("decode: index out of range");
        Decoded out;
        out.qubits = static_cast<Bits>(index & (qubit_dim_ - 1));
        std::size_t rest = index >> n_qubits_;
        for (const auto& values : slack_values_) {
            out.digits.push_back(rest % values.size());
            rest /= values.size();
        }
        return out;
    }

    bool operator==(const CompositeSpace& other) const {
        return n_qubits_ == other.n_qubits_ && slack_values_ == other.slack_values_;
    }

  private:
    int n_qubits_ = 0;
    std::vector<std::vector<long long>> slack_values_;
    std::vector<std::size_t> strides_;
    std::size_t qubit_dim_ = 1;
    std::size_t dim_ = 1;
};

struct StateVector {
    CompositeSpace space;
    std::vector<Complex> amplitudes;

    StateVector() = default;
    explicit StateVector(CompositeSpace s) : space(std::move(s)), amplitudes(space.dimension()) {}
    StateVector(CompositeSpace s, std::vector<Complex> amps) : space(std::move(s)), amplitudes(std::move(amps)) {
        if (amplitudes.size() != space.dimension()) throw ConfigError("StateVector: amplitude count mismatch");
    }

    static StateVector basis(const CompositeSpace& s, std::size_t index) {
        StateVector psi(s);
        psi.amplitudes.at(index) = 1.0;
        return psi;
    }

    std::size_t size() const { return amplitudes.size(); }
    Complex& operator[](std::size_t i) { return amplitudes[i]; }
    const Complex& operator[](std::size_t i) const { return amplitudes[i]; }

    /// Compensated (Neumaier) sum, so the result stays within a few ulp of
    /// the exact value on large spaces.
    double norm_squared() const {
        double s = 0.0, c = 0.0;
        for (const auto& a : amplitudes) {
            const double v = std::norm(a);
            const double t = s + v;
            c += std::abs(s) >= v ? (s - t) + v : (v - t) + s;
            s = t;
        }
        return s + c;
    }
};

inline Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// ---------------------------------------------------------------------------
// Accumulating kernels: out += coef * Op * in. Spans must have equal length
// and must not alias.

/// out[i] += coef * diag[i] * in[i]
inline void add_diagonal(std::span<const double> diag, double coef, std::span<const Complex> in,
                         std::span<Complex> out) {
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) out[i] += (coef * diag[i]) * in[i];
}

/// out += coef * prod_{j in rotated}(cos Z_j + sin X_j) * prod_{k in string \ rotated} Z_k * in.
/// Expanded over the subsets F of `rotated` that receive an X factor, each
/// contribution is a signed permutation i <- i ^ F.
inline void add_rotated_zstring(Bits string, Bits rotated, double cos_theta, double sin_theta, double coef,
                                std::span<const Complex> in, std::span<Complex> out) {
    const int r = popcount(rotated);
    const std::size_t n = in.size();
    // Enumerate submasks of `rotated`, including the empty set.
    Bits flip = 0;
    while (true) {
        const int k = popcount(flip);
        double w = coef;
        for (int a = 0; a < r - k; ++a) w *= cos_theta;
        for (int a = 0; a < k; ++a) w *= sin_theta;
        if (w != 0.0) {
            const Bits zmask = string & ~flip;
            for (std::size_t i = 0; i < n; ++i) {
                const double sgn = parity_sign(static_cast<Bits>(i) & zmask);
                out[i] += (w * sgn) * in[i ^ static_cast<std::size_t>(flip)];
            }
        }
        if (flip == rotated) break;
        flip = (flip - rotated) & rotated;
    }
}

enum class Axis { x, y, z };

/// out += coef * S_axis * in with S_axis = (1/2) sum_j P_j on the qubit factor.
inline void add_global_spin(int n_qubits, Axis axis, double coef, std::span<const Complex> in,
                            std::span<Complex> out) {
    const std::size_t n = in.size();
    const double h = 0.5 * coef;
    switch (axis) {
        case Axis::z:
            for (std::size_t i = 0; i < n; ++i) {
                const int ones = popcount(static_cast<Bits>(i) & all_ones(n_qubits));
                out[i] += (h * (n_qubits - 2 * ones)) * in[i];
            }
            break;
        case Axis::x:
            for (int j = 0; j < n_qubits; ++j) {
                const std::size_t m = std::size_t{1} << j;
                for (std::size_t i = 0; i < n; ++i) out[i] += h * in[i ^ m];
            }
            break;
        case Axis::y:
            // Y|0> = i|1>, Y|1> = -i|0>.
            for (int j = 0; j < n_qubits; ++j) {
                const std::size_t m = std::size_t{1} << j;
                const Complex up(0.0, h);
                for (std::size_t i = 0; i < n; ++i) out[i] += ((i & m) ? up : -up) * in[i ^ m];
            }
            break;
    }
}

/// out += coef * (prod_D T_D) * in, where T_D = sum_{m,n} |m><n| on slack D.
/// Every slack configuration receives the sum of `in` over all slack
/// configurations sharing its qubit part.
inline void add_slack_all_to_all(const CompositeSpace& space, double coef, std::span<const Complex> in,
                                 std::span<Complex> out) {
    if (space.n_slack() == 0) return;
    const std::size_t q = space.qubit_dimension();
    const std::size_t blocks = space.slack_dimension();
    std::vector<Complex> sums(q, Complex{0.0});
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t off = b * q;
        for (std::size_t i = 0; i < q; ++i) sums[i] += in[off + i];
    }
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t off = b * q;
        for (std::size_t i = 0; i < q; ++i) out[off + i] += coef * sums[i];
    }
}

/// out += coef * |+><+|_D * in with |+>_D uniform over the allowed values of slack D.
inline void add_slack_uniform_projector(const CompositeSpace& space, std::size_t d, double coef,
                                        std::span<const Complex> in, std::span<Complex> out) {
    const std::size_t stride = space.slack_stride(d);
    const std::size_t dim_d = space.slack_dim(d);
    const std::size_t block = stride * dim_d;
    const double w = coef / static_cast<double>(dim_d);
    for (std::size_t base = 0; base < in.size(); base += block) {
        for (std::size_t low = 0; low < stride; ++low) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < dim_d; ++k) s += in[base + k * stride + low];
            s *= w;
            for (std::size_t k = 0; k < dim_d; ++k) out[base + k * stride + low] += s;
        }
    }
}

// ---------------------------------------------------------------------------
// Value-returning forms.

namespace detail {
inline void check_same(const CompositeSpace& space, std::size_t n) {
    if (space.dimension() != n) throw ConfigError("dimension mismatch");
}
}  // namespace detail

inline StateVector apply_diagonal(std::span<const double> diag, const StateVector& psi) {
    detail::check_same(psi.space, diag.size());
    StateVector out(psi.space);
    add_diagonal(diag, 1.0, psi.amplitudes, out.amplitudes);
    return out;
}

inline StateVector apply_rotated_zstring(Bits string, Bits rotated, double theta, const StateVector& psi) {
    if (string == 0) throw ConfigError("apply_rotated_zstring: empty string");
    if ((rotated & ~string) != 0) throw ConfigError("apply_rotated_zstring: rotated qubits must lie in the string");
    if ((string & ~all_ones(psi.space.n_qubits())) != 0) {
        throw ConfigError("apply_rotated_zstring: qubit index out of range");
    }
    StateVector out(psi.space);
    add_rotated_zstring(string, rotated, std::cos(theta), std::sin(theta), 1.0, psi.amplitudes, out.amplitudes);
    return out;
}

inline StateVector apply_global_spin(Axis axis, const StateVector& psi) {
    StateVector out(psi.space);
    add_global_spin(psi.space.n_qubits(), axis, 1.0, psi.amplitudes, out.amplitudes);
    return out;
}

/// (1 + sin(theta) prod_D T_D) psi. Identity when the space has no slack qudits.
inline StateVector apply_slack_mixer(double theta, const StateVector& psi) {
    StateVector out = psi;
    add_slack_all_to_all(psi.space, std::sin(theta), psi.amplitudes, out.amplitudes);
    return out;
}

// ---------------------------------------------------------------------------
// Dense materialization, restricted to small spaces.

inline constexpr std::size_t kMaxDenseDimension = std::size_t{1} << 12;

struct DenseMatrix {
    std::size_t dim = 0;
    std::vector<Complex> data;  // row-major

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t d) : dim(d), data(d * d) {}

    Complex& operator()(std::size_t r, std::size_t c) { return data[r * dim + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
    DenseMatrix& operator*=(Complex s) {
        for (auto& v : data) v *= s;
        return *this;
    }

    double max_abs_diff(const DenseMatrix& o) const {
        if (o.dim != dim) throw ConfigError("DenseMatrix: dimension mismatch");
        double m = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) m = std::max(m, std::abs(data[i] - o.data[i]));
        return m;
    }

    double hermiticity_error() const {
        double m = 0.0;
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        return m;
    }
};

using LinearAction = std::function<void(std::span<const Complex>, std::span<Complex>)>;

/// Columns of the operator, obtained by applying `action` (which overwrites
/// its output) to each basis vector.
inline DenseMatrix materialize(std::size_t dim, const LinearAction& action) {
    if (dim > kMaxDenseDimension) throw ConfigError("materialize: dimension exceeds dense limit");
    DenseMatrix m(dim);
    std::vector<Complex> e(dim), col(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        std::fill(e.begin(), e.end(), Complex{0.0});
        std::fill(col.begin(), col.end(), Complex{0.0});
        e[c] = 1.0;
        action(e, col);
        for (std::size_t r = 0; r < dim; ++r) m(r, c) = col[r];
    }
    return m;
}

}  // namespace qchop
