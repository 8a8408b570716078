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

#include <bit>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qchop {

using Complex = std::complex<double>;

/// A computational-basis bitstring; bit j holds the value of variable x_j.
using Bits = std::uint64_t;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Invalid parameters or mismatched shapes handed to the library.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The instance cannot be used: no feasible state, a constant feasible
/// objective, or a family-specific precondition was violated.
struct InstanceRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed instance data (bad graph, unknown kind, schema violation).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The ODE integrator could not meet its contract.
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int popcount(Bits b) { return std::popcount(b); }

/// (-1)^popcount(b)
inline double parity_sign(Bits b) { return (std::popcount(b) & 1) ? -1.0 : 1.0; }

inline Bits bit(int j) { return Bits{1} << j; }

inline Bits all_ones(int n) { return n >= 64 ? ~Bits{0} : (Bits{1} << n) - 1; }

/// Renders the low n bits as x_0 x_1 ... x_{n-1}.
inline std::string bits_to_string(Bits x, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int j = 0; j < n; ++j) {
        if ((x >> j) & 1U) s[static_cast<std::size_t>(j)] = '1';
    }
    return s;
}

inline std::vector<int> bits_to_indices(Bits x) {
    std::vector<int> out;
    while (x != 0) {
        out.push_back(std::countr_zero(x));
        x &= x - 1;
    }
    return out;
}

}  // namespace qchop
