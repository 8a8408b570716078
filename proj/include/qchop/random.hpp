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
#include <limits>
#include <span>
#include <string_view>

#include "qchop/common.hpp"

namespace qchop {

/// Counter-based random stream. Output k of stream (seed, key) is a pure
/// function of (seed, key, k), so streams can be split and replayed without
/// sharing state. All distributions are implemented here rather than through
/// <random> so that draws are identical across standard libraries.
class CounterRng {
  public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t key = 0)
        : seed_(seed), key_(mix(seed ^ mix(key + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Independent substream derived from this stream's identity.
    CounterRng split(std::uint64_t child) const { return CounterRng(seed_, mix(key_ ^ mix(child + 1))); }

    CounterRng split(std::string_view name) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return split(h);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Uniform integer in [lo, hi], unbiased by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (hi < lo) throw ConfigError("uniform_int: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>((*this)());
        const std::uint64_t limit = max() - max() % span;
        std::uint64_t r;
        do {
            r = (*this)();
        } while (r >= limit);
        return lo + static_cast<std::int64_t>(r % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Index k drawn with probability weights[k] / sum(weights).
    std::size_t weighted_index(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw ConfigError("weighted_index: negative weight");
            total += w;
        }
        if (!(total > 0.0)) throw ConfigError("weighted_index: weights sum to zero");
        double u = uniform() * total;
        std::size_t last = 0;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            if (weights[k] <= 0.0) continue;
            last = k;
            if (u < weights[k]) return k;
            u -= weights[k];
        }
        return last;
    }

    /// Box-Muller; one draw per call, the partner variate is discarded.
    double normal(double mean = 0.0, double stddev = 1.0) {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace qchop
