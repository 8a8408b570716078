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

// Problem families and their encodings as constrained binary programs.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qchop/common.hpp"
#include "qchop/polynomial.hpp"
#include "qchop/problem.hpp"
#include "qchop/random.hpp"

namespace qchop {

struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    bool directed = false;

    bool operator==(const Graph&) const = default;
};

struct MisInstance {
    Graph graph;
    bool operator==(const MisInstance&) const = default;
};

struct DmdsInstance {
    Graph graph;  // directed
    bool operator==(const DmdsInstance&) const = default;
};

struct KnapsackInstance {
    std::vector<long long> values;
    std::vector<long long> weights;
    long long capacity = 0;
    bool operator==(const KnapsackInstance&) const = default;
};

struct AuctionInstance {
    std::vector<double> payments;                  // one per bid
    std::vector<std::vector<long long>> baskets;   // baskets[bid][item]
    std::vector<long long> multiplicities;         // one per item
    bool operator==(const AuctionInstance&) const = default;
};

struct EtfInstance {
    std::vector<double> weights;  // sums to 1
    std::vector<double> prices;
    std::vector<int> sectors;     // sector id per asset
    int shares = 1;               // m
    double epsilon = 0.1;         // band half-width
    int enforced_sector = 0;      // whose upper bound is enforced
    double scale = 10.0;          // integerization factor
    bool operator==(const EtfInstance&) const = default;
};

using Instance = std::variant<MisInstance, DmdsInstance, KnapsackInstance, AuctionInstance, EtfInstance>;

inline std::string kind_name(const Instance& inst) {
    static const char* names[] = {"mis", "dmds", "knapsack", "auction", "etf"};
    return names[inst.index()];
}

// ---------------------------------------------------------------------------

namespace detail {

inline void check_graph(const Graph& g, bool directed) {
    if (g.n <= 0) throw ParseError("graph: vertex count must be positive");
    if (g.directed != directed) throw ParseError(directed ? "graph: expected directed edges" : "graph: expected undirected edges");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : g.edges) {
        if (u < 0 || v < 0 || u >= g.n || v >= g.n) throw ParseError("graph: vertex id out of range");
        if (u == v) throw ParseError("graph: self-loop on vertex " + std::to_string(u));
        auto key = directed ? std::pair{u, v} : std::pair{std::min(u, v), std::max(u, v)};
        if (!seen.insert(key).second) throw ParseError("graph: duplicate edge");
    }
}

inline ConstrainedProblem finish(ConstrainedProblem p) {
    validate_problem(p);
    return p;
}

}  // namespace detail

/// maximize |S| over independent sets: minimize -sum_v x_v subject to
/// x_v x_w = 0 on every edge. Worst feasible state: the empty set.
inline ConstrainedProblem encode_mis(const Graph& g) {
    detail::check_graph(g, false);
    ConstrainedProblem p;
    p.kind = "mis";
    p.n_vars = g.n;
    for (int v = 0; v < g.n; ++v) p.objective -= ZPolynomial::variable(v);
    for (auto [u, v] : g.edges) p.equalities.push_back({bit(u) | bit(v), bit(u) | bit(v)});
    p.worst_feasible = Bits{0};
    return detail::finish(std::move(p));
}

/// Directed minimum dominating set: minimize sum_v x_v subject to, for each
/// v, not (x_v = 0 and x_u = 0 for every in-neighbor u). Worst: all vertices.
inline ConstrainedProblem encode_dmds(const Graph& g) {
    detail::check_graph(g, true);
    ConstrainedProblem p;
    p.kind = "dmds";
    p.n_vars = g.n;
    for (int v = 0; v < g.n; ++v) p.objective += ZPolynomial::variable(v);
    std::vector<Bits> closed_in(static_cast<std::size_t>(g.n));
    for (int v = 0; v < g.n; ++v) closed_in[static_cast<std::size_t>(v)] = bit(v);
    for (auto [u, v] : g.edges) closed_in[static_cast<std::size_t>(v)] |= bit(u);
    for (Bits m : closed_in) p.equalities.push_back({m, 0});
    p.worst_feasible = all_ones(g.n);
    return detail::finish(std::move(p));
}

/// maximize sum v_i x_i subject to sum w_i x_i <= W. Worst: the empty knapsack.
inline ConstrainedProblem encode_knapsack(const KnapsackInstance& k) {
    const std::size_t n = k.values.size();
    if (n == 0 || k.weights.size() != n) throw ParseError("knapsack: values and weights must be nonempty and equal length");
    if (k.capacity < 0) throw ParseError("knapsack: negative capacity");
    ConstrainedProblem p;
    p.kind = "knapsack";
    p.n_vars = static_cast<int>(n);
    AffineForm d;
    d.constant = k.capacity;
    for (std::size_t i = 0; i < n; ++i) {
        if (k.values[i] <= 0 || k.weights[i] <= 0) throw ParseError("knapsack: values and weights must be positive");
        if (k.weights[i] > k.capacity) {
            throw InstanceRejected("knapsack: item " + std::to_string(i) + " is heavier than the capacity");
        }
        p.objective -= static_cast<double>(k.values[i]) * ZPolynomial::variable(static_cast<int>(i));
        d.add(static_cast<int>(i), -k.weights[i]);
    }
    p.inequalities.push_back(std::move(d));
    p.worst_feasible = Bits{0};
    return detail::finish(std::move(p));
}

/// maximize sum p_b x_b subject to sum_b q_bi x_b <= m_i for every item.
/// Items that no bid requests impose no constraint and are skipped.
inline ConstrainedProblem encode_auction(const AuctionInstance& a) {
    const std::size_t bids = a.payments.size();
    if (bids == 0) throw InstanceRejected("auction: no bids");
    if (a.baskets.size() != bids) throw ParseError("auction: one basket per bid required");
    const std::size_t items = a.multiplicities.size();
    ConstrainedProblem p;
    p.kind = "auction";
    p.n_vars = static_cast<int>(bids);
    for (std::size_t b = 0; b < bids; ++b) {
        if (!(a.payments[b] > 0.0)) throw ParseError("auction: payments must be positive");
        if (a.baskets[b].size() != items) throw ParseError("auction: basket length must equal item count");
        p.objective -= a.payments[b] * ZPolynomial::variable(static_cast<int>(b));
    }
    for (std::size_t i = 0; i < items; ++i) {
        if (a.multiplicities[i] <= 0) throw ParseError("auction: multiplicities must be positive");
        AffineForm d;
        d.constant = a.multiplicities[i];
        for (std::size_t b = 0; b < bids; ++b) {
            const long long q = a.baskets[b][i];
            if (q < 0) throw ParseError("auction: negative basket quantity");
            if (q > a.multiplicities[i]) {
                throw InstanceRejected("auction: bid " + std::to_string(b) + " exceeds the inventory of item " +
                                       std::to_string(i));
            }
            d.add(static_cast<int>(b), -q);
        }
        if (!d.linear.empty()) p.inequalities.push_back(std::move(d));
    }
    p.worst_feasible = Bits{0};
    return detail::finish(std::move(p));
}

/// Cash mismatch Delta(x) = m * NAV - sum_a price_a x_a for an ETF instance.
inline ZPolynomial etf_mismatch(const EtfInstance& e) {
    double nav = 0.0;
    for (std::size_t a = 0; a < e.weights.size(); ++a) nav += e.weights[a] * e.prices[a];
    ZPolynomial delta = ZPolynomial::constant(e.shares * nav);
    for (std::size_t a = 0; a < e.prices.size(); ++a) delta -= e.prices[a] * ZPolynomial::variable(static_cast<int>(a));
    return delta;
}

/// minimize Delta(x)^2 subject to the scaled, rounded upper sector bound
/// round(s*u_j) sum_a x_a - s sum_{a in F_j} x_a >= 0 for the enforced sector.
/// Rejects instances where every basket is feasible or the feasible
/// objective is constant.
inline ConstrainedProblem encode_etf(const EtfInstance& e) {
    const std::size_t n = e.weights.size();
    if (n == 0 || e.prices.size() != n || e.sectors.size() != n) {
        throw ParseError("etf: weights, prices and sectors must be nonempty and equal length");
    }
    double wsum = 0.0;
    for (double w : e.weights) {
        if (!(w >= 0.0)) throw ParseError("etf: negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw ParseError("etf: weights must sum to 1");
    for (double pr : e.prices)
        if (!(pr > 0.0)) throw ParseError("etf: prices must be positive");
    if (e.shares <= 0) throw ParseError("etf: share count must be positive");

    ConstrainedProblem p;
    p.kind = "etf";
    p.n_vars = static_cast<int>(n);
    const ZPolynomial delta = etf_mismatch(e);
    p.objective = delta * delta;

    double sector_weight = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        if (e.sectors[a] == e.enforced_sector) sector_weight += e.weights[a];
    const double upper = (1.0 + e.epsilon) * sector_weight;
    const long long per_asset = std::llround(e.scale * upper);
    const long long per_member = std::llround(e.scale);
    AffineForm d;
    for (std::size_t a = 0; a < n; ++a) {
        d.add(static_cast<int>(a), per_asset - (e.sectors[a] == e.enforced_sector ? per_member : 0));
    }
    if (d.linear.empty()) throw InstanceRejected("etf: sector constraint is vacuous");
    p.inequalities.push_back(std::move(d));
    p.worst_feasible = Bits{0};
    validate_problem(p);
    if (p.n_vars <= 24) require_constrained(brute_force_solve(p));
    return p;
}

inline ConstrainedProblem encode(const Instance& inst) {
    return std::visit(
        [](const auto& x) -> ConstrainedProblem {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, MisInstance>) return encode_mis(x.graph);
            else if constexpr (std::is_same_v<T, DmdsInstance>) return encode_dmds(x.graph);
            else if constexpr (std::is_same_v<T, KnapsackInstance>) return encode_knapsack(x);
            else if constexpr (std::is_same_v<T, AuctionInstance>) return encode_auction(x);
            else return encode_etf(x);
        },
        inst);
}

// ---------------------------------------------------------------------------
// Generators. Every generator is a pure function of its seed.

inline Graph gen_erdos_renyi(int n, double p, std::uint64_t seed, bool directed) {
    if (n < 0) throw ConfigError("gen_erdos_renyi: negative vertex count");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("gen_erdos_renyi: p must lie in [0, 1]");
    CounterRng rng = CounterRng(seed).split("erdos_renyi");
    Graph g;
    g.n = n;
    g.directed = directed;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            const bool keep = rng.uniform() < p;
            const bool flip = directed && rng.uniform() < 0.5;
            if (keep) g.edges.push_back(flip ? std::pair{v, u} : std::pair{u, v});
        }
    }
    return g;
}

struct GeneratedInstance {
    Instance instance;
    std::uint64_t seed = 0;
    int retries = 0;
};

inline constexpr int kMaxGeneratorRetries = 1000;

namespace detail {

/// Samples until `sample(attempt_rng)` yields an instance that encodes,
/// has an infeasible assignment, and a nonconstant feasible objective.
template <class Sample>
GeneratedInstance generate_accepted(std::uint64_t seed, std::string_view stream, Sample&& sample) {
    const CounterRng root = CounterRng(seed).split(stream);
    for (int attempt = 0; attempt < kMaxGeneratorRetries; ++attempt) {
        CounterRng rng = root.split(static_cast<std::uint64_t>(attempt));
        Instance inst = sample(rng);
        try {
            const ConstrainedProblem p = encode(inst);
            require_constrained(brute_force_solve(p));
        } catch (const InstanceRejected&) {
            continue;
        }
        return {std::move(inst), seed, attempt};
    }
    throw InstanceRejected("generator: too many consecutive rejections");
}

}  // namespace detail

/// Erdos-Renyi MIS instance; p = 0.3 in the reference experiments.
inline GeneratedInstance gen_mis_instance(int n, double p, std::uint64_t seed) {
    return detail::generate_accepted(seed, "mis", [&](CounterRng& rng) -> Instance {
        return MisInstance{gen_erdos_renyi(n, p, rng(), false)};
    });
}

/// Erdos-Renyi graph with randomly oriented edges.
inline GeneratedInstance gen_dmds_instance(int n, double p, std::uint64_t seed) {
    return detail::generate_accepted(seed, "dmds", [&](CounterRng& rng) -> Instance {
        return DmdsInstance{gen_erdos_renyi(n, p, rng(), true)};
    });
}

/// Uniform knapsack sampler for tests and desk-scale runs (values and weights
/// uniform integers in [1, 2n], capacity 2n). Not a hard-instance generator.
inline GeneratedInstance gen_knapsack_uniform(int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("gen_knapsack_uniform: need at least one item");
    return detail::generate_accepted(seed, "knapsack", [&](CounterRng& rng) -> Instance {
        KnapsackInstance k;
        k.capacity = 2LL * n;
        for (int i = 0; i < n; ++i) {
            k.values.push_back(rng.uniform_int(1, 2LL * n));
            k.weights.push_back(rng.uniform_int(1, 2LL * n));
        }
        return k;
    });
}

/// Auction sampler with unit multiplicities after the "arbitrary
/// relationships" recipe of the Combinatorial Auction Test Suite: common item
/// values on [1, 100], per-bidder private values deviating by up to 50,
/// bundles grown by bidder interest and pairwise item compatibility, and
/// bundle price = sum of private values + |bundle|^1.2. Each bidder places its
/// initial bundle plus at most one substitute, so no dummy items are needed.
inline GeneratedInstance gen_auction_instance(int n_bids, int n_items, std::uint64_t seed) {
    if (n_bids < 1 || n_items < 1 || n_items > 30) throw ConfigError("gen_auction_instance: bad sizes");
    constexpr double kMinValue = 1.0, kMaxValue = 100.0, kDeviation = 0.5, kAddItemProb = 0.9;
    constexpr double kAdditivity = 0.2, kBudgetFactor = 1.5, kResaleFactor = 0.5;
    const auto m = static_cast<std::size_t>(n_items);
    return detail::generate_accepted(seed, "auction", [&](CounterRng& rng) -> Instance {
        std::vector<double> values(m);
        for (auto& v : values) v = kMinValue + (kMaxValue - kMinValue) * rng.uniform();
        std::vector<std::vector<double>> compat(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) compat[i][j] = compat[j][i] = rng.uniform();
        for (std::size_t i = 0; i < m; ++i) {
            double row = 0.0;
            for (double c : compat[i]) row += c;
            if (row > 0.0)
                for (auto& c : compat[i]) c /= row;
        }

        AuctionInstance a;
        a.multiplicities.assign(m, 1);
        while (static_cast<int>(a.payments.size()) < n_bids) {
            std::vector<double> interest(m), priv(m);
            for (std::size_t i = 0; i < m; ++i) {
                interest[i] = rng.uniform();
                priv[i] = values[i] + kMaxValue * kDeviation * (2.0 * interest[i] - 1.0);
            }
            auto next_item = [&](const std::vector<char>& in_bundle) {
                std::vector<double> w(m, 0.0);
                std::size_t members = 0;
                for (std::size_t i = 0; i < m; ++i) members += in_bundle[i] ? 1 : 0;
                for (std::size_t i = 0; i < m; ++i) {
                    if (in_bundle[i]) continue;
                    double c = 0.0;
                    for (std::size_t j = 0; j < m; ++j)
                        if (in_bundle[j]) c += compat[j][i];
                    w[i] = interest[i] * c / static_cast<double>(members);
                }
                bool any = false;
                for (double x : w) any = any || x > 0.0;
                // Degenerate compatibilities fall back to interest alone.
                if (!any)
                    for (std::size_t i = 0; i < m; ++i) w[i] = in_bundle[i] ? 0.0 : interest[i] + 1e-12;
                return rng.weighted_index(w);
            };
            auto price_of = [&](const std::vector<char>& in_bundle) {
                double p = 0.0;
                int size = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    if (!in_bundle[i]) continue;
                    p += priv[i];
                    ++size;
                }
                return p + std::pow(static_cast<double>(size), 1.0 + kAdditivity);
            };

            std::vector<char> bundle(m, 0);
            bundle[rng.weighted_index(interest)] = 1;
            std::size_t size = 1;
            while (size < m && rng.bernoulli(kAddItemProb)) {
                bundle[next_item(bundle)] = 1;
                ++size;
            }
            const double price = price_of(bundle);
            if (price < 0.0) continue;

            // Best-priced substitute of equal size sharing an item with the bundle.
            std::optional<std::pair<std::vector<char>, double>> substitute;
            for (std::size_t seed_item = 0; seed_item < m; ++seed_item) {
                if (!bundle[seed_item]) continue;
                std::vector<char> sub(m, 0);
                sub[seed_item] = 1;
                for (std::size_t k = 1; k < size; ++k) sub[next_item(sub)] = 1;
                const double sub_price = price_of(sub);
                double resale = 0.0, sub_resale = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    if (bundle[i]) resale += values[i];
                    if (sub[i]) sub_resale += values[i];
                }
                if (sub == bundle || sub_price < 0.0 || sub_price > kBudgetFactor * price ||
                    sub_resale < kResaleFactor * resale) {
                    continue;
                }
                if (!substitute || sub_price > substitute->second) substitute = {{sub, sub_price}};
            }

            auto place = [&](const std::vector<char>& b, double p) {
                a.baskets.emplace_back(b.begin(), b.end());
                a.payments.push_back(p);
            };
            place(bundle, price);
            if (substitute && static_cast<int>(a.payments.size()) < n_bids) place(substitute->first, substitute->second);
        }
        return a;
    });
}

inline int etf_share_count(int n) { return static_cast<int>(std::ceil(n / 2.0 + 1.0)); }

/// ETF basket instance: m = ceil(n/2 + 1) shares, weights uniform on (0, 1)
/// then normalized, prices ~ Normal(1, 0.1), sectors uniform over three,
/// epsilon = 0.1, upper bound of sector 0 enforced.
inline GeneratedInstance gen_etf_instance(int n, std::uint64_t seed, int enforced_sector = 0) {
    if (n < 2) throw ConfigError("gen_etf_instance: need at least two assets");
    return detail::generate_accepted(seed, "etf", [&](CounterRng& rng) -> Instance {
        EtfInstance e;
        e.shares = etf_share_count(n);
        e.enforced_sector = enforced_sector;
        double total = 0.0;
        for (int a = 0; a < n; ++a) {
            e.weights.push_back(rng.uniform_open());
            total += e.weights.back();
        }
        for (auto& w : e.weights) w /= total;
        for (int a = 0; a < n; ++a) e.prices.push_back(rng.normal(1.0, 0.1));
        for (int a = 0; a < n; ++a) e.sectors.push_back(static_cast<int>(rng.uniform_int(0, 2)));
        return e;
    });
}

}  // namespace qchop
