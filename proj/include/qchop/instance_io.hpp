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

// Instance files:
//
//   {"kind": "mis" | "dmds" | "knapsack" | "auction" | "etf",
//    "n": <number of binary decision variables>,
//    "payload": {...}}
//
// Payloads:
//   mis, dmds  {"edges": [[u, v], ...]}            0-based ids; dmds edges are u -> v
//   knapsack   {"values": [int], "weights": [int], "capacity": int}
//   auction    {"payments": [real], "baskets": [[int per item], ...], "multiplicities": [int]}
//   etf        {"weights": [real], "prices": [real], "sectors": [int], "shares": int,
//               "epsilon": real, "enforced_sector": int, "scale": real}

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qchop/encoders.hpp"

namespace qchop {

namespace detail {

using nlohmann::json;

inline const json& field(const json& obj, const char* name, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path + ": expected an object");
    auto it = obj.find(name);
    if (it == obj.end()) throw ParseError(path + "." + name + ": missing field");
    return *it;
}

inline long long as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ParseError(path + ": expected an integer");
    return v.get<long long>();
}

inline double as_real(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path + ": expected a number");
    return v.get<double>();
}

template <class F>
auto as_array(const json& v, const std::string& path, F&& elem) {
    if (!v.is_array()) throw ParseError(path + ": expected an array");
    std::vector<decltype(elem(v, path))> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(elem(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<long long> int_array(const json& v, const std::string& path) { return as_array(v, path, as_int); }
inline std::vector<double> real_array(const json& v, const std::string& path) { return as_array(v, path, as_real); }

inline Graph parse_graph(const json& payload, int n, bool directed) {
    Graph g;
    g.n = n;
    g.directed = directed;
    const auto& edges = field(payload, "edges", "payload");
    auto pairs = as_array(edges, "payload.edges", [](const json& e, const std::string& p) {
        auto ends = int_array(e, p);
        if (ends.size() != 2) throw ParseError(p + ": an edge needs exactly two vertices");
        return std::pair<int, int>(static_cast<int>(ends[0]), static_cast<int>(ends[1]));
    });
    g.edges = std::move(pairs);
    check_graph(g, directed);
    return g;
}

// Array lengths that must agree with the declared variable count.
inline void check_lengths(const Instance& inst, int n) {
    auto need = [n](std::size_t size, const char* what) {
        if (size != static_cast<std::size_t>(n)) {
            throw ParseError(std::string("payload.") + what + ": expected " + std::to_string(n) + " entries, got " +
                             std::to_string(size));
        }
    };
    if (const auto* k = std::get_if<KnapsackInstance>(&inst)) {
        need(k->values.size(), "values");
        need(k->weights.size(), "weights");
    } else if (const auto* a = std::get_if<AuctionInstance>(&inst)) {
        need(a->payments.size(), "payments");
        need(a->baskets.size(), "baskets");
        for (std::size_t b = 0; b < a->baskets.size(); ++b) {
            if (a->baskets[b].size() != a->multiplicities.size()) {
                throw ParseError("payload.baskets[" + std::to_string(b) + "]: expected one entry per item");
            }
        }
    } else if (const auto* e = std::get_if<EtfInstance>(&inst)) {
        need(e->weights.size(), "weights");
        need(e->prices.size(), "prices");
        need(e->sectors.size(), "sectors");
    }
}

}  // namespace detail

/// Number of binary decision variables, one qubit each.
inline int instance_size(const Instance& inst) {
    return std::visit(
        [](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, MisInstance> || std::is_same_v<T, DmdsInstance>) return x.graph.n;
            else if constexpr (std::is_same_v<T, KnapsackInstance>) return static_cast<int>(x.values.size());
            else if constexpr (std::is_same_v<T, AuctionInstance>) return static_cast<int>(x.payments.size());
            else return static_cast<int>(x.weights.size());
        },
        inst);
}

inline nlohmann::json instance_to_json(const Instance& inst) {
    using nlohmann::json;
    json payload = std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, MisInstance> || std::is_same_v<T, DmdsInstance>) {
                json edges = json::array();
                for (auto [u, v] : x.graph.edges) edges.push_back({u, v});
                return {{"edges", edges}};
            } else if constexpr (std::is_same_v<T, KnapsackInstance>) {
                return {{"values", x.values}, {"weights", x.weights}, {"capacity", x.capacity}};
            } else if constexpr (std::is_same_v<T, AuctionInstance>) {
                return {{"payments", x.payments}, {"baskets", x.baskets}, {"multiplicities", x.multiplicities}};
            } else {
                return {{"weights", x.weights},   {"prices", x.prices},   {"sectors", x.sectors},
                        {"shares", x.shares},     {"epsilon", x.epsilon}, {"enforced_sector", x.enforced_sector},
                        {"scale", x.scale}};
            }
        },
        inst);
    return {{"kind", kind_name(inst)}, {"n", instance_size(inst)}, {"payload", payload}};
}

inline Instance instance_from_json(const nlohmann::json& j) {
    using namespace detail;
    const auto& kind_v = field(j, "kind", "instance");
    if (!kind_v.is_string()) throw ParseError("instance.kind: expected a string");
    const std::string kind = kind_v.get<std::string>();
    const long long n_ll = as_int(field(j, "n", "instance"), "instance.n");
    if (n_ll < 0 || n_ll > 40) throw ParseError("instance.n: out of range");
    const int n = static_cast<int>(n_ll);
    const auto& payload = field(j, "payload", "instance");

    Instance inst;
    if (kind == "mis") {
        inst = MisInstance{parse_graph(payload, n, false)};
    } else if (kind == "dmds") {
        inst = DmdsInstance{parse_graph(payload, n, true)};
    } else if (kind == "knapsack") {
        KnapsackInstance k;
        k.values = int_array(field(payload, "values", "payload"), "payload.values");
        k.weights = int_array(field(payload, "weights", "payload"), "payload.weights");
        k.capacity = as_int(field(payload, "capacity", "payload"), "payload.capacity");
        inst = std::move(k);
    } else if (kind == "auction") {
        AuctionInstance a;
        a.payments = real_array(field(payload, "payments", "payload"), "payload.payments");
        a.baskets = as_array(field(payload, "baskets", "payload"), "payload.baskets", int_array);
        a.multiplicities = int_array(field(payload, "multiplicities", "payload"), "payload.multiplicities");
        inst = std::move(a);
    } else if (kind == "etf") {
        EtfInstance e;
        e.weights = real_array(field(payload, "weights", "payload"), "payload.weights");
        e.prices = real_array(field(payload, "prices", "payload"), "payload.prices");
        for (long long s : int_array(field(payload, "sectors", "payload"), "payload.sectors")) {
            e.sectors.push_back(static_cast<int>(s));
        }
        e.shares = static_cast<int>(as_int(field(payload, "shares", "payload"), "payload.shares"));
        e.epsilon = as_real(field(payload, "epsilon", "payload"), "payload.epsilon");
        if (payload.contains("enforced_sector")) {
            e.enforced_sector = static_cast<int>(as_int(payload["enforced_sector"], "payload.enforced_sector"));
        }
        if (payload.contains("scale")) e.scale = as_real(payload["scale"], "payload.scale");
        inst = std::move(e);
    } else {
        throw ParseError("instance.kind: unknown problem kind '" + kind + "'");
    }
    check_lengths(inst, n);
    return inst;
}

inline Instance read_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open instance file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        return instance_from_json(j);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Reads and encodes an instance file.
inline ConstrainedProblem load_instance(const std::string& path) { return encode(read_instance(path)); }

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path + ": cannot write instance file");
    out << instance_to_json(inst).dump(2) << '\n';
}

}  // namespace qchop
