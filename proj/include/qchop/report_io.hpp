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

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "qchop/metrics.hpp"
#include "qchop/sweep.hpp"

namespace qchop {

/// Decimal with 12 significant digits.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_csv(const MetricsReport& rep, std::ostream& out) {
    out << "t,r,p_feas,p_opt,p_eps\n";
    for (const auto& m : rep.points) {
        out << format_number(m.t) << ',' << format_number(m.r) << ',' << format_number(m.p_feas) << ','
            << format_number(m.p_opt) << ',' << format_number(m.p_eps) << '\n';
    }
}

inline nlohmann::json to_json(const MetricPoint& m) {
    return {{"t", m.t}, {"r", m.r}, {"p_feas", m.p_feas}, {"p_opt", m.p_opt}, {"p_eps", m.p_eps}};
}

inline MetricPoint point_from_json(const nlohmann::json& j) {
    return {j.at("t").get<double>(), j.at("r").get<double>(), j.at("p_feas").get<double>(),
            j.at("p_opt").get<double>(), j.at("p_eps").get<double>()};
}

inline nlohmann::json to_json(const RunMetadata& m) {
    return {{"instance_id", m.instance_id}, {"problem", m.problem}, {"n", m.n},
            {"variant", m.variant},         {"policy", m.policy},   {"lambda", m.lambda},
            {"T", m.total_time},            {"seed", m.seed},       {"norm", m.norm},
            {"eps", m.eps}};
}

inline RunMetadata metadata_from_json(const nlohmann::json& j) {
    RunMetadata m;
    m.instance_id = j.at("instance_id").get<std::string>();
    m.problem = j.at("problem").get<std::string>();
    m.n = j.at("n").get<int>();
    m.variant = j.at("variant").get<std::string>();
    m.policy = j.at("policy").get<std::string>();
    m.lambda = j.at("lambda").get<double>();
    m.total_time = j.at("T").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.norm = j.at("norm").get<double>();
    m.eps = j.at("eps").get<double>();
    return m;
}

/// Run summary: metadata, final metrics and integrator statistics.
inline nlohmann::json to_json(const MetricsReport& rep) {
    return {{"meta", to_json(rep.meta)},
            {"final", to_json(rep.final_point())},
            {"integrator",
             {{"accepted_steps", rep.stats.accepted_steps},
              {"rejected_steps", rep.stats.rejected_steps},
              {"rhs_evaluations", rep.stats.rhs_evaluations},
              {"max_norm_drift", rep.max_norm_drift}}}};
}

/// Inverse of to_json; the time series is reduced to its final point.
inline MetricsReport report_from_json(const nlohmann::json& j) {
    try {
        MetricsReport rep;
        rep.meta = metadata_from_json(j.at("meta"));
        rep.points.push_back(point_from_json(j.at("final")));
        const auto& integ = j.at("integrator");
        rep.stats.accepted_steps = integ.at("accepted_steps").get<long long>();
        rep.stats.rejected_steps = integ.at("rejected_steps").get<long long>();
        rep.stats.rhs_evaluations = integ.at("rhs_evaluations").get<long long>();
        rep.max_norm_drift = integ.at("max_norm_drift").get<double>();
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("run summary: ") + e.what());
    }
}

inline nlohmann::json to_json(const Summary& s) {
    return {{"count", s.count}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

inline nlohmann::json to_json(const Aggregate& a) {
    return {{"variant", a.variant},        {"T", a.total_time},         {"r", to_json(a.r)},
            {"p_feas", to_json(a.p_feas)}, {"p_opt", to_json(a.p_opt)}, {"p_eps", to_json(a.p_eps)}};
}

inline nlohmann::json to_json(const Comparison& c) {
    nlohmann::json deltas = nlohmann::json::array();
    for (const auto& d : c.deltas) {
        deltas.push_back({{"instance_id", d.instance_id}, {"delta_r", d.delta_r}, {"delta_p_opt", d.delta_p_opt}});
    }
    auto tally = [](const Tally& t) { return nlohmann::json{{"wins", t.wins}, {"losses", t.losses}, {"ties", t.ties}}; };
    return {{"deltas", deltas}, {"r", tally(c.r)}, {"p_opt", tally(c.p_opt)}};
}

}  // namespace qchop
