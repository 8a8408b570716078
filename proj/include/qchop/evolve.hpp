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

// Integration of i d/dt psi = H(t) psi with the explicit Dormand-Prince
// 8(5,3) Runge-Kutta pair (Hairer, Norsett & Wanner, Solving ODEs I, II.10),
// using the step-size controller and combined 5th/3rd order error estimate of
// the reference Fortran DOP853. The integrator lands exactly on every
// checkpoint instead of interpolating.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "qchop/common.hpp"
#include "qchop/hilbert.hpp"

namespace qchop {

template <class Op>
concept TimeDependentOperator = requires(const Op& op, double t, std::span<const Complex> in, std::span<Complex> out) {
    { op.space() } -> std::convertible_to<const CompositeSpace&>;
    op.apply(t, in, out);
};

struct Schedule {
    double total_time = 1.0;
    std::vector<double> checkpoints{0.0, 1.0};
    double atol = 1e-8;
    double rtol = 1e-8;
    // The step error is measured in the tolerance-weighted Euclidean norm.
    // The root-mean-square variant of the reference code divides by the
    // dimension and lets localized errors through on large spaces.
    bool rms_error_norm = false;
    // Largest change of the squared norm allowed over [0, T]; each step may
    // use its share h / T. Steps over budget are rejected and shortened.
    double norm_budget = 5e-7;

    /// `count` uniformly spaced checkpoints from 0 to T inclusive.
    static Schedule uniform(double total_time, int count = 101, double atol = 1e-8, double rtol = 1e-8) {
        if (count < 2) throw ConfigError("Schedule: need at least two checkpoints");
        Schedule s;
        s.total_time = total_time;
        s.atol = atol;
        s.rtol = rtol;
        s.checkpoints.resize(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) s.checkpoints[static_cast<std::size_t>(k)] = total_time * k / (count - 1);
        s.checkpoints.back() = total_time;
        return s;
    }

    void validate() const {
        if (!(total_time >= 0.0)) throw ConfigError("Schedule: negative total time");
        if (checkpoints.size() < 2 || checkpoints.front() != 0.0 || checkpoints.back() != total_time) {
            throw ConfigError("Schedule: checkpoints must run from 0 to T");
        }
        if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) throw ConfigError("Schedule: checkpoints must ascend");
        if (!(atol > 0.0) || !(rtol > 0.0)) throw ConfigError("Schedule: tolerances must be positive");
        if (!(norm_budget > 0.0)) throw ConfigError("Schedule: norm budget must be positive");
    }
};

struct IntegratorStats {
    long long accepted_steps = 0;
    long long rejected_steps = 0;  // local error above tolerance
    long long norm_rejections = 0;  // norm change above the step's budget
    long long rhs_evaluations = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;  // empty unless requested
    StateVector final_state;
    IntegratorStats stats;
    double max_norm_drift = 0.0;
};

/// Allowed deviation of the squared norm from 1 at any checkpoint.
inline constexpr double kNormDriftLimit = 1e-6;

namespace dop853 {

inline constexpr int kStages = 12;

inline constexpr std::array<double, kStages> C = {
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510,
    0.281649658092772603273242802490,
    0.333333333333333333333333333333,
    0.25,
    0.307692307692307692307692307692,
    0.651282051282051282051282051282,
    0.6,
    0.857142857142857142857142857142,
    1.0,
};

// Strictly lower-triangular stage matrix, row s holds a_{s,0..s-1}.
inline constexpr std::array<std::array<double, kStages>, kStages> A = {{
    {},
    {5.26001519587677318785587544488e-2},
    {1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2},
    {2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2},
    {2.41365134159266685502369798665e-1, 0.0, -8.84549479328286085344864962717e-1,
     9.24834003261792003115737966543e-1},
    {3.7037037037037037037037037037e-2, 0.0, 0.0, 1.70828608729473871279604482173e-1,
     1.25467687566822425016691814123e-1},
    {3.7109375e-2, 0.0, 0.0, 1.70252211019544039314978060272e-1, 6.02165389804559606850219397283e-2,
     -1.7578125e-2},
    {3.70920001185047927108779319836e-2, 0.0, 0.0, 1.70383925712239993810214054705e-1,
     1.07262030446373284651809199168e-1, -1.53194377486244017527936158236e-2,
     8.27378916381402288758473766002e-3},
    {6.24110958716075717114429577812e-1, 0.0, 0.0, -3.36089262944694129406857109825,
     -8.68219346841726006818189891453e-1, 2.75920996994467083049415600797e1, 2.01540675504778934086186788979e1,
     -4.34898841810699588477366255144e1},
    {4.77662536438264365890433908527e-1, 0.0, 0.0, -2.48811461997166764192642586468,
     -5.90290826836842996371446475743e-1, 2.12300514481811942347288949897e1, 1.52792336328824235832596922938e1,
     -3.32882109689848629194453265587e1, -2.03312017085086261358222928593e-2},
    {-9.3714243008598732571704021658e-1, 0.0, 0.0, 5.18637242884406370830023853209,
     1.09143734899672957818500254654, -8.14978701074692612513997267357, -1.85200656599969598641566180701e1,
     2.27394870993505042818970056734e1, 2.49360555267965238987089396762, -3.0467644718982195003823669022},
    {2.27331014751653820792359768449, 0.0, 0.0, -1.05344954667372501984066689879e1,
     -2.00087205822486249909675718444, -1.79589318631187989172765950534e1, 2.79488845294199600508499808837e1,
     -2.85899827713502369474065508674, -8.87285693353062954433549289258, 1.23605671757943030647266201528e1,
     6.43392746015763530355970484046e-1},
}};

inline constexpr std::array<double, kStages> B = {
    5.42937341165687622380535766363e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.45031289275240888144113950566,
    1.89151789931450038304281599044,
    -5.8012039600105847814672114227,
    3.1116436695781989440891606237e-1,
    -1.52160949662516078556178806805e-1,
    2.01365400804030348374776537501e-1,
    4.47106157277725905176885569043e-2,
};

// Error weights over the 12 stages plus the FSAL derivative (index 12).
inline constexpr std::array<double, kStages + 1> E3 = {
    B[0] - 0.244094488188976377952755905512,
    B[1],
    B[2],
    B[3],
    B[4],
    B[5],
    B[6],
    B[7],
    B[8] - 0.733846688281611857341361741547,
    B[9],
    B[10],
    B[11] - 0.220588235294117647058823529412e-1,
    0.0,
};

inline constexpr std::array<double, kStages + 1> E5 = {
    0.1312004499419488073250102996e-1,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753e+1,
    -0.4957589496572501915214079952,
    0.1664377182454986536961530415e+1,
    -0.3503288487499736816886487290,
    0.3341791187130174790297318841,
    0.8192320648511571246570742613e-1,
    -0.2235530786388629525884427845e-1,
    0.0,
};

inline constexpr double kSafety = 0.9;
inline constexpr double kMinFactor = 0.2;
inline constexpr double kMaxFactor = 10.0;
inline constexpr double kErrorExponent = -1.0 / 8.0;
// The per-step norm defect of an order-8 method scales like h^9.
inline constexpr double kNormExponent = 1.0 / 9.0;
inline constexpr int kMaxNormRetries = 20;

}  // namespace dop853

/// Schrodinger right-hand side f(t, psi) = -i H(t) psi.
template <TimeDependentOperator Op>
class SchrodingerRhs {
  public:
    explicit SchrodingerRhs(const Op& op) : op_(op) {}

    void operator()(double t, std::span<const Complex> y, std::span<Complex> dy) {
        op_.apply(t, y, dy);
        for (auto& v : dy) v = Complex(v.imag(), -v.real());
        ++evaluations;
    }

    long long evaluations = 0;

  private:
    const Op& op_;
};

namespace detail {

inline double rms_scaled(std::span<const Complex> v, std::span<const double> scale) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::norm(v[i]) / (scale[i] * scale[i]);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace detail

/// Observer invoked at each checkpoint with (index, time, state).
using CheckpointObserver = std::function<void(std::size_t, double, const StateVector&)>;

/// Integrates from psi0 at t = 0 through every checkpoint of `sched`.
/// Throws IntegrationError on step-size underflow or when the squared norm
/// drifts from 1 by more than kNormDriftLimit.
template <TimeDependentOperator Op>
Trajectory evolve(const Op& op, const StateVector& psi0, const Schedule& sched,
                  const CheckpointObserver& observer = {}, bool keep_states = false) {
    using namespace dop853;
    sched.validate();
    if (!(op.space() == psi0.space)) throw ConfigError("evolve: state and program live in different spaces");
    if (std::abs(psi0.norm_squared() - 1.0) > kNormDriftLimit) throw ConfigError("evolve: initial state is not normalized");

    const std::size_t n = psi0.size();
    SchrodingerRhs<Op> rhs(op);
    Trajectory traj;

    std::vector<Complex> y = psi0.amplitudes;
    std::vector<Complex> f(n), y_new(n), f_new(n), tmp(n);
    std::vector<Complex> K(static_cast<std::size_t>(kStages + 1) * n);
    std::vector<double> scale(n);
    auto stage = [&](int s) { return std::span<Complex>(K.data() + static_cast<std::size_t>(s) * n, n); };

    StateVector current(psi0.space);
    auto record = [&](std::size_t k, double t) {
        current.amplitudes = y;
        const double drift = std::abs(current.norm_squared() - 1.0);
        traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
        if (drift > kNormDriftLimit) {
            std::ostringstream msg;
            msg << "norm drift " << drift << " at t = " << t << " exceeds " << kNormDriftLimit;
            throw IntegrationError(msg.str());
        }
        traj.times.push_back(t);
        if (keep_states) traj.states.push_back(current);
        if (observer) observer(k, t, current);
    };

    double t = 0.0;
    record(0, t);
    rhs(t, y, f);

    // Initial step after Hairer, Norsett & Wanner II.4.
    double h_abs;
    {
        const double interval = sched.total_time;
        for (std::size_t i = 0; i < n; ++i) scale[i] = sched.atol + std::abs(y[i]) * sched.rtol;
        const double d0 = detail::rms_scaled(y, scale);
        const double d1 = detail::rms_scaled(f, scale);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, interval);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h0 * f[i];
        rhs(t + h0, tmp, y_new);
        for (std::size_t i = 0; i < n; ++i) y_new[i] -= f[i];
        const double d2 = detail::rms_scaled(y_new, scale) / h0;
        const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                       : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
        h_abs = std::min({100 * h0, h1, interval});
        if (!(h_abs > 0.0)) h_abs = 1e-6;
    }

    for (std::size_t k = 1; k < sched.checkpoints.size(); ++k) {
        const double t_bound = sched.checkpoints[k];
        while (t < t_bound) {
            const double min_step = 10.0 * std::abs(std::nextafter(t, std::numeric_limits<double>::infinity()) - t);
            if (h_abs < min_step) h_abs = min_step;
            bool rejected = false;
            int norm_streak = 0;
            while (true) {
                if (h_abs < min_step) {
                    std::ostringstream msg;
                    msg << "step size underflow at t = " << t << " (h = " << h_abs << ")";
                    throw IntegrationError(msg.str());
                }
                double t_new = t + h_abs;
                const bool clipped = t_new >= t_bound;
                if (clipped) t_new = t_bound;
                const double h = t_new - t;

                std::copy(f.begin(), f.end(), stage(0).begin());
                for (int s = 1; s < kStages; ++s) {
                    for (std::size_t i = 0; i < n; ++i) {
                        Complex acc = 0.0;
                        for (int j = 0; j < s; ++j) acc += A[s][j] * K[static_cast<std::size_t>(j) * n + i];
                        tmp[i] = y[i] + h * acc;
                    }
                    rhs(t + C[s] * h, tmp, stage(s));
                }
                for (std::size_t i = 0; i < n; ++i) {
                    Complex acc = 0.0;
                    for (int j = 0; j < kStages; ++j) acc += B[j] * K[static_cast<std::size_t>(j) * n + i];
                    y_new[i] = y[i] + h * acc;
                }
                rhs(t_new, y_new, f_new);
                std::copy(f_new.begin(), f_new.end(), stage(kStages).begin());

                double err5 = 0.0, err3 = 0.0, norm_old = 0.0, norm_new = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    Complex e5 = 0.0, e3 = 0.0;
                    for (int j = 0; j <= kStages; ++j) {
                        const Complex kv = K[static_cast<std::size_t>(j) * n + i];
                        e5 += E5[j] * kv;
                        e3 += E3[j] * kv;
                    }
                    const double sc = sched.atol + std::max(std::abs(y[i]), std::abs(y_new[i])) * sched.rtol;
                    err5 += std::norm(e5) / (sc * sc);
                    err3 += std::norm(e3) / (sc * sc);
                    norm_old += std::norm(y[i]);
                    norm_new += std::norm(y_new[i]);
                }
                double error_norm = 0.0;
                if (err5 != 0.0 || err3 != 0.0) {
                    const double dim = sched.rms_error_norm ? static_cast<double>(n) : 1.0;
                    error_norm = h * err5 / std::sqrt((err5 + 0.01 * err3) * dim);
                }
                // Norm guard: each step may spend its share h / T of the budget.
                const double step_drift = std::abs(norm_new - norm_old);
                const double allowed = sched.norm_budget * h / sched.total_time;
                const double norm_factor =
                    step_drift <= 0.0 ? kMaxFactor
                                      : std::clamp(kSafety * std::pow(allowed / step_drift, kNormExponent), kMinFactor, kMaxFactor);

                if (error_norm < 1.0 && step_drift <= allowed) {
                    double factor = error_norm == 0.0 ? kMaxFactor
                                                      : std::min(kMaxFactor, kSafety * std::pow(error_norm, kErrorExponent));
                    factor = std::min(factor, norm_factor);
                    if (rejected) factor = std::min(1.0, factor);
                    // A step shortened to land on a checkpoint does not shrink the next proposal.
                    h_abs = clipped ? std::max(h_abs, h * factor) : h * factor;
                    t = t_new;
                    y.swap(y_new);
                    f.swap(f_new);
                    ++traj.stats.accepted_steps;
                    break;
                }
                if (error_norm >= 1.0) {
                    ++traj.stats.rejected_steps;
                } else {
                    ++traj.stats.norm_rejections;
                    // For a Hermitian generator the norm defect shrinks like a high
                    // power of h, so a few retries suffice. A defect linear in h
                    // cannot be fixed by stepping.
                    if (++norm_streak > kMaxNormRetries) {
                        std::ostringstream msg;
                        msg << "norm budget unattainable at t = " << t << " (step drift " << step_drift
                            << " for h = " << h << "); is the generator Hermitian?";
                        throw IntegrationError(msg.str());
                    }
                }
                double shrink = error_norm >= 1.0 ? std::max(kMinFactor, kSafety * std::pow(error_norm, kErrorExponent)) : 1.0;
                shrink = std::min({shrink, norm_factor, kSafety});
                h_abs = h * shrink;
                rejected = true;
            }
        }
        record(k, t_bound);
    }
    traj.stats.rhs_evaluations = rhs.evaluations;
    traj.final_state = std::move(current);
    return traj;
}

}  // namespace qchop
