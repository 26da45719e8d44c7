#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "annealed_ldp/math.hpp"
#include "annealed_ldp/weights.hpp"

namespace annealed_ldp {

// Result of a (constrained) Legendre transform evaluation: the rate value,
// the optimizing dual variables and the location it was evaluated at.
struct RateEval {
    double value = kInf;
    double t1 = 0.0;  // dual of x1 (lambda-style multipliers reuse these slots)
    double t2 = 0.0;  // dual of x2
    double x1 = 0.0;
    double x2 = 0.0;
    bool finite = false;
    bool non_exposed = false;  // set by the high-temperature transform on flat pieces

    static RateEval infinite(double x1, double x2) {
        RateEval r;
        r.x1 = x1;
        r.x2 = x2;
        return r;
    }
};

namespace detail {

// Closed interval [lo, hi] of E[W u] over u_k in [0,1] with E[u] = ubar held
// fixed (greedy fill from the smallest / largest atoms). The open interior is
// exactly the set reachable by logistic profiles u_k = sigma(l1 a_k + l2),
// i.e. where the two-constraint stationarity systems are solvable.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

inline Interval weighted_mean_range(const WeightModel& m, double ubar) {
    Interval r;
    double rem = ubar;
    for (std::size_t k = 0; k < m.num_types() && rem > 0.0; ++k) {  // smallest atoms first
        const double u = std::min(1.0, rem / m.probs[k]);
        r.lo += m.probs[k] * m.atoms[k] * u;
        rem -= m.probs[k] * u;
    }
    rem = ubar;
    for (std::size_t k = m.num_types(); k-- > 0 && rem > 0.0;) {  // largest atoms first
        const double u = std::min(1.0, rem / m.probs[k]);
        r.hi += m.probs[k] * m.atoms[k] * u;
        rem -= m.probs[k] * u;
    }
    return r;
}

// Range of E[u] over u_k in [0,1] with E[W u] = x fixed.
inline Interval mean_range_given_weighted(const WeightModel& m, double x) {
    Interval r;
    double rem = x;
    for (std::size_t k = m.num_types(); k-- > 0 && rem > 0.0;) {  // largest atoms: least mass
        const double u = std::min(1.0, rem / (m.probs[k] * m.atoms[k]));
        r.lo += m.probs[k] * u;
        rem -= m.probs[k] * m.atoms[k] * u;
    }
    rem = x;
    for (std::size_t k = 0; k < m.num_types() && rem > 0.0; ++k) {  // smallest atoms: most mass
        const double u = std::min(1.0, rem / (m.probs[k] * m.atoms[k]));
        r.hi += m.probs[k] * u;
        rem -= m.probs[k] * m.atoms[k] * u;
    }
    return r;
}

// Achievable open interval of x2 = E[W tanh(.)] at fixed x1 = E[tanh(.)],
// and of x1 at fixed x2, via the substitution u = (1 + tanh)/2.
inline Interval x2_range_given_x1(const WeightModel& m, double x1) {
    Interval u = weighted_mean_range(m, 0.5 * (1.0 + x1));
    return {2.0 * u.lo - m.mean_w, 2.0 * u.hi - m.mean_w};
}
inline Interval x1_range_given_x2(const WeightModel& m, double x2) {
    Interval u = mean_range_given_weighted(m, 0.5 * (x2 + m.mean_w));
    return {2.0 * u.lo - 1.0, 2.0 * u.hi - 1.0};
}

struct StationaryPoint {
    double t1 = 0.0;
    double t2 = 0.0;
    double r1 = 0.0;  // residuals of the two moment equations
    double r2 = 0.0;
};

// Solve  x1 = E[tanh(shift + t1 + W t2)],  x2 = E[W tanh(shift + t1 + W t2)].
//
// Nested monotone bisection: the t1-equation has a unique root for |x1| < 1 at
// any t2 (E tanh is increasing onto (-1,1)); along that constraint x2(t2) is
// nondecreasing (Cauchy-Schwarz), so the outer equation brackets whenever
// (x1,x2) lies in the achievable region. A 2x2 Newton polish restores the
// last digits. Returns nullopt when the outer bracket cannot straddle within
// |t2| <= 700, which is exactly the unreachable-moment case.
inline std::optional<StationaryPoint> solve_stationary(double x1, double x2, double shift,
                                                       const WeightModel& m) {
    auto e_tanh = [&](double t1, double t2) {
        return m.expect([&](double a) { return std::tanh(shift + t1 + a * t2); });
    };
    auto ew_tanh = [&](double t1, double t2) {
        return m.expect([&](double a) { return a * std::tanh(shift + t1 + a * t2); });
    };
    auto t1_for = [&](double t2) {
        auto f = [&](double t1) { return e_tanh(t1, t2) - x1; };
        // the root is within |shift| + |t2| a_K + atanh(|x1|) of the origin
        const double cap = 745.0 + std::abs(shift) + std::abs(t2) * m.atoms.back();
        double lo, hi;
        if (!expand_bracket_increasing(f, lo, hi, cap)) return cap * (x1 > 0 ? 1.0 : -1.0);
        return bisect_increasing(f, lo, hi, 90);
    };
    auto outer = [&](double t2) { return ew_tanh(t1_for(t2), t2) - x2; };

    double t2 = 0.0;
    const double scale = std::max(1.0, m.mean_w);
    if (std::abs(outer(0.0)) > 1e-13 * scale) {
        double lo, hi;
        if (!expand_bracket_increasing(outer, lo, hi)) return std::nullopt;
        t2 = bisect_increasing(outer, lo, hi, 90);
    }
    double t1 = t1_for(t2);

    // Newton polish on the pair of moment equations
    for (int it = 0; it < 4; ++it) {
        const double r1 = x1 - e_tanh(t1, t2);
        const double r2 = x2 - ew_tanh(t1, t2);
        if (std::abs(r1) < 1e-14 && std::abs(r2) < 1e-14 * scale) break;
        const double j11 = m.expect([&](double a) { return sech2(shift + t1 + a * t2); });
        const double j12 = m.expect([&](double a) { return a * sech2(shift + t1 + a * t2); });
        const double j22 = m.expect([&](double a) { return a * a * sech2(shift + t1 + a * t2); });
        const double det = j11 * j22 - j12 * j12;
        if (!(std::abs(det) > 1e-300)) break;
        const double d1 = (j22 * r1 - j12 * r2) / det;
        const double d2 = (j11 * r2 - j12 * r1) / det;
        const double n1 = e_tanh(t1 + d1, t2 + d2) - x1;
        const double n2 = ew_tanh(t1 + d1, t2 + d2) - x2;
        if (std::abs(n1) + std::abs(n2) < std::abs(r1) + std::abs(r2)) {
            t1 += d1;
            t2 += d2;
        } else {
            break;
        }
    }
    StationaryPoint s;
    s.t1 = t1;
    s.t2 = t2;
    s.r1 = x1 - e_tanh(t1, t2);
    s.r2 = x2 - ew_tanh(t1, t2);
    return s;
}

inline RateEval entropy_rate_impl(double x1, double x2, double shift, double offset,
                                  const WeightModel& m) {
    RateEval out = RateEval::infinite(x1, x2);
    if (!(std::abs(x1) < 1.0) || !(std::abs(x2) < m.mean_w)) return out;
    auto st = solve_stationary(x1, x2, shift, m);
    if (!st) return out;
    const double scale = std::max(1.0, m.mean_w);
    if (std::abs(st->r1) > 1e-10 || std::abs(st->r2) > 1e-10 * scale) return out;
    const double elc =
        m.expect([&](double a) { return log_cosh(shift + st->t1 + a * st->t2); });
    out.value = st->t1 * x1 + st->t2 * x2 - elc + offset;
    out.t1 = st->t1;
    out.t2 = st->t2;
    out.finite = true;
    return out;
}

}  // namespace detail

// I(x1, x2) = sup_{t1,t2} ( t1 x1 + t2 x2 - E[log cosh(t1 + W t2)] ):
// joint entropy rate of (spin mean, weighted spin mean) under fair coins.
// +infinity outside |x1| < 1, |x2| < E[W] and off the achievable moment set.
inline RateEval entropy_rate(double x1, double x2, const WeightModel& m) {
    return detail::entropy_rate_impl(x1, x2, 0.0, 0.0, m);
}

// Field-tilted variant:
// I^B(x1,x2) = sup ( t1 x1 + t2 x2 - E[log cosh(B + t1 + W t2)] ) + log cosh B.
inline RateEval entropy_rate_tilted(double x1, double x2, double B, const WeightModel& m) {
    return detail::entropy_rate_impl(x1, x2, B, log_cosh(B), m);
}

// 1D weighted-spin rate  I^(w)(x) = sup_t ( t x - E[log cosh(B + W t)] ) + log cosh B.
// f(t) = E[W tanh(B + W t)] is strictly increasing onto (-E[W], E[W]).
inline RateEval weighted_entropy_rate(double x, double B, const WeightModel& m) {
    RateEval out = RateEval::infinite(std::numeric_limits<double>::quiet_NaN(), x);
    if (!(std::abs(x) < m.mean_w)) return out;
    auto f = [&](double t) {
        return m.expect([&](double a) { return a * std::tanh(B + a * t); }) - x;
    };
    double lo, hi;
    if (!expand_bracket_increasing(f, lo, hi)) return out;
    double t = bisect_increasing(f, lo, hi, 90);
    for (int i = 0; i < 3; ++i) {  // Newton polish, derivative E[W^2 sech^2] > 0
        const double fp = m.expect([&](double a) { return a * a * sech2(B + a * t); });
        if (!(fp > 1e-300)) break;
        t -= f(t) / fp;
    }
    const double elc = m.expect([&](double a) { return log_cosh(B + a * t); });
    out.value = t * x - elc + log_cosh(B);
    out.t1 = 0.0;
    out.t2 = t;
    out.x1 = m.expect([&](double a) { return std::tanh(B + a * t); });
    out.finite = true;
    return out;
}

}  // namespace annealed_ldp
