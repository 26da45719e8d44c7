#pragma once

#include <cmath>

#include "annealed_ldp/legendre.hpp"
#include "annealed_ldp/thermo.hpp"

namespace annealed_ldp {

// Cumulant generating function of the edge count per vertex under the
// annealed measure. The tilt e^t acts on the effective coupling, so
//
//   phi(t) = psi_icw(e^t sinh b, B) - psi_icw(sinh b, B)
//            + (e^t - 1) cosh(b) E[W] / 2,
//
// one theta-parameterized pressure core instead of a separate expansion; the
// log 2 terms cancel in the difference. The derivative has the closed form
// phi'(t) = z*(t)^2 / 2 + e^t cosh(b) E[W] / 2 (the z*'(t) terms cancel
// against the fixed-point identity), which stays valid through the critical
// coupling because z*^2 is continuous there.

struct EdgeCgfEval {
    double t = 0.0;
    double value = 0.0;
    double derivative = 0.0;
    double z_star_t = 0.0;  // z*(t, beta, B)
};

inline double edge_cgf_derivative(double t, const ModelPoint& p) {
    check_point(p);
    const double zt = solve_z_star(std::exp(t) * std::sinh(p.beta), p.B, p.model).z_star;
    return 0.5 * zt * zt + 0.5 * std::exp(t) * std::cosh(p.beta) * p.model.mean_w;
}

inline EdgeCgfEval edge_cgf(double t, const ModelPoint& p) {
    check_point(p);
    const double theta = std::sinh(p.beta);
    EdgeCgfEval e;
    e.t = t;
    e.z_star_t = solve_z_star(std::exp(t) * theta, p.B, p.model).z_star;
    e.value = icw_pressure(std::exp(t) * theta, p.B, p.model) -
              icw_pressure(theta, p.B, p.model) +
              0.5 * (std::exp(t) - 1.0) * std::cosh(p.beta) * p.model.mean_w;
    e.derivative = 0.5 * e.z_star_t * e.z_star_t +
                   0.5 * std::exp(t) * std::cosh(p.beta) * p.model.mean_w;
    return e;
}

// Typical edges per vertex: z*^2/2 + cosh(b) E[W]/2 (= phi'(0)).
inline double typical_edge_density(const ModelPoint& p) {
    check_point(p);
    const double z = solve_z_star(std::sinh(p.beta), p.B, p.model).z_star;
    return 0.5 * z * z + 0.5 * std::cosh(p.beta) * p.model.mean_w;
}

// Legendre transform of phi: rate of observing y edges per vertex. phi' is
// strictly increasing, solved by expanding-bracket bisection on |t| <= 50;
// y at or below the reachable infimum of phi' reports +infinity.
inline RateEval edge_rate(double y, const ModelPoint& p) {
    check_point(p);
    RateEval out = RateEval::infinite(y, 0.0);
    if (!(y > 0.0)) return out;
    auto f = [&](double t) { return edge_cgf_derivative(t, p) - y; };
    const double cap = 50.0;
    if (f(-cap) > 0.0 || f(cap) < 0.0) return out;  // outside the bracketed range
    double lo = -1.0, hi = 1.0;
    while (f(hi) < 0.0 && hi < cap) hi = std::min(cap, 2.0 * hi);
    while (f(lo) > 0.0 && lo > -cap) lo = std::max(-cap, 2.0 * lo);
    const double t = bisect_increasing(f, lo, hi, 90);
    out.value = t * y - edge_cgf(t, p).value;
    out.t1 = t;
    out.finite = true;
    return out;
}

}  // namespace annealed_ldp
