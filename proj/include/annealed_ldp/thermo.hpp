#pragma once

#include <cmath>

#include "annealed_ldp/errors.hpp"
#include "annealed_ldp/fixed_point.hpp"
#include "annealed_ldp/math.hpp"
#include "annealed_ldp/weights.hpp"

namespace annealed_ldp {

// Full parameter triple of the annealed model.
struct ModelPoint {
    double beta = 0.0;  // inverse temperature, >= 0
    double B = 0.0;     // external field
    WeightModel model;
};

inline void check_point(const ModelPoint& p) {
    if (!(p.beta >= 0.0)) throw domain_error("model point: beta must be nonnegative");
    if (p.model.num_types() == 0) throw validation_error("model point: empty weight model");
}

// alpha(beta) = (cosh(beta) - 1) E[W] / 2, the graph-average energy shift that
// separates the annealed pressure from the inhomogeneous Curie-Weiss one.
inline double alpha(double beta, const WeightModel& model) {
    if (!(beta >= 0.0)) throw domain_error("alpha: beta must be nonnegative");
    return 0.5 * (std::cosh(beta) - 1.0) * model.mean_w;
}

// Pressure of the inhomogeneous Curie-Weiss model at coupling theta:
//   log 2 + E[log cosh(sqrt(theta/E[W]) W z* + B)] - z*^2 / 2.
// Generic in theta so the same core serves theta = sinh(beta) and the
// edge-tilted theta = e^t sinh(beta).
inline double icw_pressure(double theta, double B, const WeightModel& model) {
    const FixedPoint fp = solve_z_star(theta, B, model);
    const double scale = theta > 0.0 ? std::sqrt(theta / model.mean_w) : 0.0;
    const double elc =
        model.expect([&](double a) { return log_cosh(scale * a * fp.z_star + B); });
    return M_LN2 + elc - 0.5 * fp.z_star * fp.z_star;
}

inline double annealed_pressure(const ModelPoint& p) {
    check_point(p);
    return alpha(p.beta, p.model) + icw_pressure(std::sinh(p.beta), p.B, p.model);
}

// Critical inverse temperature: asinh(E[W]/E[W^2]).
inline double critical_beta(const WeightModel& model) {
    return std::asinh(model.mean_w / model.mean_w2);
}

inline double magnetization(const ModelPoint& p) {
    check_point(p);
    const double theta = std::sinh(p.beta);
    const FixedPoint fp = solve_z_star(theta, p.B, p.model);
    const double scale = theta > 0.0 ? std::sqrt(theta / p.model.mean_w) : 0.0;
    return p.model.expect([&](double a) { return std::tanh(scale * a * fp.z_star + p.B); });
}

// Spontaneous magnetization m+ = lim_{B->0+} M(beta, B); zero up to the
// critical point, the positive fixed-point branch above it.
inline double spontaneous_magnetization(double beta, const WeightModel& model) {
    const double theta = std::sinh(beta);
    const FixedPoint fp = solve_z_star_zero_field(theta, model);
    if (fp.z_star == 0.0) return 0.0;
    const double scale = std::sqrt(theta / model.mean_w);
    return model.expect([&](double a) { return std::tanh(scale * a * fp.z_star); });
}

// dM/dB by central difference + Richardson. At B = 0 above the critical
// temperature the derivative is one-sided (taken from B > 0); exactly at
// (beta_c, 0) the susceptibility diverges and evaluation is refused.
inline double susceptibility(const ModelPoint& p) {
    check_point(p);
    const double h = std::max(1e-5, 1e-5 * std::abs(p.B));
    auto M = [&](double b) { return magnetization({p.beta, b, p.model}); };
    if (p.B == 0.0) {
        const double slope = std::sinh(p.beta) * p.model.mean_w2 / p.model.mean_w;
        if (std::abs(slope - 1.0) <= 1e-12)
            throw domain_error("susceptibility: diverges at (beta_c, B=0)");
        if (slope > 1.0) {
            // one-sided three-point formula on the B > 0 branch
            const double m0 = spontaneous_magnetization(p.beta, p.model);
            return (-3.0 * m0 + 4.0 * M(h) - M(2.0 * h)) / (2.0 * h);
        }
    }
    return derivative_richardson(M, p.B, h);
}

struct ThermoReport {
    double alpha = 0.0;
    double psi_icw = 0.0;
    double psi_an = 0.0;
    double magnetization = 0.0;
    double susceptibility = 0.0;  // NaN when diverging at (beta_c, 0)
    double z_star = 0.0;
    double beta_c = 0.0;
};

inline ThermoReport thermo_report(const ModelPoint& p) {
    check_point(p);
    ThermoReport r;
    r.alpha = alpha(p.beta, p.model);
    r.psi_icw = icw_pressure(std::sinh(p.beta), p.B, p.model);
    r.psi_an = r.alpha + r.psi_icw;
    r.magnetization = magnetization(p);
    try {
        r.susceptibility = susceptibility(p);
    } catch (const domain_error&) {
        r.susceptibility = std::numeric_limits<double>::quiet_NaN();
    }
    r.z_star = solve_z_star(std::sinh(p.beta), p.B, p.model).z_star;
    r.beta_c = critical_beta(p.model);
    return r;
}

}  // namespace annealed_ldp
