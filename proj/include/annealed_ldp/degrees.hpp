#pragma once

#include <cmath>
#include <vector>

#include "annealed_ldp/errors.hpp"
#include "annealed_ldp/thermo.hpp"

namespace annealed_ldp {

// Asymptotic degree law of a weight-w vertex under the annealed measure.
// The moment generating function factorizes as
//
//   E[e^{t D}] = e^{cosh(b) w (e^t - 1)} cosh(a z* e^t w + B) / cosh(a z* w + B),
//
// a = sqrt(sinh(b)/E[W]), which is a two-component Poisson mixture with rates
// w (cosh(b) +- a z*) and weights sigma(+-2 q), q = w a z* + B. The minus rate
// can go negative at strong coupling, in which case the mixture is not a
// probability law and only the MGF is meaningful (valid_pmf tracks this).

inline double degree_mgf(double t, double w, const ModelPoint& p) {
    check_point(p);
    if (!(w > 0.0)) throw domain_error("degree_mgf: weight must be positive");
    const double theta = std::sinh(p.beta);
    const double z = solve_z_star(theta, p.B, p.model).z_star;
    const double a = theta > 0.0 ? std::sqrt(theta / p.model.mean_w) : 0.0;
    return std::exp(std::cosh(p.beta) * w * (std::exp(t) - 1.0) +
                    log_cosh(z * std::exp(t) * w * a + p.B) - log_cosh(z * w * a + p.B));
}

// Degree MGF of a uniformly chosen vertex: E over W of the per-vertex form.
inline double uniform_degree_mgf(double t, const ModelPoint& p) {
    check_point(p);
    return p.model.expect([&](double a) { return degree_mgf(t, a, p); });
}

// Degrees of finitely many tagged vertices are asymptotically independent:
// the joint MGF is the product of the per-vertex ones.
inline double joint_degree_mgf(const std::vector<double>& ts, const std::vector<double>& ws,
                               const ModelPoint& p) {
    if (ts.empty() || ts.size() != ws.size())
        throw validation_error("joint_degree_mgf: need equally sized, non-empty t/w lists");
    double prod = 1.0;
    for (std::size_t i = 0; i < ts.size(); ++i) prod *= degree_mgf(ts[i], ws[i], p);
    return prod;
}

struct DegreeMixture {
    double weight_plus = 0.5;   // P(Y = +1)
    double weight_minus = 0.5;  // P(Y = -1)
    double rate_plus = 0.0;     // w (cosh(b) + a z*)
    double rate_minus = 0.0;    // w (cosh(b) - a z*)
    double a_beta = 0.0;        // sqrt(sinh(b)/E[W])
    bool valid_pmf = true;      // both rates nonnegative
};

inline DegreeMixture degree_mixture(double w, const ModelPoint& p) {
    check_point(p);
    if (!(w > 0.0)) throw domain_error("degree_mixture: weight must be positive");
    const double theta = std::sinh(p.beta);
    const double z = solve_z_star(theta, p.B, p.model).z_star;
    DegreeMixture mix;
    mix.a_beta = theta > 0.0 ? std::sqrt(theta / p.model.mean_w) : 0.0;
    const double q = w * mix.a_beta * z + p.B;  // e^{+-q} split of the cosh ratio
    mix.weight_plus = logistic(2.0 * q);
    mix.weight_minus = 1.0 - mix.weight_plus;
    mix.rate_plus = w * (std::cosh(p.beta) + mix.a_beta * z);
    mix.rate_minus = w * (std::cosh(p.beta) - mix.a_beta * z);
    mix.valid_pmf = mix.rate_plus >= 0.0 && mix.rate_minus >= 0.0;
    return mix;
}

// Explicit pmf, only defined when both mixture rates are nonnegative.
inline double degree_pmf(long d, double w, const ModelPoint& p) {
    if (d < 0) throw domain_error("degree_pmf: degree must be nonnegative");
    const DegreeMixture mix = degree_mixture(w, p);
    if (!mix.valid_pmf)
        throw domain_error("degree_pmf: mixture is not a probability law (negative rate)");
    auto poisson = [&](double rate) {
        if (rate == 0.0) return d == 0 ? 1.0 : 0.0;
        return std::exp(-rate + d * std::log(rate) - std::lgamma(d + 1.0));
    };
    return mix.weight_plus * poisson(mix.rate_plus) + mix.weight_minus * poisson(mix.rate_minus);
}

}  // namespace annealed_ldp
