#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "annealed_ldp/legendre.hpp"
#include "annealed_ldp/math.hpp"
#include "annealed_ldp/thermo.hpp"

namespace annealed_ldp {

// ---------------------------------------------------------------------------
// Joint rate function of (spin mean, weighted spin mean) under the annealed
// measure, in its two equivalent forms:
//
//   I_an(x1,x2) = I(x1,x2)   - s2 x2^2 - B x1      - log 2 - alpha + psi_an
//   I_an(x1,x2) = I^B(x1,x2) - s2 x2^2 - logcosh B - log 2 - alpha + psi_an
//
// with s2 = sinh(beta) / (2 E[W]). Both vanish at the law-of-large-numbers
// point and are +infinity off the achievable moment region.
// ---------------------------------------------------------------------------

namespace detail {

struct RateContext {
    double s2;       // sinh(beta) / (2 E[W])
    double alpha_b;  // alpha(beta)
    double psi;      // psi_an(beta, B)
};

inline RateContext rate_context(const ModelPoint& p) {
    check_point(p);
    return {std::sinh(p.beta) / (2.0 * p.model.mean_w), alpha(p.beta, p.model),
            annealed_pressure(p)};
}

inline RateEval finish_joint(RateEval base, double x2, double tilt_const,
                             const RateContext& ctx) {
    if (!base.finite) return base;
    base.value += -ctx.s2 * x2 * x2 - tilt_const - M_LN2 - ctx.alpha_b + ctx.psi;
    return base;
}

// Minimize f over the open interior of [lo, hi]; single-type models collapse
// the interval to a point, which is then evaluated exactly (no padding).
template <class F>
ScanMinimum minimize_over_interval(F&& f, double lo, double hi,
                                   const std::vector<double>& seeds = {}) {
    const double width = hi - lo;
    if (!(width > 4e-12 * std::max(1.0, std::abs(lo) + std::abs(hi)))) {
        ScanMinimum m;
        m.x = 0.5 * (lo + hi);
        m.value = f(m.x);
        return m;
    }
    const double pad = 1e-9 * std::max(1.0, width);
    return scan_minimize(f, lo + pad, hi - pad, 65, 1e-10, seeds);
}

}  // namespace detail

inline RateEval joint_rate(double x1, double x2, const ModelPoint& p) {
    const auto ctx = detail::rate_context(p);
    return detail::finish_joint(entropy_rate(x1, x2, p.model), x2, p.B * x1, ctx);
}

inline RateEval joint_rate_alt(double x1, double x2, const ModelPoint& p) {
    const auto ctx = detail::rate_context(p);
    return detail::finish_joint(entropy_rate_tilted(x1, x2, p.B, p.model), x2,
                                log_cosh(p.B), ctx);
}

// ---------------------------------------------------------------------------
// Variational pressure: psi_an as minus the infimum of either bracketed form,
// evaluated by nested numerical contraction (inner minimization over x1 is
// convex; the outer x2 profile can be double-welled below beta_c, so it gets
// a scan plus golden refinement seeded with the fixed-point prediction).
// ---------------------------------------------------------------------------

enum class PressureForm { two_dim, two_dim_B };

inline double pressure_variational(const ModelPoint& p, PressureForm form) {
    check_point(p);
    const double EW = p.model.mean_w;
    const double s2 = std::sinh(p.beta) / (2.0 * EW);
    const double a_b = alpha(p.beta, p.model);

    // Inner contraction over x1, in closed form through the stationarity of
    // the respective entropy rate: for the plain form the x1-derivative pins
    // t1 = B, for the tilted form t1 = 0, and either way the profile in x2 is
    // the 1D weighted-spin rate. The outer sup over x2 stays numerical, with
    // the scalar fixed point x* = sqrt(E[W]/theta) z* seeding the search.
    auto bracketed = [&](double x2) {
        const RateEval wer = weighted_entropy_rate(x2, p.B, p.model);
        if (!wer.finite) return kInf;
        double inner, tilt_const;
        if (form == PressureForm::two_dim) {
            inner = wer.value - log_cosh(p.B);  // inf_x1 [ I(x1,x2) - B x1 ]
            tilt_const = 0.0;
        } else {
            inner = wer.value;  // inf_x1 I^B(x1,x2)
            tilt_const = log_cosh(p.B);
        }
        return inner - s2 * x2 * x2 - tilt_const - M_LN2 - a_b;
    };

    const double theta = std::sinh(p.beta);
    std::vector<double> seeds;
    if (theta > 0.0) {
        const double x2_pred = solve_z_star(theta, p.B, p.model).z_star * std::sqrt(EW / theta);
        seeds = {x2_pred, -x2_pred};
    }
    const double edge = EW * (1.0 - 1e-9);
    const auto min = scan_minimize(bracketed, -edge, edge, 65, 1e-10, seeds);
    return -min.value;
}

// ---------------------------------------------------------------------------
// Contraction rates for the spin mean and the weighted spin mean.
// ---------------------------------------------------------------------------

inline RateEval spin_rate(double m, const ModelPoint& p) {
    if (!(std::abs(m) < 1.0)) return RateEval::infinite(m, 0.0);
    const auto ctx = detail::rate_context(p);
    const auto rng = detail::x2_range_given_x1(p.model, m);
    auto f = [&](double x2) {
        return detail::finish_joint(entropy_rate(m, x2, p.model), x2, p.B * m, ctx).value;
    };
    const auto min = detail::minimize_over_interval(f, rng.lo, rng.hi);
    RateEval out = detail::finish_joint(entropy_rate(m, min.x, p.model), min.x, p.B * m, ctx);
    out.x1 = m;
    out.x2 = min.x;
    return out;
}

inline RateEval weighted_spin_rate(double x2, const ModelPoint& p) {
    if (!(std::abs(x2) < p.model.mean_w)) return RateEval::infinite(0.0, x2);
    const auto ctx = detail::rate_context(p);
    const auto rng = detail::x1_range_given_x2(p.model, x2);
    auto f = [&](double x1) {
        return detail::finish_joint(entropy_rate(x1, x2, p.model), x2, p.B * x1, ctx).value;
    };
    const auto min = detail::minimize_over_interval(f, rng.lo, rng.hi);
    RateEval out =
        detail::finish_joint(entropy_rate(min.x, x2, p.model), x2, p.B * min.x, ctx);
    out.x1 = min.x;
    out.x2 = x2;
    return out;
}

// ---------------------------------------------------------------------------
// High-temperature route: Legendre transform of t -> psi_an(beta, B + t),
//
//   I(m) = sup_t { m t - psi_an(beta, B + t) } + psi_an(beta, B),
//
// solved through the monotone stationarity m = M(beta, B + t). Above beta_c
// the magnetization jumps across B + t = 0, the transform develops an affine
// flat piece over |m| < m+, and those m are not exposed points: the returned
// value is the flat-piece (convex envelope) value with non_exposed set.
// ---------------------------------------------------------------------------

inline RateEval spin_rate_highT(double m, const ModelPoint& p) {
    if (!(std::abs(m) < 1.0)) return RateEval::infinite(m, 0.0);
    check_point(p);
    const double psi_b = annealed_pressure(p);
    auto psi_at = [&](double field) { return annealed_pressure({p.beta, field, p.model}); };
    auto mag_at = [&](double field) { return magnetization({p.beta, field, p.model}); };

    const double slope = std::sinh(p.beta) * p.model.mean_w2 / p.model.mean_w;
    RateEval out;
    out.x1 = m;
    out.finite = true;
    if (slope > 1.0) {
        const double m_plus = spontaneous_magnetization(p.beta, p.model);
        if (std::abs(m) < m_plus - 1e-12) {
            // flat piece: optimum pinned at the kink t = -B
            out.t1 = -p.B;
            out.value = -m * p.B - psi_at(0.0) + psi_b;
            out.non_exposed = true;
            return out;
        }
    }
    // exposed point: bisect the strictly increasing field -> magnetization map
    // on the branch containing m (field s = B + t)
    auto f = [&](double s) { return mag_at(s) - m; };
    double lo, hi;
    if (slope <= 1.0) {
        if (!expand_bracket_increasing(f, lo, hi, 700.0))
            return RateEval::infinite(m, 0.0);
    } else if (m > 0.0) {
        lo = 1e-13;
        hi = 1.0;
        while (f(hi) < 0.0 && hi < 700.0) hi *= 2.0;
        if (f(lo) > 0.0) hi = lo;  // m == m_plus within tolerance
    } else {
        hi = -1e-13;
        lo = -1.0;
        while (f(lo) > 0.0 && lo > -700.0) lo *= 2.0;
        if (f(hi) < 0.0) lo = hi;
    }
    const double s = bisect_increasing(f, lo, hi, 90);
    const double t = s - p.B;
    out.t1 = t;
    out.value = m * t - psi_at(s) + psi_b;
    return out;
}

// ---------------------------------------------------------------------------
// Combinatorial route for the spin rate in the equivalent inhomogeneous
// Curie-Weiss model at coupling bt = sinh(beta):
//
//   I(m) = inf_{x in A} { -bt E[W]/2 - (2 bt/E[W]) x^2 + 2 bt x - B m
//                          + Im(x) + psi_icw(bt, B) },
//
// where x parameterizes the mean weight carried by up spins,
// A = [ (1+m)/2 a_1, (1+m)/2 a_K ],
//   Im(x) = E[ u log u + (1-u) log(1-u) ],  u = sigma(l1 W + l2),
// and (l1, l2) solve E[u] = (1+m)/2, E[W u] = x.
// ---------------------------------------------------------------------------

struct LambdaPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double residual1 = 0.0;
    double residual2 = 0.0;
};

inline LambdaPair solve_lambda(double m, double x, const WeightModel& model) {
    if (!(std::abs(m) < 1.0)) throw domain_error("solve_lambda: need |m| < 1");
    const double ubar = 0.5 * (1.0 + m);
    const std::size_t K = model.num_types();
    LambdaPair out;
    if (K == 1) {
        // single atom: x is forced to a * (1+m)/2 and only l1 a + l2 matters;
        // gauge-fixed by l1 = 0
        const double forced = model.atoms[0] * ubar;
        if (std::abs(x - forced) > 1e-9 * std::max(1.0, forced))
            throw domain_error("solve_lambda: x unreachable for a single-type model");
        out.lambda1 = 0.0;
        out.lambda2 = std::log(ubar / (1.0 - ubar));
        out.residual1 = model.expect([&](double) { return logistic(out.lambda2); }) - ubar;
        out.residual2 = model.expect([&](double a) { return a * logistic(out.lambda2); }) - x;
        return out;
    }
    if (!(x > ubar * model.atoms.front()) || !(x < ubar * model.atoms.back()))
        throw domain_error("solve_lambda: x outside the open interval of reachable means");

    auto e_u = [&](double l1, double l2) {
        return model.expect([&](double a) { return logistic(l1 * a + l2); });
    };
    auto ew_u = [&](double l1, double l2) {
        return model.expect([&](double a) { return a * logistic(l1 * a + l2); });
    };
    auto l2_for = [&](double l1) {
        auto f = [&](double l2) { return e_u(l1, l2) - ubar; };
        // always brackets (the range of E[u] is (0,1)); the root scales with l1
        const double cap = 745.0 + std::abs(l1) * model.atoms.back();
        double lo, hi;
        expand_bracket_increasing(f, lo, hi, cap);
        return bisect_increasing(f, lo, hi, 90);
    };
    auto outer = [&](double l1) { return ew_u(l1, l2_for(l1)) - x; };
    double lo, hi;
    if (!expand_bracket_increasing(outer, lo, hi))
        throw domain_error("solve_lambda: x unreachable for the given m");
    double l1 = bisect_increasing(outer, lo, hi, 90);
    double l2 = l2_for(l1);

    for (int it = 0; it < 4; ++it) {  // 2x2 Newton polish, u' = u(1-u)
        const double r1 = ubar - e_u(l1, l2);
        const double r2 = x - ew_u(l1, l2);
        if (std::abs(r1) < 1e-14 && std::abs(r2) < 1e-14 * std::max(1.0, model.mean_w)) break;
        auto up = [&](double a) {
            const double u = logistic(l1 * a + l2);
            return u * (1.0 - u);
        };
        const double j11 = model.expect([&](double a) { return a * up(a); });
        const double j12 = model.expect([&](double a) { return up(a); });
        const double j21 = model.expect([&](double a) { return a * a * up(a); });
        const double j22 = j11;
        const double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 1e-300)) break;
        const double d1 = (j22 * r1 - j12 * r2) / det;
        const double d2 = (j11 * r2 - j21 * r1) / det;
        if (std::abs(ubar - e_u(l1 + d1, l2 + d2)) + std::abs(x - ew_u(l1 + d1, l2 + d2)) <
            std::abs(r1) + std::abs(r2)) {
            l1 += d1;
            l2 += d2;
        } else {
            break;
        }
    }
    out.lambda1 = l1;
    out.lambda2 = l2;
    out.residual1 = e_u(l1, l2) - ubar;
    out.residual2 = ew_u(l1, l2) - x;
    return out;
}

// Im(x) = E[u log u + (1-u) log(1-u)] at the solved multipliers; stable form
// u log u + (1-u) log(1-u) = u v - log(1 + e^v) with v = l1 W + l2.
inline double up_spin_entropy(double m, double x, const WeightModel& model,
                              LambdaPair* pair_out = nullptr) {
    const LambdaPair lp = solve_lambda(m, x, model);
    if (pair_out) *pair_out = lp;
    return model.expect([&](double a) {
        const double v = lp.lambda1 * a + lp.lambda2;
        return logistic(v) * v - log1pexp(v);
    });
}

inline RateEval combinatorial_spin_rate(double m, const ModelPoint& p) {
    if (!(std::abs(m) < 1.0)) return RateEval::infinite(m, 0.0);
    check_point(p);
    const WeightModel& model = p.model;
    const double bt = std::sinh(p.beta);
    const double EW = model.mean_w;
    const double psi_icw = icw_pressure(bt, p.B, model);
    const double ubar = 0.5 * (1.0 + m);

    auto objective = [&](double x, LambdaPair* lp) {
        return -0.5 * bt * EW - (2.0 * bt / EW) * x * x + 2.0 * bt * x - p.B * m +
               up_spin_entropy(m, x, model, lp) + psi_icw;
    };

    RateEval out;
    out.x1 = m;
    if (model.num_types() == 1) {
        LambdaPair lp;
        out.value = objective(model.atoms[0] * ubar, &lp);
        out.t1 = lp.lambda1;
        out.t2 = lp.lambda2;
        out.x2 = model.atoms[0] * ubar;
        out.finite = true;
        return out;
    }
    const auto rng = detail::weighted_mean_range(model, ubar);
    auto f = [&](double x) {
        try {
            return objective(x, nullptr);
        } catch (const domain_error&) {
            return kInf;
        }
    };
    const auto min = detail::minimize_over_interval(f, rng.lo, rng.hi);
    LambdaPair lp;
    out.value = objective(min.x, &lp);
    out.t1 = lp.lambda1;
    out.t2 = lp.lambda2;
    out.x2 = min.x;
    out.finite = true;
    return out;
}

// ---------------------------------------------------------------------------
// Rate curve over a grid of spin means, for the CLI and sweep-style checks.
// ---------------------------------------------------------------------------

enum class SpinRateMethod { contraction, highT_legendre, combinatorial };

inline const char* to_string(SpinRateMethod m) {
    switch (m) {
        case SpinRateMethod::contraction: return "contraction";
        case SpinRateMethod::highT_legendre: return "highT";
        case SpinRateMethod::combinatorial: return "combinatorial";
    }
    return "?";
}

struct SpinRateCurve {
    std::vector<double> grid;        // m values in (-1, 1)
    std::vector<double> values;      // rate at each m
    std::vector<double> minimizers;  // inner x2* (or x*) per m; NaN for highT
    SpinRateMethod method = SpinRateMethod::contraction;
};

inline SpinRateCurve spin_rate_curve(const std::vector<double>& grid, const ModelPoint& p,
                                     SpinRateMethod method) {
    SpinRateCurve c;
    c.grid = grid;
    c.method = method;
    c.values.resize(grid.size());
    c.minimizers.resize(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        RateEval r;
        switch (method) {
            case SpinRateMethod::contraction: r = spin_rate(grid[i], p); break;
            case SpinRateMethod::highT_legendre: r = spin_rate_highT(grid[i], p); break;
            case SpinRateMethod::combinatorial: r = combinatorial_spin_rate(grid[i], p); break;
        }
        c.values[i] = r.value;
        c.minimizers[i] = method == SpinRateMethod::highT_legendre
                              ? std::numeric_limits<double>::quiet_NaN()
                              : r.x2;
    });
    return c;
}

}  // namespace annealed_ldp
