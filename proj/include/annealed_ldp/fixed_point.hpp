#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "annealed_ldp/errors.hpp"
#include "annealed_ldp/math.hpp"
#include "annealed_ldp/weights.hpp"

namespace annealed_ldp {

// Scalar order parameter z* solving
//
//   z = E[ tanh( sqrt(theta/E[W]) W z + B ) sqrt(theta/E[W]) W ]  =: g(z)
//
// for an effective coupling theta >= 0 and field B. theta = sinh(beta) gives
// the thermodynamic z*(beta, B); theta = e^t sinh(beta) the edge-tilted one.
// |g| <= sqrt(theta E[W]) bounds every root, g is odd in (z, B) and concave in
// z on z > 0, so for B != 0 there is a unique root with the sign of B, and at
// B = 0 the relevant root is the largest nonnegative one (positive exactly
// when theta E[W^2]/E[W] > 1).

enum class FixedPointBranch { signed_root, zero, largest_positive };

struct FixedPoint {
    double z_star = 0.0;
    double residual = 0.0;  // |g(z*) - z*|
    double coupling = 0.0;  // theta
    double field = 0.0;     // B
    FixedPointBranch branch = FixedPointBranch::zero;
};

namespace detail {

struct FixedPointMap {
    double scale;  // sqrt(theta / E[W])
    const WeightModel& model;

    double g(double z, double B) const {
        return model.expect([&](double a) { return std::tanh(scale * a * z + B) * scale * a; });
    }
    double g_prime(double z, double B) const {
        return model.expect(
            [&](double a) { return sech2(scale * a * z + B) * scale * scale * a * a; });
    }
};

// Bisection on [lo, hi] with g(lo)-lo >= 0 >= g(hi)-hi, then two Newton steps.
inline double polish_root(const FixedPointMap& map, double B, double lo, double hi) {
    auto h = [&](double z) { return map.g(z, B) - z; };
    double z = bisect_increasing([&](double x) { return -h(x); }, lo, hi, 60);
    for (int i = 0; i < 2; ++i) {
        const double hp = map.g_prime(z, B) - 1.0;
        if (std::abs(hp) < 1e-14) break;
        const double step = h(z) / hp;
        const double cand = z - step;
        if (cand >= lo && cand <= hi) z = cand;
    }
    return z;
}

}  // namespace detail

inline FixedPoint solve_z_star_zero_field(double theta, const WeightModel& model) {
    if (theta < 0.0) throw domain_error("solve_z_star: coupling must be nonnegative");
    FixedPoint fp;
    fp.coupling = theta;
    fp.field = 0.0;
    if (theta == 0.0 || theta * model.mean_w2 / model.mean_w <= 1.0) {
        fp.branch = FixedPointBranch::zero;
        return fp;  // slope of g at 0 is <= 1: no positive root
    }
    detail::FixedPointMap map{std::sqrt(theta / model.mean_w), model};
    const double bound = std::sqrt(theta * model.mean_w);
    auto h = [&](double z) { return map.g(z, 0.0) - z; };
    double eps = bound;
    bool found = false;
    for (int i = 0; i < 60; ++i) {
        eps *= 0.5;
        if (h(eps) > 0.0) {
            found = true;
            break;
        }
    }
    if (!found) {
        fp.branch = FixedPointBranch::zero;  // root merged into 0 (critical point)
        return fp;
    }
    fp.z_star = detail::polish_root(map, 0.0, eps, bound);
    fp.residual = std::abs(h(fp.z_star));
    fp.branch = FixedPointBranch::largest_positive;
    return fp;
}

inline FixedPoint solve_z_star(double theta, double B, const WeightModel& model) {
    if (theta < 0.0) throw domain_error("solve_z_star: coupling must be nonnegative");
    if (B == 0.0) return solve_z_star_zero_field(theta, model);
    if (theta == 0.0) {
        FixedPoint fp;
        fp.field = B;
        return fp;  // tanh argument has zero prefactor: z* = 0, branch "zero"
    }
    if (B < 0.0) {  // odd symmetry, solved on the positive side for exact antisymmetry
        FixedPoint fp = solve_z_star(theta, -B, model);
        fp.z_star = -fp.z_star;
        fp.field = B;
        return fp;
    }
    FixedPoint fp;
    fp.coupling = theta;
    fp.field = B;
    fp.branch = FixedPointBranch::signed_root;

    detail::FixedPointMap map{std::sqrt(theta / model.mean_w), model};
    const double bound = std::sqrt(theta * model.mean_w);
    auto h = [&](double z) { return map.g(z, B) - z; };
    if (!(h(0.0) > 0.0) || !(h(bound) <= 0.0)) {
        std::ostringstream os;
        os << "solve_z_star: bracket failure (theta=" << theta << ", B=" << B
           << ", h(0)=" << h(0.0) << ", h(bound)=" << h(bound) << ")";
        throw internal_error(os.str());
    }
    fp.z_star = detail::polish_root(map, B, 0.0, bound);
    fp.residual = std::abs(h(fp.z_star));
    return fp;
}

}  // namespace annealed_ldp
