#include <catch2/catch.hpp>

#include <cmath>

#include "annealed_ldp/fixed_point.hpp"
#include "test_helpers.hpp"

using namespace annealed_ldp;

namespace {

// Independent damped Picard iteration z <- (1-g)*z + g*g(z), run to 1e-14.
double picard_oracle(double theta, double B, const WeightModel& m) {
    const double c = std::sqrt(theta / m.mean_w);
    auto g = [&](double z) {
        return m.expect([&](double a) { return std::tanh(c * a * z + B) * c * a; });
    };
    double z = B >= 0 ? 0.1 : -0.1;
    for (int it = 0; it < 200000; ++it) {
        const double next = 0.5 * z + 0.5 * g(z);
        if (std::abs(next - z) < 1e-14) return next;
        z = next;
    }
    return z;
}

}  // namespace

TEST_CASE("trivial and subcritical roots", "[fixedpoint]") {
    const auto m = two_type();
    CHECK(solve_z_star(0.0, 0.0, m).z_star == 0.0);
    CHECK(solve_z_star(0.0, 0.7, m).z_star == 0.0);
    CHECK(solve_z_star(0.0, -2.0, m).z_star == 0.0);

    // sinh(0.2) E[W^2]/E[W] = 0.503 < 1: subcritical, zero-field root is 0
    CHECK(std::sinh(0.2) * m.mean_w2 / m.mean_w < 1.0);
    const auto fp = solve_z_star(std::sinh(0.2), 0.0, m);
    CHECK(fp.z_star == 0.0);
    CHECK(fp.branch == FixedPointBranch::zero);

    // slope at the origin exactly 1: no positive root
    CHECK(solve_z_star_zero_field(0.4, m).z_star == 0.0);
    // slope 0.9
    CHECK(solve_z_star_zero_field(0.9 * 0.4, m).z_star == 0.0);

    CHECK_THROWS_AS(solve_z_star(-0.1, 0.0, m), domain_error);
    CHECK_THROWS_AS(solve_z_star_zero_field(-2.0, m), domain_error);
}

TEST_CASE("signed root against damped Picard", "[fixedpoint]") {
    const auto m = two_type();
    const double theta = std::sinh(0.8);
    const auto fp = solve_z_star(theta, 0.1, m);
    CHECK(fp.z_star > 0.0);
    CHECK(fp.branch == FixedPointBranch::signed_root);
    CHECK(fp.z_star == Approx(picard_oracle(theta, 0.1, m)).margin(1e-12));

    const auto fn = solve_z_star(theta, -0.1, m);
    CHECK(fn.z_star == -fp.z_star);
}

TEST_CASE("zero-field supercritical root against bisection", "[fixedpoint]") {
    // single type a = 1, theta = 2: z = sqrt(2) tanh(sqrt(2) z)
    const auto s = single_type();
    auto h = [](double z) { return std::sqrt(2.0) * std::tanh(std::sqrt(2.0) * z) - z; };
    double lo = 0.1, hi = std::sqrt(2.0);
    REQUIRE(h(lo) > 0.0);
    REQUIRE(h(hi) <= 0.0);
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0 ? lo : hi) = mid;
    }
    const auto fp = solve_z_star_zero_field(2.0, s);
    CHECK(fp.branch == FixedPointBranch::largest_positive);
    CHECK(fp.z_star == Approx(0.5 * (lo + hi)).margin(1e-12));
}

TEST_CASE("residuals, antisymmetry, monotonicity", "[fixedpoint]") {
    for (const auto& m : {two_type(), single_type()}) {
        for (double theta = 0.0; theta <= 3.0 + 1e-9; theta += 0.1) {
            for (double B : {-1.0, -0.1, 0.0, 0.1, 1.0}) {
                const auto fp = solve_z_star(theta, B, m);
                CHECK(fp.residual <= 1e-12);
                if (B != 0.0) {  // at B = 0 the convention picks the positive branch
                    const auto fn = solve_z_star(theta, -B, m);
                    CHECK(std::abs(fn.z_star + fp.z_star) <= 1e-12);
                    if (B > 0.0 && theta > 0.0) CHECK(fp.z_star > 0.0);
                }
            }
        }
        double prev = 0.0;
        for (double theta = 0.0; theta <= 3.0 + 1e-9; theta += 0.1) {
            const double z = solve_z_star(theta, 0.5, m).z_star;
            CHECK(z >= prev - 1e-12);
            prev = z;
        }
    }
}

TEST_CASE("zero-field branch consistent with a vanishing field", "[fixedpoint]") {
    const auto m = two_type();
    for (double theta : {0.5, 0.8, 1.5, 3.0}) {
        const double z0 = solve_z_star_zero_field(theta, m).z_star;
        const double zb = solve_z_star(theta, 1e-6, m).z_star;
        CHECK(std::abs(z0 - zb) <= 1e-4);
    }
}
