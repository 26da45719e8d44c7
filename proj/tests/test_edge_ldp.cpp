#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "annealed_ldp/edge_ldp.hpp"
#include "test_helpers.hpp"

using namespace annealed_ldp;

TEST_CASE("edge cgf normalization and pure-graph limit", "[edge_ldp]") {
    const auto m = two_type();
    for (double beta : {0.0, 0.2, 0.8})
        for (double B : {0.0, 0.1, 0.5})
            CHECK(std::abs(edge_cgf(0.0, {beta, B, m}).value) <= 1e-12);

    // at beta = B = 0 the annealed measure is the plain graph law
    const ModelPoint p0{0.0, 0.0, m};
    for (double t : {-1.0, 0.5, 1.0})
        CHECK(edge_cgf(t, p0).value == 0.5 * (std::exp(t) - 1.0) * m.mean_w);
    CHECK(edge_cgf(1.0, p0).value == Approx(std::exp(1.0) - 1.0).margin(1e-12));
    CHECK(edge_cgf_derivative(0.0, p0) == Approx(1.0).margin(1e-14));
}

TEST_CASE("closed-form derivative matches finite differences", "[edge_ldp]") {
    const auto m = two_type();
    const ModelPoint p{0.8, 0.1, m};
    for (double t : {-1.0, 0.0, 1.0}) {
        const double fd = derivative_richardson(
            [&](double u) { return edge_cgf(u, p).value; }, t, 1e-4);
        CHECK(edge_cgf_derivative(t, p) == Approx(fd).margin(1e-6));
    }
    CHECK(edge_cgf(0.7, p).derivative == edge_cgf_derivative(0.7, p));
    // derivative at zero tilt is the typical density
    CHECK(edge_cgf_derivative(0.0, p) == Approx(typical_edge_density(p)).margin(1e-15));
}

TEST_CASE("typical edge density", "[edge_ldp]") {
    const auto m = two_type();
    CHECK(typical_edge_density({0.0, 0.0, m}) == Approx(1.0).margin(1e-15));
    // annealing adds edges once the order parameter turns on
    CHECK(typical_edge_density({0.8, 0.0, m}) > 0.5 * std::cosh(0.8) * m.mean_w);
    for (double beta : {0.0, 0.3, 0.8})
        for (double B : {0.0, 0.5}) {
            const double dens = typical_edge_density({beta, B, m});
            CHECK(dens >= 0.5 * m.mean_w - 1e-12);
            if (beta == 0.0) CHECK(dens == Approx(0.5 * m.mean_w).margin(1e-15));
        }
}

TEST_CASE("edge rate function", "[edge_ldp]") {
    const auto m = two_type();
    for (double beta : {0.0, 0.8})
        for (double B : {0.0, 0.1}) {
            const ModelPoint p{beta, B, m};
            const auto r = edge_rate(typical_edge_density(p), p);
            REQUIRE(r.finite);
            CHECK(std::abs(r.value) <= 1e-10);
        }
    {
        // Cramer form at beta = B = 0 and E[W] = 2: rate(y) = y log y - y + 1
        const ModelPoint p{0.0, 0.0, m};
        for (double y : {0.5, 1.0, 2.0, 3.5})
            CHECK(edge_rate(y, p).value == Approx(y * std::log(y) - y + 1.0).margin(1e-9));
        CHECK(edge_rate(2.0, p).value == Approx(2.0 * M_LN2 - 1.0).margin(1e-9));
    }
    {
        const ModelPoint p{0.8, 0.1, m};
        CHECK_FALSE(edge_rate(0.0, p).finite);
        CHECK_FALSE(edge_rate(-1.0, p).finite);
        const auto tiny = edge_rate(1e-9, p);  // domain edge: flagged, never a crash
        CHECK((!tiny.finite || tiny.value >= 0.0));
        CHECK(edge_rate(typical_edge_density(p) + 0.3, p).value > 1e-4);
        CHECK(edge_rate(typical_edge_density(p) - 0.3, p).value > 1e-4);
    }
}

TEST_CASE("cgf convexity and re-Legendre", "[edge_ldp]") {
    const auto m = two_type();
    const ModelPoint p{0.8, 0.1, m};
    std::vector<double> vals;
    for (double t = -2.0; t <= 2.0 + 1e-12; t += 0.1) vals.push_back(edge_cgf(t, p).value);
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
        CHECK(vals[i + 1] - 2.0 * vals[i] + vals[i - 1] >= -1e-9);

    for (double t : {-0.5, 0.5}) {
        auto f = [&](double y) { return -(t * y - edge_rate(y, p).value); };
        const auto min = scan_minimize(f, 0.05, 8.0, 80, 1e-9);
        CHECK(-min.value == Approx(edge_cgf(t, p).value).margin(1e-5));
    }
}
