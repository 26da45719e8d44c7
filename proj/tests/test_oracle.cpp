#include <catch2/catch.hpp>

#include <cmath>
#include <cstdlib>

#include "annealed_ldp/degrees.hpp"
#include "annealed_ldp/edge_ldp.hpp"
#include "annealed_ldp/mc.hpp"
#include "annealed_ldp/oracle.hpp"
#include "test_helpers.hpp"

using namespace annealed_ldp;

TEST_CASE("tilted pair parameters", "[oracle]") {
    {
        // no spin coupling: the tilt acts on the edge indicator alone
        const auto tp = tilted_edge_params(0.7, 0.3, 0.0);
        CHECK(tp.beta_t == Approx(0.0).margin(1e-15));
        CHECK(tp.c_t == Approx(std::exp(0.7) * 0.3 + 0.7).margin(1e-14));
    }
    for (double t : {0.0, 0.5, -1.0}) {
        const double p = 0.3, beta = 1.0;
        const auto tp = tilted_edge_params(t, p, beta);
        for (double ss : {1.0, -1.0}) {
            const double lhs = std::exp(t + beta * ss) * p + (1.0 - p);
            const double rhs = tp.c_t * std::exp(tp.beta_t * ss);
            CHECK(lhs == Approx(rhs).margin(1e-14));
        }
    }
    {
        // deep negative tilt suppresses the edge entirely
        const auto tp = tilted_edge_params(-40.0, 0.3, 1.0);
        CHECK(std::abs(tp.beta_t) <= 1e-12);
        CHECK(tp.c_t == Approx(0.7).margin(1e-12));
    }
    CHECK_THROWS_AS(tilted_edge_params(0.0, 0.0, 1.0), domain_error);
    CHECK_THROWS_AS(tilted_edge_params(0.0, 1.0, 1.0), domain_error);
}

TEST_CASE("exact partition function", "[oracle]") {
    // one vertex: no edges at all
    for (double B : {0.0, 0.7}) {
        const auto inst = make_exact_instance({1}, {2.0}, 0.9, B);
        CHECK(exact_log_partition(inst) == Approx(std::log(2.0 * std::cosh(B))).margin(1e-14));
    }
    {
        // two mixed-type vertices, enumerated by hand: ell = 4, p12 = 3/7
        const double beta = 0.8, B = 0.25;
        const auto inst = make_exact_instance({1, 1}, {1.0, 3.0}, beta, B);
        const double z = (std::exp(2.0 * B) + std::exp(-2.0 * B)) *
                             (3.0 * std::exp(beta) + 4.0) / 7.0 +
                         2.0 * (3.0 * std::exp(-beta) + 4.0) / 7.0;
        CHECK(exact_log_partition(inst) == Approx(std::log(z)).margin(1e-13));
    }
    {
        const auto inst = make_exact_instance({6, 6}, {1.0, 3.0}, 0.8, 0.1);
        const auto [model, seq] = counts_to_model({6, 6}, {1.0, 3.0});
        const double a = exact_log_partition(inst);
        const double b = brute_force_log_partition(seq, 0.8, 0.1);
        CHECK(std::abs(a - b) / std::abs(b) <= 1e-10);
    }
    CHECK_THROWS_AS(make_exact_instance({0, 0}, {1.0, 3.0}, 0.5, 0.0), validation_error);
    CHECK_THROWS_AS(
        exact_log_partition(make_exact_instance({3000, 3000}, {1.0, 3.0}, 0.5, 0.0)),
        resource_error);
}

TEST_CASE("brute force partition function", "[oracle]") {
    for (double B : {0.0, -0.6}) {
        WeightSequence seq;
        seq.weights = {1.5};
        seq.total = 1.5;
        CHECK(brute_force_log_partition(seq, 1.1, B) ==
              Approx(std::log(2.0 * std::cosh(B))).margin(1e-14));
    }
    WeightSequence big;
    big.weights.assign(17, 1.0);
    big.total = 17.0;
    CHECK_THROWS_AS(brute_force_log_partition(big, 0.5, 0.0), resource_error);
}

TEST_CASE("deterministic across thread counts", "[oracle]") {
    const auto inst = make_exact_instance({40, 40}, {1.0, 3.0}, 0.8, 0.1);
    setenv("ANNEALED_LDP_THREADS", "1", 1);
    const double one = exact_log_partition(inst);
    setenv("ANNEALED_LDP_THREADS", "3", 1);
    const double three = exact_log_partition(inst);
    unsetenv("ANNEALED_LDP_THREADS");
    CHECK(one == three);
}

TEST_CASE("exact spin distribution", "[oracle]") {
    {
        // independent fair spins: binomial law
        const auto dist = exact_spin_distribution(make_exact_instance({5, 5}, {1.0, 3.0}, 0.0, 0.0));
        CHECK(dist.prob(10) == Approx(std::pow(2.0, -10.0)).margin(1e-14));
        CHECK(dist.prob(0) == Approx(252.0 / 1024.0).margin(1e-13));
        CHECK(dist.prob(1) == 0.0);  // off parity
        double sum = 0.0;
        for (double q : dist.pmf) sum += q;
        CHECK(sum == Approx(1.0).margin(1e-12));
        for (long s = 0; s <= 10; s += 2) CHECK(dist.prob(s) == Approx(dist.prob(-s)).margin(1e-12));
    }
    {
        // strong field pins the spins up
        const auto dist = exact_spin_distribution(make_exact_instance({6, 6}, {1.0, 3.0}, 0.5, 5.0));
        CHECK(dist.prob(12) > 0.99);
    }
    {
        // low temperature, zero field: bimodal law
        const auto dist =
            exact_spin_distribution(make_exact_instance({200, 200}, {1.0, 3.0}, 0.8, 0.0));
        const double mid = dist.prob(0);
        double peak = 0.0;
        long arg = 0;
        for (long s = -400; s <= 400; s += 2)
            if (dist.prob(s) > peak) {
                peak = dist.prob(s);
                arg = std::abs(s);
            }
        CHECK(peak > 100.0 * mid);
        CHECK(arg > 300);  // modes near +-m_plus * n = +-330
        CHECK(arg < 360);
    }
}

TEST_CASE("exact edge MGF", "[oracle]") {
    const auto inst = make_exact_instance({3, 2}, {1.0, 3.0}, 0.7, 0.2);
    CHECK(exact_edge_mgf(0.0, inst) == Approx(1.0).margin(1e-12));
    {
        // beta = B = 0: independent Bernoulli edges
        const auto free = make_exact_instance({3, 2}, {1.0, 3.0}, 0.0, 0.0);
        for (double t : {-0.8, 0.6}) {
            double expected = 1.0;
            const std::vector<long> counts{3, 2};
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = k; l < 2; ++l) {
                    const double p = free.p_edge[k][l];
                    const double pairs =
                        k == l ? 0.5 * counts[k] * (counts[k] - 1) : double(counts[k] * counts[l]);
                    expected *= std::pow(std::exp(t) * p + 1.0 - p, pairs);
                }
            CHECK(exact_edge_mgf(t, free) == Approx(expected).margin(1e-12));
        }
    }
    {
        // finite-n cumulant density approaches the limit from the edge module
        const auto model = two_type();
        const ModelPoint p{0.8, 0.3, model};
        for (double t : {-0.5, 0.5}) {
            const double phi = edge_cgf(t, p).value;
            double prev = kInf;
            for (long n : {50L, 100L, 200L}) {
                const auto in = make_exact_instance({n / 2, n / 2}, {1.0, 3.0}, 0.8, 0.3);
                const double err = std::abs(exact_log_edge_mgf(t, in) / n - phi);
                CHECK(err < prev);
                prev = err;
            }
        }
    }
}

TEST_CASE("exact degree MGF", "[oracle]") {
    const auto inst = make_exact_instance({3, 3}, {1.0, 3.0}, 0.7, 0.2);
    CHECK(exact_degree_mgf(0.0, 0, inst) == Approx(1.0).margin(1e-12));
    CHECK(exact_degree_mgf(0.0, 1, inst) == Approx(1.0).margin(1e-12));
    {
        // beta = 0: vertex degree is a sum of independent Bernoullis
        const auto free = make_exact_instance({3, 3}, {1.0, 3.0}, 0.0, 0.0);
        for (double s : {-1.0, 0.5}) {
            double expected = 1.0;
            for (int rep = 0; rep < 2; ++rep)  // the two remaining type-0 vertices
                expected *= std::exp(s) * free.p_edge[0][0] + 1.0 - free.p_edge[0][0];
            for (int rep = 0; rep < 3; ++rep)
                expected *= std::exp(s) * free.p_edge[0][1] + 1.0 - free.p_edge[0][1];
            CHECK(exact_degree_mgf(s, 0, free) == Approx(expected).margin(1e-12));
        }
    }
    {
        // trend toward the asymptotic formula
        const auto model = two_type();
        const ModelPoint p{0.8, 0.1, model};
        const double asym = degree_mgf(0.3, 3.0, p);
        double prev = kInf;
        for (long n : {50L, 100L, 200L}) {
            const auto in = make_exact_instance({n / 2, n / 2}, {1.0, 3.0}, 0.8, 0.1);
            const double err = std::abs(exact_degree_mgf(0.3, 1, in) - asym) / asym;
            CHECK(err < prev);
            prev = err;
        }
    }
    CHECK_THROWS_AS(exact_degree_mgf(0.1, 2, inst), validation_error);
    CHECK_THROWS_AS(exact_degree_mgf(0.1, 0, make_exact_instance({0, 2}, {1.0, 3.0}, 0.5, 0.0)),
                    validation_error);
}

TEST_CASE("multi-hypergeometric conditional law", "[oracle]") {
    const auto inst = make_exact_instance({2, 2}, {1.0, 3.0}, 0.5, 0.0);
    CHECK(multihypergeometric_conditional({1, 1}, inst, 2) == Approx(2.0 / 3.0).margin(1e-13));
    CHECK(multihypergeometric_conditional({2, 0}, inst, 2) == Approx(1.0 / 6.0).margin(1e-13));
    CHECK(multihypergeometric_conditional({2, 1}, inst, 2) == 0.0);  // wrong total
    CHECK(multihypergeometric_conditional({3, 0}, inst, 3) == 0.0);  // exceeds the type count
    for (long mp = 0; mp <= 4; ++mp) {
        double sum = 0.0;
        for (long q1 = 0; q1 <= 2; ++q1)
            for (long q2 = 0; q2 <= 2; ++q2)
                sum += multihypergeometric_conditional({q1, q2}, inst, mp);
        CHECK(sum == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("reduction matches brute force on random draws", "[oracle]") {
    SplitMix64 rng(99);
    for (int rep = 0; rep < 8; ++rep) {
        const double beta = 1.2 * rng.uniform01();
        const double B = 2.0 * rng.uniform01() - 1.0;
        const long n1 = static_cast<long>(rng.below(5));
        const long n2 = static_cast<long>(rng.below(5));
        const long n3 = 1 + static_cast<long>(rng.below(4));
        const auto inst = make_exact_instance({n1, n2, n3}, {1.0, 2.0, 4.0}, beta, B);
        const auto [model, seq] = counts_to_model({n1, n2, n3}, {1.0, 2.0, 4.0});
        const double a = exact_log_partition(inst);
        const double b = brute_force_log_partition(seq, beta, B);
        CHECK(std::abs(a - b) / std::max(1.0, std::abs(b)) <= 1e-10);
    }
}
