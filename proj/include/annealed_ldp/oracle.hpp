#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "annealed_ldp/errors.hpp"
#include "annealed_ldp/math.hpp"
#include "annealed_ldp/weights.hpp"

namespace annealed_ldp {

// ---------------------------------------------------------------------------
// Exact finite-n ground truth. A configuration is reduced to its per-type
// up-spin counts (j_1..j_K): all pair factors depend only on the types and
// the spin product, so the 2^n sum collapses to prod_k (n_k + 1) terms with
// binomial multiplicities. Everything is accumulated in log space; exponents
// grow like beta n^2 p ~ n, and multiplicities like n log n.
// ---------------------------------------------------------------------------

struct ExactInstance {
    std::vector<long> counts;   // n_k per type
    std::vector<double> atoms;  // a_1 < ... < a_K
    double beta = 0.0;
    double B = 0.0;

    long n = 0;
    double ell = 0.0;                         // total weight
    std::vector<std::vector<double>> p_edge;  // p_kl = a_k a_l / (ell + a_k a_l)
};

inline ExactInstance make_exact_instance(std::vector<long> counts, std::vector<double> atoms,
                                         double beta, double B) {
    if (counts.empty() || counts.size() != atoms.size())
        throw validation_error("exact instance: need equally sized count/atom lists");
    if (!(beta >= 0.0)) throw domain_error("exact instance: beta must be nonnegative");
    ExactInstance inst;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] < 0) throw validation_error("exact instance: negative count");
        if (!(atoms[k] > 0.0) || (k > 0 && !(atoms[k] > atoms[k - 1])))
            throw validation_error("exact instance: atoms must be positive and increasing");
        inst.n += counts[k];
        inst.ell += static_cast<double>(counts[k]) * atoms[k];
    }
    if (inst.n < 1) throw validation_error("exact instance: need at least one vertex");
    inst.counts = std::move(counts);
    inst.atoms = std::move(atoms);
    inst.beta = beta;
    inst.B = B;
    const std::size_t K = inst.atoms.size();
    inst.p_edge.assign(K, std::vector<double>(K));
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l) {
            const double ww = inst.atoms[k] * inst.atoms[l];
            inst.p_edge[k][l] = ww / (inst.ell + ww);
        }
    return inst;
}

// Edge-tilted pair parameters: the unique (beta_ij(t), C_ij(t)) with
//   e^{t + beta s} p + 1 - p = C e^{beta_t s}   for s = +-1.
struct TiltedEdgeParams {
    double beta_t = 0.0;
    double c_t = 1.0;
};

inline TiltedEdgeParams tilted_edge_params(double t, double p, double beta) {
    if (!(p > 0.0) || !(p < 1.0))
        throw domain_error("tilted_edge_params: edge probability must lie in (0,1)");
    TiltedEdgeParams out;
    const double up = std::exp(t + beta) * p + (1.0 - p);
    const double dn = std::exp(t - beta) * p + (1.0 - p);
    out.beta_t = 0.5 * std::log(up / dn);
    out.c_t = (std::exp(t) * p * std::cosh(beta) + (1.0 - p)) / std::cosh(out.beta_t);
    return out;
}

// Size caps for the exact enumerations: the type reduction is polynomial but
// its term count is prod_k (n_k + 1), and the brute force is a literal 2^n.
inline constexpr long kExactMaxVertices = 5000;
inline constexpr std::size_t kExactMaxTypes = 4;
inline constexpr std::size_t kBruteForceMaxVertices = 16;

namespace detail {

inline void check_exact_caps(const ExactInstance& inst) {
    if (inst.n > kExactMaxVertices || inst.atoms.size() > kExactMaxTypes)
        throw resource_error("exact oracle: instance exceeds the n <= 5000, K <= 4 cap");
}

// log factors per type pair for aligned (+) and anti-aligned (-) spins
struct PairFactors {
    std::vector<std::vector<double>> lp, lm;
};

inline PairFactors pair_factors(const ExactInstance& inst, double tilt) {
    const std::size_t K = inst.atoms.size();
    PairFactors f;
    f.lp.assign(K, std::vector<double>(K));
    f.lm.assign(K, std::vector<double>(K));
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = 0; l < K; ++l) {
            const auto tp = tilted_edge_params(tilt, inst.p_edge[k][l], inst.beta);
            f.lp[k][l] = std::log(tp.c_t) + tp.beta_t;
            f.lm[k][l] = std::log(tp.c_t) - tp.beta_t;
        }
    return f;
}

inline std::vector<std::vector<double>> log_binomial_rows(const std::vector<long>& counts) {
    std::vector<std::vector<double>> rows(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        rows[k].resize(static_cast<std::size_t>(counts[k]) + 1);
        for (long j = 0; j <= counts[k]; ++j)
            rows[k][static_cast<std::size_t>(j)] =
                log_binomial(static_cast<double>(counts[k]), static_cast<double>(j));
    }
    return rows;
}

// Exponent of one type-count configuration j against arbitrary pair factors.
inline double config_exponent(const std::vector<long>& counts, const std::vector<long>& j,
                              const std::vector<std::vector<double>>& lC,
                              const PairFactors& f, double B) {
    const std::size_t K = counts.size();
    double e = 0.0;
    long spin_sum = 0;
    for (std::size_t k = 0; k < K; ++k) {
        const double jk = static_cast<double>(j[k]);
        const double dk = static_cast<double>(counts[k] - j[k]);
        e += lC[k][static_cast<std::size_t>(j[k])];
        spin_sum += 2 * j[k] - counts[k];
        e += (0.5 * jk * (jk - 1.0) + 0.5 * dk * (dk - 1.0)) * f.lp[k][k] + jk * dk * f.lm[k][k];
        for (std::size_t l = k + 1; l < K; ++l) {
            const double jl = static_cast<double>(j[l]);
            const double dl = static_cast<double>(counts[l] - j[l]);
            e += (jk * jl + dk * dl) * f.lp[k][l] + (jk * dl + jl * dk) * f.lm[k][l];
        }
    }
    return e + B * static_cast<double>(spin_sum);
}

// Iterates all (j_1..j_K) with the first index fixed; Visit(j, exponent).
template <class Visit>
void for_each_inner(const std::vector<long>& counts, long j0,
                    const std::vector<std::vector<double>>& lC, const PairFactors& f, double B,
                    Visit&& visit) {
    const std::size_t K = counts.size();
    std::vector<long> j(K, 0);
    j[0] = j0;
    while (true) {
        visit(j, config_exponent(counts, j, lC, f, B));
        std::size_t k = K - 1;
        for (;; --k) {
            if (k == 0) return;  // j[0] stays fixed
            if (++j[k] <= counts[k]) break;
            j[k] = 0;
        }
    }
}

// log of  sum_j prod_k C(n_k, j_k) e^{B S(j)} prod_pairs factor^count  with the
// outer axis parallelized; the merge order is fixed by the j_1 index, so the
// result does not depend on the thread count.
inline double log_partition_sum(const ExactInstance& inst, const PairFactors& f) {
    const auto lC = log_binomial_rows(inst.counts);
    const std::size_t outer = static_cast<std::size_t>(inst.counts[0]) + 1;
    std::vector<LogSumExp> partial(outer);
    parallel_for(outer, [&](std::size_t j0) {
        LogSumExp acc;
        for_each_inner(inst.counts, static_cast<long>(j0), lC, f, inst.B,
                       [&](const std::vector<long>&, double e) { acc.add(e); });
        partial[j0] = acc;
    });
    LogSumExp total;
    for (const auto& x : partial) total.merge(x);
    return total.value();
}

}  // namespace detail

// log Z_n^an: annealed partition function, exact up to the configured cap.
inline double exact_log_partition(const ExactInstance& inst) {
    detail::check_exact_caps(inst);
    return detail::log_partition_sum(inst, detail::pair_factors(inst, 0.0));
}

// Law of the total spin S_n under the annealed measure; support is
// {-n, -n+2, ..., n} indexed by the number of up spins.
struct SpinDistribution {
    long n = 0;
    double log_partition = 0.0;
    std::vector<double> pmf;  // pmf[u] = P(S_n = 2u - n)

    double prob(long s) const {
        if ((s + n) % 2 != 0 || s < -n || s > n) return 0.0;
        return pmf[static_cast<std::size_t>((s + n) / 2)];
    }
};

inline SpinDistribution exact_spin_distribution(const ExactInstance& inst) {
    detail::check_exact_caps(inst);
    const auto f = detail::pair_factors(inst, 0.0);
    const auto lC = detail::log_binomial_rows(inst.counts);
    std::vector<LogSumExp> bins(static_cast<std::size_t>(inst.n) + 1);
    for (long j0 = 0; j0 <= inst.counts[0]; ++j0) {
        detail::for_each_inner(inst.counts, j0, lC, f, inst.B,
                               [&](const std::vector<long>& j, double e) {
                                   long up = 0;
                                   for (long v : j) up += v;
                                   bins[static_cast<std::size_t>(up)].add(e);
                               });
    }
    SpinDistribution dist;
    dist.n = inst.n;
    LogSumExp total;
    for (const auto& b : bins) total.merge(b);
    dist.log_partition = total.value();
    dist.pmf.resize(bins.size());
    for (std::size_t u = 0; u < bins.size(); ++u)
        dist.pmf[u] = bins[u].empty() ? 0.0 : std::exp(bins[u].value() - dist.log_partition);
    return dist;
}

// log E[e^{t |E_n|}]: every pair gets the uniform tilt t via (beta_t, C_t).
inline double exact_log_edge_mgf(double t, const ExactInstance& inst) {
    detail::check_exact_caps(inst);
    return detail::log_partition_sum(inst, detail::pair_factors(inst, t)) -
           detail::log_partition_sum(inst, detail::pair_factors(inst, 0.0));
}

inline double exact_edge_mgf(double t, const ExactInstance& inst) {
    return std::exp(exact_log_edge_mgf(t, inst));
}

namespace detail {

// Numerator of the degree MGF with one tagged vertex of the given type: its
// spin is summed explicitly and only its incident pairs carry the tilt s.
inline double log_degree_numerator(double s, std::size_t type_index, const ExactInstance& inst) {
    const std::size_t K = inst.atoms.size();
    if (type_index >= K) throw validation_error("exact_degree_mgf: bad type index");
    if (inst.counts[type_index] < 1)
        throw validation_error("exact_degree_mgf: no vertex of the requested type");
    ExactInstance rest = inst;  // keeps ell and p_edge of the full instance
    rest.counts[type_index] -= 1;
    rest.n -= 1;

    const auto f = pair_factors(inst, 0.0);
    const auto lC = log_binomial_rows(rest.counts);
    // tilted factors between the tagged vertex and a type-l vertex, by spin product
    std::vector<double> lsp(K), lsm(K);
    for (std::size_t l = 0; l < K; ++l) {
        const double p = inst.p_edge[type_index][l];
        lsp[l] = std::log(std::exp(s + inst.beta) * p + (1.0 - p));
        lsm[l] = std::log(std::exp(s - inst.beta) * p + (1.0 - p));
    }
    const std::size_t outer = static_cast<std::size_t>(rest.counts[0]) + 1;
    std::vector<LogSumExp> partial(outer);
    parallel_for(outer, [&](std::size_t j0) {
        LogSumExp acc;
        for_each_inner(rest.counts, static_cast<long>(j0), lC, f, inst.B,
                       [&](const std::vector<long>& j, double e) {
                           double up = 0.0, down = 0.0;  // tagged-vertex cross terms
                           for (std::size_t l = 0; l < K; ++l) {
                               up += static_cast<double>(j[l]) * lsp[l] +
                                     static_cast<double>(rest.counts[l] - j[l]) * lsm[l];
                               down += static_cast<double>(j[l]) * lsm[l] +
                                       static_cast<double>(rest.counts[l] - j[l]) * lsp[l];
                           }
                           acc.add(e + inst.B + up);
                           acc.add(e - inst.B + down);
                       });
        partial[j0] = acc;
    });
    LogSumExp total;
    for (const auto& x : partial) total.merge(x);
    return total.value();
}

}  // namespace detail

// E[e^{s D_1}] with vertex 1 of the given type (0-based index into atoms).
inline double exact_log_degree_mgf(double s, std::size_t type_index, const ExactInstance& inst) {
    detail::check_exact_caps(inst);
    return detail::log_degree_numerator(s, type_index, inst) -
           detail::log_degree_numerator(0.0, type_index, inst);
}

inline double exact_degree_mgf(double s, std::size_t type_index, const ExactInstance& inst) {
    return std::exp(exact_log_degree_mgf(s, type_index, inst));
}

// Oracle-of-the-oracle: direct 2^n enumeration from a raw weight sequence.
inline double brute_force_log_partition(const WeightSequence& seq, double beta, double B) {
    const std::size_t n = seq.size();
    if (n == 0) throw validation_error("brute force: empty weight sequence");
    if (n > kBruteForceMaxVertices) throw resource_error("brute force: capped at n <= 16");
    std::vector<double> lp(n * n), lm(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double ww = seq.weights[i] * seq.weights[j];
            const double p = ww / (seq.total + ww);
            lp[i * n + j] = std::log(std::exp(beta) * p + 1.0 - p);
            lm[i * n + j] = std::log(std::exp(-beta) * p + 1.0 - p);
        }
    LogSumExp acc;
    const std::uint32_t m_end = static_cast<std::uint32_t>(1u << n);
    for (std::uint32_t mask = 0; mask < m_end; ++mask) {
        double e = 0.0;
        long s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool si = mask & (1u << i);
            s += si ? 1 : -1;
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool sj = mask & (1u << j);
                e += (si == sj) ? lp[i * n + j] : lm[i * n + j];
            }
        }
        acc.add(e + B * static_cast<double>(s));
    }
    return acc.value();
}

// Conditional law of the per-type up-spin counts given the total number of up
// spins: multi-hypergeometric,  prod_k C(n_k, q_k) / C(n, m_plus).
inline double multihypergeometric_conditional(const std::vector<long>& q_counts,
                                              const ExactInstance& inst, long m_plus) {
    if (q_counts.size() != inst.counts.size())
        throw validation_error("multihypergeometric: q/count length mismatch");
    long total = 0;
    for (std::size_t k = 0; k < q_counts.size(); ++k) {
        if (q_counts[k] < 0 || q_counts[k] > inst.counts[k]) return 0.0;
        total += q_counts[k];
    }
    if (total != m_plus || m_plus < 0 || m_plus > inst.n) return 0.0;
    double log_num = 0.0;
    for (std::size_t k = 0; k < q_counts.size(); ++k)
        log_num += log_binomial(static_cast<double>(inst.counts[k]),
                                static_cast<double>(q_counts[k]));
    return std::exp(log_num - log_binomial(static_cast<double>(inst.n),
                                           static_cast<double>(m_plus)));
}

}  // namespace annealed_ldp
