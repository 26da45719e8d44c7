#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "annealed_ldp/errors.hpp"

namespace annealed_ldp {

// Finite-support vertex-weight distribution: atoms a_1 < ... < a_K with
// probabilities p_1..p_K. Everything downstream only ever needs expectations
// over finitely many atoms, so this is the one weight representation.
struct WeightModel {
    std::vector<double> atoms;
    std::vector<double> probs;
    double mean_w = 0.0;
    double mean_w2 = 0.0;
    bool renormalized = false;  // input probabilities were off by more than 1e-9

    std::size_t num_types() const { return atoms.size(); }

    // E[f(W)] as an exact finite sum, in atom order.
    template <class F>
    double expect(F&& f) const {
        double s = 0.0;
        for (std::size_t k = 0; k < atoms.size(); ++k) s += probs[k] * f(atoms[k]);
        return s;
    }
};

// Concrete weight sequence w_1..w_n together with its exact total.
struct WeightSequence {
    std::vector<double> weights;
    double total = 0.0;  // ell_n

    std::size_t size() const { return weights.size(); }
};

inline WeightModel make_finite_type(std::vector<double> atoms, std::vector<double> probs) {
    if (atoms.empty() || atoms.size() != probs.size())
        throw validation_error("weight model: need equally sized, non-empty atom/prob lists");
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (!(atoms[k] > 0.0)) throw validation_error("weight model: atoms must be positive");
        if (k > 0 && !(atoms[k] > atoms[k - 1]))
            throw validation_error("weight model: atoms must be strictly increasing");
        if (probs[k] < 0.0) throw validation_error("weight model: probabilities must be nonnegative");
    }
    const double psum = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (!(psum > 0.0)) throw validation_error("weight model: probabilities sum to zero");
    WeightModel m;
    m.renormalized = std::abs(psum - 1.0) > 1e-9;
    for (double& p : probs) p /= psum;
    m.atoms = std::move(atoms);
    m.probs = std::move(probs);
    m.mean_w = m.expect([](double a) { return a; });
    m.mean_w2 = m.expect([](double a) { return a * a; });
    return m;
}

inline std::pair<double, double> moments(const WeightModel& m) {
    return {m.mean_w, m.mean_w2};
}

// Empirical model from per-type counts: p_k = n_k / n, sequence lists n_k
// copies of a_k. The total weight is accumulated as sum_k n_k * a_k so it
// cannot drift with the ordering of the n entries.
inline std::pair<WeightModel, WeightSequence> counts_to_model(const std::vector<long>& counts,
                                                              const std::vector<double>& atoms) {
    if (counts.empty() || counts.size() != atoms.size())
        throw validation_error("counts_to_model: need equally sized, non-empty count/atom lists");
    long n = 0;
    for (long c : counts) {
        if (c < 0) throw validation_error("counts_to_model: counts must be nonnegative");
        n += c;
    }
    if (n == 0) throw validation_error("counts_to_model: at least one count must be positive");

    std::vector<double> probs(counts.size());
    WeightSequence seq;
    seq.weights.reserve(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < counts.size(); ++k) {
        probs[k] = static_cast<double>(counts[k]) / static_cast<double>(n);
        seq.total += static_cast<double>(counts[k]) * atoms[k];
        for (long i = 0; i < counts[k]; ++i) seq.weights.push_back(atoms[k]);
    }
    WeightModel model = make_finite_type(atoms, std::move(probs));
    // keep n * E[W_n] == ell_n exact, independent of the prob renormalization
    model.mean_w = seq.total / static_cast<double>(n);
    return {std::move(model), std::move(seq)};
}

}  // namespace annealed_ldp
