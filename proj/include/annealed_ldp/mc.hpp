#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "annealed_ldp/errors.hpp"
#include "annealed_ldp/math.hpp"
#include "annealed_ldp/weights.hpp"

namespace annealed_ldp {

// Counter-based splitmix64: output i is a fixed 64-bit mix of (seed + i*GAMMA).
// Pure integer arithmetic, so streams are reproducible across platforms and
// languages; splitting = deriving a child seed from the stream.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // uniform in [0, 1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // uniform integer in [0, bound) by 128-bit multiply-shift
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }
    SplitMix64 split() { return SplitMix64(next()); }

    static const char* name() { return "splitmix64"; }

  private:
    std::uint64_t state_;
};

// Glauber (heat-bath) dynamics for the inhomogeneous Curie-Weiss Hamiltonian
//   H(sigma) = theta / (2 ell) (sum_i w_i sigma_i)^2 + B sum_i sigma_i.
// Random-scan single-site updates; the running weighted sum makes one update
// O(1). This is a cross-check sampler, not a production one: error bars come
// from batch means over thinned post-burn-in sweeps.

struct McConfig {
    std::vector<long> counts;
    std::vector<double> atoms;
    double theta = 0.0;  // ICW coupling (sinh(beta) under the annealed mapping)
    double B = 0.0;
    long sweeps = 0;     // total sweeps, one sweep = n single-site updates
    long burn_in = 0;    // sweeps discarded before sampling
    long thin = 1;       // keep every thin-th sweep
    std::uint64_t seed = 0;
};

struct McResult {
    double mean_magnetization = 0.0;
    double std_error = 0.0;  // batch-means standard error of the magnetization
    double mean_weighted_magnetization = 0.0;
    long samples_used = 0;
    std::uint64_t seed_echo = 0;
    double weighted_sum_drift = 0.0;  // |incremental - recomputed| at run end
    std::string algorithm = "glauber-heat-bath";
    std::string prng = SplitMix64::name();
};

inline McResult glauber_run(const McConfig& cfg) {
    if (cfg.counts.empty() || cfg.counts.size() != cfg.atoms.size())
        throw validation_error("mc: need equally sized count/atom lists");
    long n = 0;
    for (long c : cfg.counts) {
        if (c < 0) throw validation_error("mc: negative count");
        n += c;
    }
    if (n == 0) throw validation_error("mc: zero vertices");
    if (!(cfg.sweeps > cfg.burn_in) || cfg.burn_in < 0)
        throw validation_error("mc: need sweeps > burn_in >= 0");
    if (cfg.thin < 1) throw validation_error("mc: thin must be >= 1");
    if (!(cfg.theta >= 0.0)) throw domain_error("mc: coupling must be nonnegative");

    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(n));
    double ell = 0.0;
    for (std::size_t k = 0; k < cfg.counts.size(); ++k) {
        ell += static_cast<double>(cfg.counts[k]) * cfg.atoms[k];
        for (long i = 0; i < cfg.counts[k]; ++i) w.push_back(cfg.atoms[k]);
    }

    SplitMix64 rng(cfg.seed);
    std::vector<signed char> sigma(static_cast<std::size_t>(n));
    double wsum = 0.0;  // sum_i w_i sigma_i, maintained incrementally
    long ssum = 0;      // sum_i sigma_i
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        sigma[i] = rng.uniform01() < 0.5 ? -1 : 1;
        wsum += w[i] * sigma[i];
        ssum += sigma[i];
    }

    std::vector<double> mags, wmags;
    for (long sweep = 0; sweep < cfg.sweeps; ++sweep) {
        for (long u = 0; u < n; ++u) {
            const std::size_t i = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n)));
            const double rest = wsum - w[i] * sigma[i];
            // H(+1) - H(-1) = 2 theta w_i rest / ell + 2 B
            const double delta = 2.0 * (cfg.theta * w[i] * rest / ell + cfg.B);
            const signed char next = rng.uniform01() < logistic(delta) ? 1 : -1;
            if (next != sigma[i]) {
                wsum += w[i] * (next - sigma[i]);
                ssum += next - sigma[i];
                sigma[i] = next;
            }
        }
        if (sweep >= cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0) {
            mags.push_back(static_cast<double>(ssum) / static_cast<double>(n));
            wmags.push_back(wsum / static_cast<double>(n));
        }
    }

    McResult res;
    res.seed_echo = cfg.seed;
    const std::size_t N = mags.size();
    const std::size_t nb = std::min<std::size_t>(
        64, std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(double(N)))));
    const std::size_t bs = std::max<std::size_t>(1, N / nb);
    const std::size_t used = bs * std::min(nb, N / bs);
    std::vector<double> bmeans;
    for (std::size_t b = 0; b + 1 <= used / bs; ++b) {
        double s = 0.0;
        for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) s += mags[i];
        bmeans.push_back(s / static_cast<double>(bs));
    }
    double mean = 0.0, wmean = 0.0;
    for (std::size_t i = 0; i < used; ++i) {
        mean += mags[i];
        wmean += wmags[i];
    }
    mean /= static_cast<double>(used);
    wmean /= static_cast<double>(used);
    double var = 0.0;
    for (double b : bmeans) var += (b - mean) * (b - mean);
    if (bmeans.size() > 1) var /= static_cast<double>(bmeans.size() - 1);
    res.mean_magnetization = mean;
    res.mean_weighted_magnetization = wmean;
    res.std_error = std::sqrt(var / static_cast<double>(bmeans.size()));
    res.samples_used = static_cast<long>(used);

    double recomputed = 0.0;
    for (std::size_t i = 0; i < sigma.size(); ++i) recomputed += w[i] * sigma[i];
    res.weighted_sum_drift = std::abs(recomputed - wsum);
    return res;
}

}  // namespace annealed_ldp
