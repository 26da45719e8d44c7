#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "annealed_ldp/errors.hpp"

namespace annealed_ldp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log cosh(u) without overflow for |u| up to ~1e308:
//   log cosh u = |u| + log(1 + e^{-2|u|}) - log 2
inline double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - M_LN2;
}

// log(1 + e^v), stable for large |v|
inline double log1pexp(double v) {
    if (v > 0) return v + std::log1p(std::exp(-v));
    return std::log1p(std::exp(v));
}

// logistic sigma(v) = e^v / (1 + e^v)
inline double logistic(double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
}

// sech^2(u) = 1/cosh^2(u), stable for large |u|
inline double sech2(double u) {
    const double e = std::exp(-2.0 * std::abs(u));
    const double r = 2.0 * std::sqrt(e) / (1.0 + e);
    return r * r;
}

inline double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Streaming log-sum-exp with running max rescale. Accumulation order is the
// insertion order, so results are reproducible for a fixed iteration order.
class LogSumExp {
  public:
    void add(double log_term) {
        if (log_term == -kInf) return;
        if (empty_) {
            max_ = log_term;
            sum_ = 1.0;
            empty_ = false;
            return;
        }
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }
    void merge(const LogSumExp& other) {
        if (other.empty_) return;
        if (empty_) {
            *this = other;
            return;
        }
        if (other.max_ <= max_) {
            sum_ += other.sum_ * std::exp(other.max_ - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
            max_ = other.max_;
        }
    }
    double value() const { return empty_ ? -kInf : max_ + std::log(sum_); }
    bool empty() const { return empty_; }

  private:
    double max_ = 0.0;
    double sum_ = 0.0;
    bool empty_ = true;
};

// ---------------------------------------------------------------------------
// Scalar solvers. All objectives here are smooth; bisection does the heavy
// lifting because it cannot diverge, Newton-style polish is left to callers
// that know the derivative.
// ---------------------------------------------------------------------------

// Root of increasing f on [lo, hi] with f(lo) <= 0 <= f(hi).
template <class F>
double bisect_increasing(F&& f, double lo, double hi, int iters = 100) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Expands [-1,1] by doubling until increasing f changes sign; caps at |t|<=cap.
// Returns false when no sign change exists within the cap.
template <class F>
bool expand_bracket_increasing(F&& f, double& lo, double& hi, double cap = 700.0) {
    lo = -1.0;
    hi = 1.0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > cap) return f(cap) >= 0.0 ? (hi = cap, true) : false;
    }
    while (f(lo) > 0.0) {
        lo *= 2.0;
        if (lo < -cap) return f(-cap) <= 0.0 ? (lo = -cap, true) : false;
    }
    return true;
}

// Golden-section minimum of unimodal f on [a, b] to x-tolerance xtol.
template <class F>
double golden_section(F&& f, double a, double b, double xtol = 1e-10) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

struct ScanMinimum {
    double x = 0.0;
    double value = kInf;
};

// Coarse scan over [lo, hi] followed by golden-section refinement around every
// local minimum of the scan (plus extra seed points). Handles the double-well
// objectives that show up below the critical temperature.
template <class F>
ScanMinimum scan_minimize(F&& f, double lo, double hi, int coarse = 65, double xtol = 1e-10,
                          const std::vector<double>& seeds = {}) {
    ScanMinimum best;
    if (!(hi > lo)) {
        best.x = lo;
        best.value = f(lo);
        return best;
    }
    std::vector<double> xs(coarse), vs(coarse);
    const double step = (hi - lo) / (coarse - 1);
    for (int i = 0; i < coarse; ++i) {
        xs[i] = lo + i * step;
        vs[i] = f(xs[i]);
    }
    auto refine = [&](double a, double b) {
        a = std::max(a, lo);
        b = std::min(b, hi);
        if (!(b > a)) return;
        const double x = golden_section(f, a, b, xtol);
        const double v = f(x);
        if (v < best.value) {
            best.value = v;
            best.x = x;
        }
    };
    for (int i = 0; i < coarse; ++i) {
        const bool left_ok = (i == 0) || vs[i] <= vs[i - 1];
        const bool right_ok = (i == coarse - 1) || vs[i] <= vs[i + 1];
        if (left_ok && right_ok && std::isfinite(vs[i]))
            refine(xs[std::max(0, i - 1)], xs[std::min(coarse - 1, i + 1)]);
    }
    for (double s : seeds) {
        if (s >= lo && s <= hi) refine(s - step, s + step);
    }
    if (!std::isfinite(best.value)) {  // everything infinite: report midpoint
        best.x = 0.5 * (lo + hi);
        best.value = f(best.x);
    }
    return best;
}

// Central difference with one Richardson step; h should be well above
// sqrt(machine eps) times the scale of x.
template <class F>
double derivative_richardson(F&& f, double x, double h) {
    auto central = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
    const double d1 = central(h);
    const double d2 = central(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

// ---------------------------------------------------------------------------
// Minimal fork-join helper for embarrassingly parallel index loops. Results
// are written by index, so the output is independent of the thread count.
// ---------------------------------------------------------------------------

inline unsigned worker_count() {
    if (const char* env = std::getenv("ANNEALED_LDP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = worker_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n ? n : 1));
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace annealed_ldp
