#pragma once

#include <algorithm>
#include <cmath>

#include "entrate/errors.hpp"

namespace entrate {

/// Binary Markov chain observed through a binary symmetric channel.
///
/// The chain X has transition probabilities pi01 = P(X_k=1 | X_{k-1}=0) and
/// pi10 = P(X_k=0 | X_{k-1}=1); the channel flips each symbol independently
/// with probability eps. Everything downstream is driven by two scalar maps
/// of the belief x = P(X_n = 0 | observations so far):
///
///   q(x)  = a*x + pi10                    predicted P(X_{n+1}=0), a = 1-pi01-pi10
///   g0(x) = (1-2*eps)*q(x) + eps          predicted P(Z_{n+1}=0)
///   f0(x) = (1-eps)*q(x) / g0(x)          belief after observing 0
///   f1(x) = eps*q(x) / g1(x)              belief after observing 1
struct model_params {
    double pi01;
    double pi10;
    double eps;
    double p0;            ///< stationary P(X=0) = pi10 / (pi01 + pi10)
    double a;             ///< 1 - pi01 - pi10, in (0,1)
    bool strict_regime;   ///< 0 < eps < min(pi01, pi10)
};

/// Checks 0 < pi01 < 1/2, 0 < pi10 < 1/2, 0 <= eps <= 1/2 and derives the
/// stationary start. Throws parameter_error naming the offending field.
inline model_params validate(double pi01, double pi10, double eps) {
    if (!(std::isfinite(pi01) && pi01 > 0.0 && pi01 < 0.5))
        throw parameter_error("pi01", "must lie strictly inside (0, 0.5)");
    if (!(std::isfinite(pi10) && pi10 > 0.0 && pi10 < 0.5))
        throw parameter_error("pi10", "must lie strictly inside (0, 0.5)");
    if (!(std::isfinite(eps) && eps >= 0.0 && eps <= 0.5))
        throw parameter_error("eps", "must lie inside [0, 0.5]");
    model_params p{};
    p.pi01 = pi01;
    p.pi10 = pi10;
    p.eps = eps;
    p.p0 = pi10 / (pi01 + pi10);
    p.a = 1.0 - pi01 - pi10;
    p.strict_regime = eps > 0.0 && eps < std::min(pi01, pi10);
    return p;
}

/// Predicted P(X_{n+1} = 0) from the current belief.
inline double predict(const model_params& p, double x) { return p.a * x + p.pi10; }

/// P(Z_{n+1} = 0 | belief x). Affine increasing, image strictly inside (0,1).
inline double g0(const model_params& p, double x) {
    return (1.0 - 2.0 * p.eps) * predict(p, x) + p.eps;
}

inline double g1(const model_params& p, double x) { return 1.0 - g0(p, x); }

/// Belief update after observing symbol 0 (Bayes step). Monotone
/// nondecreasing on [0,1] with image inside [0,1].
inline double f0(const model_params& p, double x) {
    return (1.0 - p.eps) * predict(p, x) / g0(p, x);
}

/// Belief update after observing symbol 1.
inline double f1(const model_params& p, double x) {
    return p.eps * predict(p, x) / g1(p, x);
}

/// d/dx f0 = a*eps*(1-eps) / g0(x)^2, positive and decreasing in x.
inline double f0_prime(const model_params& p, double x) {
    const double d = g0(p, x);
    return p.a * p.eps * (1.0 - p.eps) / (d * d);
}

/// d/dx f1 = a*eps*(1-eps) / g1(x)^2, positive and increasing in x.
inline double f1_prime(const model_params& p, double x) {
    const double d = g1(p, x);
    return p.a * p.eps * (1.0 - p.eps) / (d * d);
}

/// Binary entropy in bits, with the 0*log(0) = 0 convention.
inline double hb(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// Contraction coefficient of the belief updates and Lipschitz constant of
/// hb(g0(.)). delta < 1 gives the geometric width envelope M * delta^n.
struct contraction_info {
    double delta;      ///< sup over [0,1] of max(|f0'|, |f1'|)
    double big_m;      ///< sup over [0,1] of |d/dx hb(g0(x))|
    bool contractive;  ///< delta < 1
};

/// Both suprema are attained at interval endpoints: f0' decreases with g0,
/// f1' increases as g1 shrinks, and |d/dx hb(g0)| = a(1-2eps)|log2((1-g0)/g0)|
/// grows as g0 leaves 1/2, so only g0(0) and g0(1) matter.
inline contraction_info contraction(const model_params& p) {
    const double lo = g0(p, 0.0);          // smallest g0 value
    const double hi_c = 1.0 - g0(p, 1.0);  // smallest g1 value
    const double m = std::min(lo, hi_c);
    const double delta = p.a * p.eps * (1.0 - p.eps) / (m * m);

    const double s = p.a * (1.0 - 2.0 * p.eps);
    double big_m = 0.0;
    if (s > 0.0) {
        const double at0 = std::abs(std::log2((1.0 - g0(p, 0.0)) / g0(p, 0.0)));
        const double at1 = std::abs(std::log2((1.0 - g0(p, 1.0)) / g0(p, 1.0)));
        big_m = s * std::max(at0, at1);
    }
    return contraction_info{delta, big_m, delta < 1.0};
}

}  // namespace entrate
