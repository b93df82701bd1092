#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrate/errors.hpp"
#include "entrate/kahan.hpp"
#include "entrate/limits.hpp"
#include "entrate/model.hpp"
#include "entrate/parallel.hpp"

namespace entrate {

/// One observation-prefix node. belief tracks the stationary start through
/// the composed updates; [lo, hi] is the image of the whole belief interval
/// [0,1] under the same composition, so lo <= belief <= hi always.
struct path_state {
    double prob;    ///< P(Z_1^k = this prefix)
    double belief;  ///< composed updates applied to p0
    double lo;      ///< composed updates applied to 0
    double hi;      ///< composed updates applied to 1
};

/// Per-depth record of the convergence table.
struct bounds_row {
    int n;
    double lower;                  ///< L: probability-weighted min of hb(g0(.)) over each interval
    double approx;                 ///< H: conditional entropy H(Z_{n+1} | Z_1^n)
    double upper;                  ///< U: probability-weighted max
    double width;                  ///< U - L
    std::optional<double> geo;     ///< big_m * delta^n when contractive
};

struct convergence_report {
    std::vector<bounds_row> rows;
    double estimate;          ///< (L + U) / 2 of the final row
    double guaranteed_error;  ///< (U - L) / 2 of the final row
    bool converged;           ///< width <= 2*tol reached before n_max
};

/// hb(g0(y)): entropy of the next-symbol distribution at inner point y.
inline double phi(const model_params& p, double y) { return hb(g0(p, y)); }

struct phi_range {
    double min;
    double max;
};

/// Exact extrema of phi over [lo, hi]. g0 is affine increasing and hb is
/// unimodal with peak 1 at 1/2, so phi rises until g0 crosses 1/2 and falls
/// after; the minimum sits at an endpoint and the maximum is 1 iff the
/// crossing point lies inside the interval. At eps = 1/2, g0 is constant 1/2
/// and phi == 1 everywhere.
inline phi_range extremize_phi(const model_params& p, double lo, double hi) {
    const double slope = p.a * (1.0 - 2.0 * p.eps);
    if (slope <= 0.0) return {1.0, 1.0};
    const double vlo = phi(p, lo);
    const double vhi = phi(p, hi);
    phi_range r{std::min(vlo, vhi), std::max(vlo, vhi)};
    const double crossing = (0.5 - g0(p, 0.0)) / slope;
    if (lo <= crossing && crossing <= hi) r.max = 1.0;
    return r;
}

/// Expands every depth-k prefix into its two children. Child 0 scales the
/// probability by g0(belief) and maps belief/lo/hi through f0; child 1 uses
/// g1 and f1. Children land at indices 2i and 2i+1, so the output is
/// identical for any worker count.
inline std::vector<path_state> level_expand(const model_params& p,
                                            std::span<const path_state> states,
                                            unsigned threads = 0,
                                            std::size_t node_budget = std::size_t{1} << max_depth) {
    if (states.size() * 2 > node_budget)
        throw capacity_error("level_expand: " + std::to_string(states.size() * 2) +
                             " nodes would exceed the node budget of " +
                             std::to_string(node_budget));
    std::vector<path_state> next(states.size() * 2);
    detail::for_each_chunk(states.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const path_state& s = states[i];
            const double pg0 = g0(p, s.belief);
            next[2 * i] = {s.prob * pg0, f0(p, s.belief), f0(p, s.lo), f0(p, s.hi)};
            next[2 * i + 1] = {s.prob * (1.0 - pg0), f1(p, s.belief), f1(p, s.lo), f1(p, s.hi)};
        }
    });
    return next;
}

/// Root of the observation tree: empty prefix, stationary belief, full
/// belief interval.
inline path_state root_state(const model_params& p) { return {1.0, p.p0, 0.0, 1.0}; }

/// Reduces one full level into its table row:
///   H = sum prob * phi(belief)
///   L = sum prob * min phi over [lo, hi],  U likewise with max.
/// Partial sums are per fixed-size chunk and merged in index order, so the
/// row is bit-identical across worker counts.
inline bounds_row compute_row(const model_params& p, std::span<const path_state> states, int n,
                              const contraction_info& ci, unsigned threads = 0) {
    struct partial {
        kahan_sum<> h, l, u;
    };
    std::vector<partial> parts(detail::num_chunks(states.size()));
    detail::for_each_chunk(states.size(), threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        partial& acc = parts[c];
        for (std::size_t i = b; i < e; ++i) {
            const path_state& s = states[i];
            acc.h += s.prob * phi(p, s.belief);
            const phi_range r = extremize_phi(p, s.lo, s.hi);
            acc.l += s.prob * r.min;
            acc.u += s.prob * r.max;
        }
    });
    kahan_sum<> h, l, u;
    for (const partial& part : parts) {
        h.merge(part.h);
        l.merge(part.l);
        u.merge(part.u);
    }
    bounds_row row{};
    row.n = n;
    row.lower = l.value();
    row.approx = h.value();
    row.upper = u.value();
    row.width = row.upper - row.lower;
    if (ci.contractive) row.geo = ci.big_m * std::pow(ci.delta, n);
    return row;
}

/// Rows for every depth 0..n_levels, with no early stopping.
inline std::vector<bounds_row> bounds_table(const model_params& p, int n_levels,
                                            unsigned threads = 0) {
    if (n_levels < 0 || n_levels > max_depth)
        throw capacity_error("n_levels " + std::to_string(n_levels) + " outside [0, " +
                             std::to_string(max_depth) + "]");
    const contraction_info ci = contraction(p);
    std::vector<bounds_row> rows;
    rows.reserve(static_cast<std::size_t>(n_levels) + 1);
    std::vector<path_state> states{root_state(p)};
    for (int n = 0;; ++n) {
        rows.push_back(compute_row(p, states, n, ci, threads));
        if (n == n_levels) break;
        states = level_expand(p, states, threads);
    }
    return rows;
}

struct run_options {
    double tol = 1e-6;            ///< stop once width <= 2*tol
    int n_max = 25;               ///< deepest level to compute (hard cap max_depth)
    unsigned threads = 0;         ///< 0 = hardware concurrency
    std::size_t node_budget = 0;  ///< 0 = sized to n_max
};

/// Expands level by level from the root, emitting one row per depth, until
/// the width meets 2*tol or n_max is reached. Rows are retained for every
/// computed depth; the estimate is the midpoint of the final interval.
inline convergence_report run_bounds(const model_params& p, const run_options& opt = {}) {
    if (!(opt.tol > 0.0)) throw parameter_error("tol", "must be positive");
    if (opt.n_max < 0 || opt.n_max > max_depth)
        throw capacity_error("n_max " + std::to_string(opt.n_max) + " outside [0, " +
                             std::to_string(max_depth) + "]");
    const std::size_t budget =
        opt.node_budget != 0 ? opt.node_budget : std::size_t{1} << opt.n_max;
    const contraction_info ci = contraction(p);

    convergence_report report{};
    std::vector<path_state> states{root_state(p)};
    for (int n = 0;; ++n) {
        const bounds_row row = compute_row(p, states, n, ci, opt.threads);
        report.rows.push_back(row);
        if (row.width <= 2.0 * opt.tol) {
            report.converged = true;
            break;
        }
        if (n == opt.n_max) break;
        states = level_expand(p, states, opt.threads, budget);
    }
    const bounds_row& last = report.rows.back();
    report.estimate = 0.5 * (last.lower + last.upper);
    report.guaranteed_error = 0.5 * last.width;
    return report;
}

}  // namespace entrate
