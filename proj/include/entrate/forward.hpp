#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entrate/errors.hpp"
#include "entrate/kahan.hpp"
#include "entrate/limits.hpp"
#include "entrate/model.hpp"
#include "entrate/parallel.hpp"

namespace entrate {

/// Observation strings are plain 0/1 byte sequences.
using bit_seq = std::vector<std::uint8_t>;

inline bit_seq parse_bits(std::string_view s) {
    bit_seq bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1')
            throw parameter_error("sequence", std::string("invalid symbol '") + c +
                                                  "', expected only 0 or 1");
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return bits;
}

/// One Bayes update: f0(belief) after observing 0, f1(belief) after 1.
inline double belief_step(const model_params& p, double belief, int symbol) {
    return symbol == 0 ? f0(p, belief) : f1(p, belief);
}

/// Applies the belief updates along z, left to right, starting from x.
/// The empty string is the identity.
inline double compose_belief(const model_params& p, std::span<const std::uint8_t> z, double x) {
    double b = x;
    for (std::uint8_t s : z) b = belief_step(p, b, s);
    return b;
}

struct belief_trace {
    std::vector<double> beliefs;  ///< entry k-1 = P(X_k = 0 | Z_1^k)
    double prob;                  ///< joint probability of the whole string
};

/// P(Z_1^n = z) by the forward recursion seeded at the stationary belief:
/// multiply by g_{z_k}(belief), then update the belief with f_{z_k}.
inline belief_trace sequence_prob(const model_params& p, std::span<const std::uint8_t> z) {
    belief_trace tr;
    tr.beliefs.reserve(z.size());
    tr.prob = 1.0;
    double belief = p.p0;
    for (std::uint8_t s : z) {
        const double pg0 = g0(p, belief);
        tr.prob *= s == 0 ? pg0 : 1.0 - pg0;
        belief = belief_step(p, belief, s);
        tr.beliefs.push_back(belief);
    }
    return tr;
}

/// Independent oracle: direct marginalization over all 2^n hidden paths,
/// P(z) = sum_x P(x_1) prod T[x_{k-1}][x_k] prod emit(z_k | x_k).
/// Exponential on purpose; rejects n > max_brute_force_len.
inline double brute_force_prob(const model_params& p, std::span<const std::uint8_t> z) {
    const int n = static_cast<int>(z.size());
    if (n > max_brute_force_len)
        throw length_error("brute_force_prob: sequence longer than " +
                           std::to_string(max_brute_force_len));
    if (n == 0) return 1.0;
    const double T[2][2] = {{1.0 - p.pi01, p.pi01}, {p.pi10, 1.0 - p.pi10}};
    const double start[2] = {p.p0, 1.0 - p.p0};
    kahan_sum<> total;
    const std::uint32_t count = std::uint32_t{1} << n;
    for (std::uint32_t path = 0; path < count; ++path) {
        int prev = path & 1u;
        double w = start[prev] * (z[0] == prev ? 1.0 - p.eps : p.eps);
        for (int k = 1; k < n; ++k) {
            const int cur = (path >> k) & 1u;
            w *= T[prev][cur] * (z[k] == cur ? 1.0 - p.eps : p.eps);
            prev = cur;
        }
        total += w;
    }
    return total.value();
}

namespace detail {

inline double neg_p_log2_p(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

/// Depth-first walk of the observation tree below one (prob, belief) node,
/// feeding leaf values into acc. leaf(prob, belief) must be pure.
template <typename Leaf>
void walk_leaves(const model_params& p, double prob, double belief, int depth, Leaf&& leaf,
                 kahan_sum<>& acc) {
    if (depth == 0) {
        acc += leaf(prob, belief);
        return;
    }
    const double pg0 = g0(p, belief);
    walk_leaves(p, prob * pg0, f0(p, belief), depth - 1, leaf, acc);
    walk_leaves(p, prob * (1.0 - pg0), f1(p, belief), depth - 1, leaf, acc);
}

/// Reduces leaf(prob, belief) over all 2^n observation strings. The tree is
/// split at a fixed prefix depth; per-prefix partial sums are merged in
/// prefix order, so the result does not depend on the worker count.
template <typename Leaf>
double reduce_leaves(const model_params& p, int n, unsigned threads, Leaf leaf) {
    if (n < 0 || n > max_depth)
        throw length_error("depth outside [0, " + std::to_string(max_depth) + "]");
    const int split = n < 12 ? 0 : 12;
    struct prefix_node {
        double prob;
        double belief;
    };
    std::vector<prefix_node> prefixes{{1.0, p.p0}};
    for (int d = 0; d < split; ++d) {
        std::vector<prefix_node> next;
        next.reserve(prefixes.size() * 2);
        for (const auto& s : prefixes) {
            const double pg0 = g0(p, s.belief);
            next.push_back({s.prob * pg0, f0(p, s.belief)});
            next.push_back({s.prob * (1.0 - pg0), f1(p, s.belief)});
        }
        prefixes = std::move(next);
    }
    std::vector<kahan_sum<>> partial(prefixes.size());
    detail::for_each_chunk(prefixes.size(), threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            walk_leaves(p, prefixes[i].prob, prefixes[i].belief, n - split, leaf, partial[i]);
    });
    kahan_sum<> total;
    for (const auto& part : partial) total.merge(part);
    return total.value();
}

}  // namespace detail

/// Block entropy H(Z_1^n) in bits: sum of -P log2 P over all 2^n strings,
/// with compensated accumulation. H(Z_1^0) = 0.
inline double block_entropy(const model_params& p, int n, unsigned threads = 1) {
    return detail::reduce_leaves(p, n, threads,
                                 [](double prob, double) { return detail::neg_p_log2_p(prob); });
}

/// Total probability mass at depth n; should be 1 up to accumulation error.
inline double probability_mass(const model_params& p, int n, unsigned threads = 1) {
    return detail::reduce_leaves(p, n, threads, [](double prob, double) { return prob; });
}

}  // namespace entrate
