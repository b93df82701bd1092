#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "entrate/errors.hpp"
#include "entrate/kahan.hpp"
#include "entrate/model.hpp"

namespace entrate {

/// splitmix64: counter-based generator (Steele, Lea, Flood 2014). State
/// advances by a fixed odd constant and each output is a finalizer of the
/// counter, so streams are reproducible across platforms and compilers.
class splitmix64 {
  public:
    explicit splitmix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Name recorded in output metadata next to the seed.
inline constexpr const char* generator_name = "splitmix64";

struct path_sample {
    std::vector<std::uint8_t> hidden;
    std::vector<std::uint8_t> observed;
    std::uint64_t seed;
};

/// Draws x_1 from the stationary distribution, steps the chain, then flips
/// each symbol independently with probability eps. The generator stream is
/// consumed as n chain draws followed by n noise draws.
inline path_sample sample_path(const model_params& p, std::size_t n, std::uint64_t seed) {
    path_sample out;
    out.seed = seed;
    out.hidden.resize(n);
    out.observed.resize(n);
    if (n == 0) return out;
    splitmix64 rng(seed);
    int x = rng.next_double() < p.p0 ? 0 : 1;
    out.hidden[0] = static_cast<std::uint8_t>(x);
    for (std::size_t k = 1; k < n; ++k) {
        const double u = rng.next_double();
        x = x == 0 ? (u < p.pi01 ? 1 : 0) : (u < p.pi10 ? 0 : 1);
        out.hidden[k] = static_cast<std::uint8_t>(x);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint8_t flip = rng.next_double() < p.eps ? 1 : 0;
        out.observed[k] = out.hidden[k] ^ flip;
    }
    return out;
}

struct mc_estimate {
    double value;           ///< estimated conditional entropy, bits/symbol
    double std_error;       ///< block-bootstrap standard error
    std::size_t n_samples;  ///< symbols consumed
    int block_k;            ///< conditioning block length
};

namespace detail {

/// Conditional entropy H(next | previous k) of the empirical (k+1)-block
/// distribution, Miller-Madow corrected. counts is indexed by the (k+1)-bit
/// window value; merging the low bit gives the k-block marginal.
inline double conditional_entropy(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    kahan_sum<> joint, marginal;
    std::size_t occupied_joint = 0, occupied_marginal = 0;
    for (std::size_t i = 0; i < counts.size(); i += 2) {
        const std::uint64_t pair = counts[i] + counts[i + 1];
        for (std::uint64_t c : {counts[i], counts[i + 1]}) {
            if (c == 0) continue;
            ++occupied_joint;
            const double q = static_cast<double>(c) / static_cast<double>(total);
            joint += -q * std::log2(q);
        }
        if (pair == 0) continue;
        ++occupied_marginal;
        const double q = static_cast<double>(pair) / static_cast<double>(total);
        marginal += -q * std::log2(q);
    }
    double h = joint.value() - marginal.value();
    // Miller-Madow: cancels the (occupied cells)/(2N ln 2) plug-in bias,
    // which at block length k is of the same size as the 3-sigma band.
    h += static_cast<double>(occupied_joint - occupied_marginal) /
         (2.0 * static_cast<double>(total) * std::log(2.0));
    return h;
}

}  // namespace detail

/// Plug-in estimate of the entropy rate from one observed path: empirical
/// conditional entropy of a symbol given the k preceding ones, with the
/// standard error from a moving-block bootstrap (64 resamples over 256
/// contiguous segments of the window stream).
inline mc_estimate plugin_entropy_rate(std::span<const std::uint8_t> z, int k) {
    if (k < 1 || k > 24) throw parameter_error("block_k", "must lie in [1, 24]");
    const std::size_t need = std::size_t{100} << k;
    if (z.size() < need)
        throw insufficient_data_error("plugin_entropy_rate: need at least " +
                                      std::to_string(need) + " symbols for block_k = " +
                                      std::to_string(k) + ", got " + std::to_string(z.size()));

    const std::size_t n_windows = z.size() - static_cast<std::size_t>(k);
    const std::uint32_t mask = (std::uint32_t{1} << (k + 1)) - 1;
    std::vector<std::uint32_t> windows(n_windows);
    std::uint32_t cur = 0;
    for (int i = 0; i <= k; ++i) cur = (cur << 1) | z[static_cast<std::size_t>(i)];
    windows[0] = cur;
    for (std::size_t i = 1; i < n_windows; ++i) {
        cur = ((cur << 1) | z[i + static_cast<std::size_t>(k)]) & mask;
        windows[i] = cur;
    }

    const std::size_t n_cells = std::size_t{1} << (k + 1);
    std::vector<std::uint64_t> counts(n_cells, 0);
    for (std::uint32_t w : windows) ++counts[w];

    mc_estimate est{};
    est.value = detail::conditional_entropy(counts);
    est.n_samples = z.size();
    est.block_k = k;

    // Bootstrap over contiguous segments so the serial dependence between
    // overlapping windows survives the resampling.
    const std::size_t n_segments = n_windows < 256 ? n_windows : 256;
    const std::size_t seg_len = n_windows / n_segments;
    std::vector<std::uint64_t> seg_counts(n_segments * n_cells, 0);
    for (std::size_t s = 0; s < n_segments; ++s)
        for (std::size_t i = s * seg_len; i < (s + 1) * seg_len; ++i)
            ++seg_counts[s * n_cells + windows[i]];

    constexpr int n_resamples = 64;
    splitmix64 rng(0x626F6F7473747261ULL);  // fixed: identical inputs, identical output
    std::vector<std::uint64_t> resample(n_cells);
    kahan_sum<> mean_acc, sq_acc;
    std::vector<double> values(n_resamples);
    for (int r = 0; r < n_resamples; ++r) {
        std::fill(resample.begin(), resample.end(), 0);
        for (std::size_t draw = 0; draw < n_segments; ++draw) {
            const std::size_t s = static_cast<std::size_t>(rng.next() % n_segments);
            const std::uint64_t* src = &seg_counts[s * n_cells];
            for (std::size_t c = 0; c < n_cells; ++c) resample[c] += src[c];
        }
        values[static_cast<std::size_t>(r)] = detail::conditional_entropy(resample);
        mean_acc += values[static_cast<std::size_t>(r)];
    }
    const double mean = mean_acc.value() / n_resamples;
    for (double v : values) sq_acc += (v - mean) * (v - mean);
    est.std_error = std::sqrt(sq_acc.value() / (n_resamples - 1));
    return est;
}

/// Writes bits as ASCII '0'/'1', wrapped at 64 symbols per line.
inline void write_bits_ascii(std::ostream& os, std::span<const std::uint8_t> bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
        os.put(bits[i] ? '1' : '0');
        if ((i + 1) % 64 == 0 || i + 1 == bits.size()) os.put('\n');
    }
}

/// Packs bits into bytes, most significant bit first; the last byte is
/// zero-padded.
inline std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return bytes;
}

inline std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes,
                                             std::size_t n_bits) {
    std::vector<std::uint8_t> bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i)
        bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
    return bits;
}

}  // namespace entrate
