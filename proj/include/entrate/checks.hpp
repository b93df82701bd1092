#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "entrate/bounds.hpp"
#include "entrate/forward.hpp"
#include "entrate/model.hpp"

namespace entrate {

struct check_result {
    std::string name;
    bool pass;
    std::string detail;
};

struct check_options {
    bool quick = false;         ///< lowered depth caps, finishes in a few seconds
    bool inject_fault = false;  ///< deliberately perturb one check (self-test)
    unsigned threads = 0;
};

namespace detail {

inline std::string fmt_exp(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

inline std::string param_tag(const model_params& p) {
    std::ostringstream os;
    os << "(pi01=" << p.pi01 << ",pi10=" << p.pi10 << ",eps=" << p.eps << ")";
    return os.str();
}

inline bit_seq bits_of(std::uint32_t word, int n) {
    bit_seq z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = (word >> i) & 1u;
    return z;
}

}  // namespace detail

/// Runs the cross-module invariant suite on a fixed parameter set:
/// probability conservation, recursion-vs-oracle equivalence, bound
/// monotonicity, the L <= H <= U sandwich, the geometric width envelope and
/// the chain identity against block entropies. Every check reports its
/// worst observed deviation.
inline std::vector<check_result> run_checks(const check_options& opt = {}) {
    const model_params sets[] = {
        validate(0.1, 0.1, 0.01),
        validate(0.2, 0.1, 0.05),
        validate(0.1, 0.1, 0.0),
    };
    const int mass_cap = opt.quick ? 8 : 12;
    const int oracle_cap = opt.quick ? 6 : 10;
    const int table_cap = opt.quick ? 8 : 14;
    const int chain_cap = opt.quick ? 6 : 12;

    std::vector<check_result> results;
    for (const model_params& p : sets) {
        const std::string tag = detail::param_tag(p);

        {
            double worst = 0.0;
            for (int n = 1; n <= mass_cap; ++n)
                worst = std::max(worst, std::abs(probability_mass(p, n, opt.threads) - 1.0));
            results.push_back({"conservation" + tag, worst <= 1e-12,
                               "max |mass - 1| = " + detail::fmt_exp(worst) + " for n <= " +
                                   std::to_string(mass_cap)});
        }
        {
            const double bias = opt.inject_fault ? 1e-6 : 0.0;
            double worst = 0.0;
            for (int n = 1; n <= oracle_cap; ++n) {
                for (std::uint32_t w = 0; w < (std::uint32_t{1} << n); ++w) {
                    const bit_seq z = detail::bits_of(w, n);
                    const double by_recursion = sequence_prob(p, z).prob + bias;
                    worst = std::max(worst, std::abs(by_recursion - brute_force_prob(p, z)));
                }
            }
            results.push_back({"oracle-equivalence" + tag, worst <= 1e-12,
                               "max |recursion - marginalization| = " + detail::fmt_exp(worst) +
                                   " for n <= " + std::to_string(oracle_cap)});
        }

        const std::vector<bounds_row> rows = bounds_table(p, table_cap, opt.threads);
        {
            double worst = 0.0;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                worst = std::max(worst, rows[i - 1].lower - rows[i].lower);
                worst = std::max(worst, rows[i].upper - rows[i - 1].upper);
            }
            results.push_back({"monotonicity" + tag, worst <= 1e-12,
                               "max bound regression = " + detail::fmt_exp(worst)});
        }
        {
            double worst = 0.0;
            for (const bounds_row& r : rows) {
                worst = std::max(worst, r.lower - r.approx);
                worst = std::max(worst, r.approx - r.upper);
            }
            results.push_back({"sandwich" + tag, worst <= 1e-12,
                               "max L-over-H / H-over-U excess = " + detail::fmt_exp(worst)});
        }
        {
            const contraction_info ci = contraction(p);
            double worst = 0.0;
            bool applicable = ci.contractive;
            if (applicable)
                for (const bounds_row& r : rows) worst = std::max(worst, r.width - *r.geo);
            results.push_back({"envelope" + tag, worst <= 1e-12,
                               applicable ? "max width excess over M*delta^n = " +
                                                detail::fmt_exp(worst)
                                          : "not contractive, envelope not claimed"});
        }
        {
            double worst = 0.0;
            double h_prev = block_entropy(p, 0, opt.threads);
            for (int n = 0; n <= chain_cap; ++n) {
                const double h_next = block_entropy(p, n + 1, opt.threads);
                worst = std::max(worst, std::abs(rows[static_cast<std::size_t>(n)].approx -
                                                 (h_next - h_prev)));
                h_prev = h_next;
            }
            results.push_back({"chain-identity" + tag, worst <= 1e-10,
                               "max |H_row - (H(n+1) - H(n))| = " + detail::fmt_exp(worst) +
                                   " for n <= " + std::to_string(chain_cap)});
        }
    }
    return results;
}

}  // namespace entrate
