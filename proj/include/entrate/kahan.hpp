#pragma once

#include <cmath>

namespace entrate {

/// Neumaier-compensated accumulator. Tracks the rounding error of every
/// addition in a carry term so sums over 2^n terms stay near one ulp.
template <typename Real = double>
struct kahan_sum {
    Real sum{0};
    Real carry{0};

    void add(Real value) {
        const Real t = sum + value;
        if (std::abs(sum) >= std::abs(value)) {
            carry += (sum - t) + value;
        } else {
            carry += (value - t) + sum;
        }
        sum = t;
    }

    void operator+=(Real value) { add(value); }

    /// Folds another partial sum in. Merge order must be fixed by the caller
    /// when reductions have to be reproducible.
    void merge(const kahan_sum& other) {
        add(other.sum);
        add(other.carry);
    }

    Real value() const { return sum + carry; }
};

}  // namespace entrate
