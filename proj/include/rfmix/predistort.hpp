#pragma once

#include "rfmix/signal.hpp"

#include <array>

namespace rfmix {

/// Widely-linear correction s -> a s + b conj(s) applied to the IF I/Q pair
/// ahead of the up-mixer. In real terms this is a 2x2 matrix on (I, Q).
struct Predistorter {
    cplx a{1.0, 0.0};
    cplx b{0.0, 0.0};

    using Matrix = std::array<std::array<double, 2>, 2>;

    Matrix matrix() const;
    static Predistorter from_matrix(const Matrix& t);

    bool is_identity() const { return a == cplx{1.0, 0.0} && b == cplx{0.0, 0.0}; }
    cplx apply(cplx s) const { return a * s + b * std::conj(s); }
    Envelope apply(const Envelope& env) const;
};

void validate(const Predistorter& p);

/// outer(inner(s)).
Predistorter compose(const Predistorter& outer, const Predistorter& inner);
Predistorter inverse(const Predistorter& p);

} // namespace rfmix
