#include "rfmix/predistort.hpp"

#include "rfmix/error.hpp"

#include <cmath>

namespace rfmix {

Predistorter::Matrix Predistorter::matrix() const
{
    // a s + b conj(s) = (a + b) I + i (a - b) Q
    const cplx ci = a + b;
    const cplx cq = cplx(0.0, 1.0) * (a - b);
    return {{{ci.real(), cq.real()}, {ci.imag(), cq.imag()}}};
}

Predistorter Predistorter::from_matrix(const Matrix& t)
{
    const cplx ci(t[0][0], t[1][0]);
    const cplx cq(t[0][1], t[1][1]);
    const cplx amb = cq / cplx(0.0, 1.0);
    return {(ci + amb) / 2.0, (ci - amb) / 2.0};
}

Envelope Predistorter::apply(const Envelope& env) const
{
    if (is_identity()) {
        return env;
    }
    Envelope out = env;
    for (auto& s : out.samples) {
        s = apply(s);
    }
    return out;
}

void validate(const Predistorter& p)
{
    require(std::isfinite(p.a.real()) && std::isfinite(p.a.imag()) && std::isfinite(p.b.real()) &&
                std::isfinite(p.b.imag()),
            "predistorter: non-finite coefficient");
    require(std::abs(p.a) != std::abs(p.b), "predistorter: singular (|a| == |b|)");
}

Predistorter compose(const Predistorter& outer, const Predistorter& inner)
{
    return {outer.a * inner.a + outer.b * std::conj(inner.b),
            outer.a * inner.b + outer.b * std::conj(inner.a)};
}

Predistorter inverse(const Predistorter& p)
{
    validate(p);
    const double det = std::norm(p.a) - std::norm(p.b);
    return {std::conj(p.a) / det, -p.b / det};
}

} // namespace rfmix
