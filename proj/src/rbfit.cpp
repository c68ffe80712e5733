#include "rfmix/rbfit.hpp"

#include "rfmix/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

namespace rfmix {

namespace {

constexpr double kVarianceFloor = 1e-2; // floor on f (1 - f)
constexpr int kMaxIterations = 200;

void require_dimension(int d)
{
    require(d == 2 || d == 4, "rb: dimension must be 2 or 4");
}

struct Normal2 {
    double a00 = 0.0, a01 = 0.0, a11 = 0.0;
    double det() const { return a00 * a11 - a01 * a01; }
};

} // namespace

std::string_view to_string(RbFitStatus s)
{
    switch (s) {
    case RbFitStatus::ok: return "ok";
    case RbFitStatus::p_clamped: return "p_clamped";
    case RbFitStatus::not_converged: return "not_converged";
    }
    return "?";
}

void validate(const RbDataset& data)
{
    require_dimension(data.dimension);
    std::set<int> lengths;
    for (const auto& pt : data.points) {
        require(pt.m >= 1, "rb: sequence length must be >= 1");
        require(std::isfinite(pt.survival) && pt.survival >= 0.0 && pt.survival <= 1.0,
                "rb: survival must lie in [0, 1]");
        require(pt.shots >= 1, "rb: shots must be >= 1");
        lengths.insert(pt.m);
    }
    require(lengths.size() >= 3, "rb: need at least 3 distinct sequence lengths");
}

double process_infidelity(double p, int d)
{
    require_dimension(d);
    require(std::isfinite(p) && p > 0.0 && p <= 1.0, "rb: p must lie in (0, 1]");
    const double d2 = static_cast<double>(d) * d;
    return (d2 - 1.0) * (1.0 - p) / d2;
}

double decay_from_infidelity(double e, int d)
{
    require_dimension(d);
    const double d2 = static_cast<double>(d) * d;
    require(std::isfinite(e) && e >= 0.0 && e < (d2 - 1.0) / d2, "rb: infidelity out of range");
    return 1.0 - e * d2 / (d2 - 1.0);
}

RbDataset gen_synthetic_rb(double A, double p, std::span<const int> lengths, long shots, std::uint64_t seed,
                           int dimension, bool noiseless)
{
    require(std::isfinite(p) && p > 0.0 && p <= 1.0, "rb: p must lie in (0, 1]");
    require(std::isfinite(A) && A > 0.0 && A <= 1.0, "rb: A must lie in (0, 1]");
    require(shots >= 1, "rb: shots must be >= 1");
    require_dimension(dimension);

    RbDataset data;
    data.dimension = dimension;
    std::mt19937_64 rng(seed);
    for (const int m : lengths) {
        require(m >= 1, "rb: sequence length must be >= 1");
        const double f = A * std::pow(p, m);
        require(f >= 0.0 && f <= 1.0, "rb: A p^m outside [0, 1]");
        double y = f;
        if (!noiseless) {
            std::binomial_distribution<long> draw(shots, f);
            y = static_cast<double>(draw(rng)) / static_cast<double>(shots);
        }
        data.points.push_back({m, y, shots});
    }
    return data;
}

RbFit fit_decay(const RbDataset& data)
{
    validate(data);

    // Canonical order so the result does not depend on input order.
    std::vector<RbPoint> pts = data.points;
    std::sort(pts.begin(), pts.end(), [](const RbPoint& a, const RbPoint& b) {
        if (a.m != b.m) return a.m < b.m;
        if (a.survival != b.survival) return a.survival < b.survival;
        return a.shots < b.shots;
    });
    const std::size_t n = pts.size();

    // Start: weighted regression of log(y) on m, weights n y / (1 - y).
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& pt : pts) {
        if (pt.survival <= 0.0) {
            continue;
        }
        const double cap = 1.0 - 0.5 / static_cast<double>(pt.shots);
        const double y = std::min(pt.survival, cap);
        const double w = static_cast<double>(pt.shots) * y / std::max(1.0 - y, 1e-12);
        const double ly = std::log(pt.survival);
        sw += w;
        sx += w * pt.m;
        sy += w * ly;
        sxx += w * pt.m * pt.m;
        sxy += w * pt.m * ly;
    }
    double A = 0.5, p = 0.99;
    const double den = sw * sxx - sx * sx;
    if (sw > 0.0 && den > 0.0) {
        const double slope = (sw * sxy - sx * sy) / den;
        const double icpt = (sy - slope * sx) / sw;
        p = std::clamp(std::exp(slope), 1e-6, 1.0);
        A = std::clamp(std::exp(icpt), 1e-6, 1.0);
    }

    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = A * std::pow(p, pts[i].m);
        weight[i] = static_cast<double>(pts[i].shots) / std::max(f * (1.0 - f), kVarianceFloor);
    }

    auto chi2 = [&](double a, double q) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = pts[i].survival - a * std::pow(q, pts[i].m);
            s += weight[i] * r * r;
        }
        return s;
    };
    auto normal = [&](double a, double q, double& g0, double& g1) {
        Normal2 h;
        g0 = g1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = pts[i].m;
            const double pm = std::pow(q, m);
            const double j0 = pm;
            const double j1 = a * m * std::pow(q, m - 1.0);
            const double r = pts[i].survival - a * pm;
            h.a00 += weight[i] * j0 * j0;
            h.a01 += weight[i] * j0 * j1;
            h.a11 += weight[i] * j1 * j1;
            g0 += weight[i] * j0 * r;
            g1 += weight[i] * j1 * r;
        }
        return h;
    };

    // Levenberg-Marquardt on (A, p).
    RbFit fit;
    double lambda = 1e-3;
    double cost = chi2(A, p);
    bool converged = false;
    for (int it = 0; it < kMaxIterations && !converged; ++it) {
        fit.iterations = it + 1;
        double g0 = 0.0, g1 = 0.0;
        const Normal2 h = normal(A, p, g0, g1);
        bool accepted = false;
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            const double d00 = h.a00 * (1.0 + lambda), d11 = h.a11 * (1.0 + lambda);
            const double det = d00 * d11 - h.a01 * h.a01;
            if (!(det > 0.0)) {
                lambda *= 10.0;
                continue;
            }
            const double dA = (d11 * g0 - h.a01 * g1) / det;
            const double dp = (d00 * g1 - h.a01 * g0) / det;
            const double nA = A + dA;
            const double np = p + dp;
            if (!(np > 0.0) || !std::isfinite(nA)) {
                lambda *= 10.0;
                continue;
            }
            const double ncost = chi2(nA, np);
            if (ncost <= cost) {
                const bool tiny = std::abs(dA) <= 1e-15 * std::max(1.0, std::abs(A)) &&
                                  std::abs(dp) <= 1e-15 * std::max(1.0, std::abs(p));
                converged = tiny || (cost - ncost) <= 1e-14 * cost;
                A = nA;
                p = np;
                cost = ncost;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) {
            converged = true; // no downhill step left at machine precision
        }
    }

    fit.status = converged ? RbFitStatus::ok : RbFitStatus::not_converged;
    if (p > 1.0) {
        p = 1.0;
        fit.status = RbFitStatus::p_clamped;
    }

    double g0 = 0.0, g1 = 0.0;
    const Normal2 h = normal(A, p, g0, g1);
    const double det = h.det();
    const double inv00 = det > 0.0 ? h.a11 / det : 0.0;
    const double inv11 = det > 0.0 ? h.a00 / det : 0.0;
    const double s2 = n > 2 ? chi2(A, p) / static_cast<double>(n - 2) : 0.0;

    fit.A = A;
    fit.p = p;
    fit.process_infidelity = process_infidelity(p, data.dimension);
    fit.se_A = std::sqrt(s2 * inv00);
    fit.se_p = std::sqrt(s2 * inv11);
    fit.se_p_binomial = std::sqrt(inv11);
    const double d2 = static_cast<double>(data.dimension) * data.dimension;
    fit.se_infidelity = (d2 - 1.0) / d2 * fit.se_p;
    fit.curve.reserve(data.points.size());
    for (const auto& pt : data.points) {
        fit.curve.push_back(A * std::pow(p, pt.m));
    }
    return fit;
}

} // namespace rfmix
