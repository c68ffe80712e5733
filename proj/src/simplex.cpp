#include "rfmix/simplex.hpp"

#include "rfmix/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rfmix {

namespace {

using Point = std::vector<double>;

struct Budget {
    const Objective& f;
    const SimplexOptions& opt;
    SimplexResult& res;

    bool exhausted() const { return res.evals >= opt.max_evals || res.reached_target; }

    double operator()(const Point& x)
    {
        const double v = f(x);
        ++res.evals;
        if (res.trace.empty() || v < res.f) {
            res.f = v;
            res.x = x;
        }
        res.trace.push_back({x, v, res.f});
        if (res.f <= opt.f_target) {
            res.reached_target = true;
        }
        return v;
    }
};

double spread(const std::vector<Point>& simplex, std::size_t best)
{
    double d = 0.0;
    for (const auto& p : simplex) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            d = std::max(d, std::abs(p[i] - simplex[best][i]));
        }
    }
    return d;
}

// One descent from x0; returns true when it stopped because the simplex collapsed.
bool descend(Budget& eval, const Point x0, double step, std::mt19937_64& rng)
{
    const std::size_t n = x0.size();
    std::vector<Point> simplex{x0};
    std::vector<double> fx{eval(x0)};
    if (eval.exhausted()) {
        return false;
    }
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < n && !eval.exhausted(); ++i) {
        Point p = x0;
        p[i] += coin(rng) ? step : -step;
        simplex.push_back(p);
        fx.push_back(eval(p));
    }
    if (eval.exhausted()) {
        return false;
    }

    std::vector<std::size_t> order(n + 1);
    auto affine = [&](const Point& a, const Point& b, double t) {
        Point p(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = a[i] + t * (b[i] - a[i]);
        }
        return p;
    };

    while (!eval.exhausted()) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return fx[a] < fx[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second = order[n - 1];
        if (spread(simplex, best) < eval.opt.x_tol) {
            return true;
        }

        Point centroid(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += simplex[order[j]][i] / static_cast<double>(n);
            }
        }

        const Point xr = affine(centroid, simplex[worst], -1.0);
        const double fr = eval(xr);
        if (eval.exhausted()) break;
        if (fr < fx[best]) {
            const Point xe = affine(centroid, simplex[worst], -2.0);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fx[worst] = fe;
            } else {
                simplex[worst] = xr;
                fx[worst] = fr;
            }
            continue;
        }
        if (fr < fx[second]) {
            simplex[worst] = xr;
            fx[worst] = fr;
            continue;
        }
        const bool outside = fr < fx[worst];
        const Point xc = outside ? affine(centroid, xr, 0.5) : affine(centroid, simplex[worst], 0.5);
        const double fc = eval(xc);
        if (eval.exhausted()) break;
        if (fc < (outside ? fr : fx[worst])) {
            simplex[worst] = xc;
            fx[worst] = fc;
            continue;
        }
        for (std::size_t j = 1; j <= n && !eval.exhausted(); ++j) {
            const std::size_t v = order[j];
            simplex[v] = affine(simplex[best], simplex[v], 0.5);
            fx[v] = eval(simplex[v]);
        }
    }
    return false;
}

} // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, const SimplexOptions& opt)
{
    require(!x0.empty(), "nelder_mead: empty start point");
    require(opt.max_evals >= 1, "nelder_mead: max_evals must be >= 1");
    require(std::isfinite(opt.init_step) && opt.init_step > 0.0, "nelder_mead: init_step must be > 0");

    SimplexResult res;
    Budget eval{f, opt, res};
    std::mt19937_64 rng(opt.seed);
    const bool stalled = descend(eval, x0, opt.init_step, rng);
    if (stalled && opt.restart_on_stall && !eval.exhausted()) {
        res.restarted = true;
        descend(eval, res.x, opt.init_step / 2.0, rng);
    }
    return res;
}

} // namespace rfmix
