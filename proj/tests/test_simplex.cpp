#include <rfmix/simplex.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace rfmix;

TEST_CASE("Nelder-Mead minimizes a quadratic")
{
    const auto f = [](std::span<const double> x) {
        return (x[0] - 1.0) * (x[0] - 1.0) + 10.0 * (x[1] + 2.0) * (x[1] + 2.0);
    };
    SimplexOptions o;
    o.max_evals = 2000;
    o.init_step = 0.5;
    const auto r = nelder_mead(f, {0.0, 0.0}, o);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
    CHECK(std::abs(r.x[1] + 2.0) < 1e-6);
    CHECK(r.evals == static_cast<int>(r.trace.size()));
    CHECK_FALSE(r.reached_target);
}

TEST_CASE("Rosenbrock")
{
    const auto f = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    SimplexOptions o;
    o.max_evals = 5000;
    o.init_step = 0.5;
    const auto r = nelder_mead(f, {-1.2, 1.0}, o);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-5);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-5);
}

TEST_CASE("target, budget and trace")
{
    int calls = 0;
    const auto f = [&](std::span<const double> x) {
        ++calls;
        return std::hypot(x[0] - 0.3, x[1] + 0.1);
    };
    SimplexOptions o;
    o.max_evals = 200;
    o.init_step = 0.05;
    o.f_target = 1e-3;
    const auto r = nelder_mead(f, {0.0, 0.0}, o);
    CHECK(r.reached_target);
    CHECK(r.f <= 1e-3);
    CHECK(calls == r.evals);

    // Reported best never worse than anything evaluated; best_f is monotone.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : r.trace) {
        best = std::min(best, e.f);
        CHECK(e.best_f == best);
    }
    CHECK(r.f == best);

    o.max_evals = 15;
    o.f_target = -1.0;
    const auto capped = nelder_mead(f, {0.0, 0.0}, o);
    CHECK(capped.evals <= 15);
    CHECK_FALSE(capped.reached_target);
}

TEST_CASE("start at the optimum stops at once")
{
    const auto f = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] - 1.0; };
    SimplexOptions o;
    o.f_target = -1.0 + 1e-12;
    const auto r = nelder_mead(f, {0.0, 0.0}, o);
    CHECK(r.reached_target);
    CHECK(r.evals == 1);
}

TEST_CASE("infinite values are rejected points, not failures")
{
    const auto f = [](std::span<const double> x) {
        if (std::abs(x[0]) > 1.0 || std::abs(x[1]) > 1.0) return std::numeric_limits<double>::infinity();
        return (x[0] - 0.9) * (x[0] - 0.9) + (x[1] - 0.9) * (x[1] - 0.9);
    };
    SimplexOptions o;
    o.max_evals = 500;
    o.init_step = 0.5;
    const auto r = nelder_mead(f, {0.0, 0.0}, o);
    CHECK(std::abs(r.x[0] - 0.9) < 1e-4);
    CHECK(std::abs(r.x[1] - 0.9) < 1e-4);
}

TEST_CASE("deterministic per seed")
{
    const auto f = [](std::span<const double> x) { return std::abs(x[0] - 0.2) + std::abs(x[1] - 0.7); };
    SimplexOptions o;
    o.seed = 3;
    const auto a = nelder_mead(f, {0.0, 0.0}, o);
    const auto b = nelder_mead(f, {0.0, 0.0}, o);
    CHECK(a.x == b.x);
    CHECK(a.evals == b.evals);
}
