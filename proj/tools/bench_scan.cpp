// Times the OpenMP phase scan against the serial reference on a config's
// loopback section and checks that both produce the same accumulators.
#include <rfmix/config.hpp>
#include <rfmix/error.hpp>
#include <rfmix/loopback.hpp>

#include <CLI11.hpp>

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <iostream>

using namespace rfmix;

namespace {

template <class F>
double best_seconds(int repeat, F&& f)
{
    double best = 1e300;
    for (int r = 0; r < repeat; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        best = std::min(best, dt.count());
    }
    return best;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Serial vs parallel loopback scan benchmark"};
    std::string config = "configs/bench_example.json";
    std::size_t points = 256;
    int repeat = 3;
    app.add_option("config", config, "Configuration with a loopback section");
    app.add_option("--points", points, "Scan points")->check(CLI::Range(8, 1 << 20));
    app.add_option("--repeat", repeat, "Timing repetitions (best is reported)")->check(CLI::Range(1, 100));
    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = load_config(config);
        require(cfg.loopback.has_value(), config + ": no loopback section");
        LoopbackConfig lb = cfg.loopback->config;
        lb.n_phase_points = points;
        const UpConverter up = cfg.loopback_up();
        const ChainSpec& dn = cfg.loopback_dn();

        ScanResult serial, parallel;
        const double ts = best_seconds(repeat, [&] { serial = phase_scan_serial(up, dn, lb); });
        const double tp = best_seconds(repeat, [&] { parallel = phase_scan(up, dn, lb); });
        const bool same = serial.accumulated == parallel.accumulated;

        std::printf("points %zu, threads %d\n", points, omp_get_max_threads());
        std::printf("serial   %.4f s (%.1f us/point)\n", ts, 1e6 * ts / static_cast<double>(points));
        std::printf("parallel %.4f s (%.1f us/point), speedup %.2fx\n", tp,
                    1e6 * tp / static_cast<double>(points), ts / tp);
        std::printf("outputs %s\n", same ? "identical" : "DIFFER");
        return same ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
