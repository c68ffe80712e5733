#include "rfmix/metrics.hpp"

#include "rfmix/error.hpp"

#include <algorithm>
#include <cmath>

namespace rfmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_scan(const ScanResult& scan, std::size_t min_points, const char* what)
{
    require(scan.drive_phases.size() == scan.accumulated.size(),
            std::string(what) + ": phase and value counts differ");
    require(scan.size() >= min_points,
            std::string(what) + ": needs at least " + std::to_string(min_points) + " points");
}

std::size_t probe_warmup(const ChainSpec& chain)
{
    std::size_t n = 0;
    for (const auto& s : chain.stages) {
        if (const auto* f = std::get_if<FilterParams>(&s.params)) {
            n += static_cast<std::size_t>(f->taps - 1);
        }
    }
    return n;
}

} // namespace

double amp_linearity(const ScanResult& scan)
{
    require_scan(scan, 2, "amp_linearity");
    double lo = kInf;
    double hi = -kInf;
    double sum = 0.0;
    for (const auto& z : scan.accumulated) {
        const double m = std::abs(z);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        sum += m;
    }
    const double mean = sum / static_cast<double>(scan.size());
    require(mean > 0.0, "amp_linearity: mean magnitude is zero");
    return (hi - lo) / mean;
}

double phase_linearity(const ScanResult& scan)
{
    require_scan(scan, 3, "phase_linearity");
    const std::size_t n = scan.size();
    std::vector<double> ph(n);
    ph[0] = std::arg(scan.accumulated[0]);
    for (std::size_t k = 1; k < n; ++k) {
        double step = std::arg(scan.accumulated[k]) - std::arg(scan.accumulated[k - 1]);
        step = std::remainder(step, kTwoPi);
        require(std::abs(step) <= 0.75 * kPi, "phase_linearity: phase step too large to unwrap; scan too coarse");
        ph[k] = ph[k - 1] + step;
    }

    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += scan.drive_phases[k];
        my += ph[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dx = scan.drive_phases[k] - mx;
        sxx += dx * dx;
        sxy += dx * (ph[k] - my);
    }
    require(sxx > 0.0, "phase_linearity: drive phases are all equal");
    const double slope = sxy / sxx;

    double lo = kInf, hi = -kInf;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = ph[k] - my - slope * (scan.drive_phases[k] - mx);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return hi - lo;
}

LinearityReport linearity_report(const ScanResult& scan)
{
    LinearityReport rep;
    rep.amp_linearity = amp_linearity(scan);
    rep.phase_linearity = phase_linearity(scan);
    rep.freq = scan.config ? scan.config->lo_freq + scan.config->if_freq : 0.0;
    rep.n_points = scan.size();
    return rep;
}

IqImbalanceEstimate estimate_imbalance(const ScanResult& scan)
{
    require_scan(scan, 3, "estimate_imbalance");
    const std::size_t n = scan.size();
    const double step = kTwoPi / static_cast<double>(n);
    const double theta0 = scan.drive_phases[0];
    for (std::size_t k = 0; k < n; ++k) {
        const double expect = theta0 + step * static_cast<double>(k);
        require(std::abs(scan.drive_phases[k] - expect) <= 1e-9,
                "estimate_imbalance: drive phases are not a uniform 2 pi grid");
    }

    IqImbalanceEstimate est;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx rot = std::polar(1.0, scan.drive_phases[k]);
        est.c_hat += scan.accumulated[k];
        est.mu_hat += scan.accumulated[k] * std::conj(rot);
        est.nu_hat += scan.accumulated[k] * rot;
    }
    const double inv = 1.0 / static_cast<double>(n);
    est.c_hat *= inv;
    est.mu_hat *= inv;
    est.nu_hat *= inv;
    const double ratio = std::abs(est.nu_hat) / std::abs(est.mu_hat);
    est.irr_dbc = ratio < kSentinelFloor ? kInf : -20.0 * std::log10(ratio);
    return est;
}

void validate(const ProbeConfig& probe)
{
    require(std::isfinite(probe.sample_rate) && probe.sample_rate > 0.0, "probe: sample_rate must be > 0");
    require(std::isfinite(probe.if_freq) && probe.if_freq > 0.0 && probe.if_freq < probe.sample_rate / 2.0,
            "probe: if_freq must lie in (0, sample_rate / 2)");
    require(std::isfinite(probe.amplitude) && probe.amplitude > 0.0, "probe: amplitude must be > 0");
    require(probe.n_samples >= 1, "probe: n_samples must be >= 1");
    require(is_integer_period(probe.if_freq, probe.sample_rate, probe.n_samples),
            "probe: n_samples must hold an integer number of IF periods");
    require(probe.lo_freq > 0.0, "probe: lo_freq must be > 0");
}

UpProbe probe_up(const UpConverter& up, const ProbeConfig& probe)
{
    validate(probe);
    require(is_up(up.chain.role), "probe_up: chain must have an UP role");
    validate(up.chain, probe.sample_rate);
    validate(up.predistorter);

    const std::size_t warm = probe_warmup(up.chain);
    Envelope tx = up.predistorter.apply(
        synth_tone({probe.if_freq, probe.amplitude, 0.0}, probe.sample_rate, warm + probe.n_samples));
    Envelope rf = run_chain(tx, up.chain, {false, 0, up.bias, probe.lo_freq}).env;
    rf.samples.erase(rf.samples.begin(), rf.samples.begin() + static_cast<std::ptrdiff_t>(warm));
    return {single_bin_dft(rf, probe.if_freq), single_bin_dft(rf, -probe.if_freq), single_bin_dft(rf, 0.0)};
}

double measure_sideband_rejection(const UpConverter& up, const ProbeConfig& probe)
{
    const UpProbe p = probe_up(up, probe);
    const double ratio = std::abs(p.image) / std::abs(p.signal);
    return ratio < kSentinelFloor ? kInf : -20.0 * std::log10(ratio);
}

double measure_lo_leakage(const UpConverter& up, const BiasSetting& bias, const ProbeConfig& probe)
{
    UpConverter biased = up;
    biased.bias = bias;
    const UpProbe p = probe_up(biased, probe);
    const double ratio = std::abs(p.carrier) / std::abs(p.signal);
    return ratio < kSentinelFloor ? -kInf : 20.0 * std::log10(ratio);
}

} // namespace rfmix
