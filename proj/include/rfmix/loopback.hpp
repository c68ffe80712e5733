#pragma once

#include "rfmix/chain.hpp"
#include "rfmix/predistort.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rfmix {

/// Declared operating range of the modules.
inline constexpr double kMinLoHz = 2.5e9;
inline constexpr double kMaxLoHz = 8.5e9;
inline constexpr double kMaxIfHz = 500e6;

struct LoopbackConfig {
    double if_freq = 63.5e6;
    double lo_freq = 6.5e9;
    double sample_rate = 1e9;
    QuantizerSpec dac{16, 1.0};
    QuantizerSpec adc{16, 1.0};
    bool quantize = true;
    double drive_amplitude = 0.25; // V peak at the DAC output
    std::size_t accum_len = 2000;  // samples, whole IF periods
    double rf_path_atten_db = 0.0;
    std::size_t n_phase_points = 64;
    bool noise_on = false;
    std::uint64_t seed = 0;
};

void validate(const LoopbackConfig& cfg);

/// Transmit side: analog chain plus its DC bias and IF predistortion.
struct UpConverter {
    ChainSpec chain{ChainRole::UPL, {}, 0.0};
    BiasSetting bias{};
    Predistorter predistorter{};
};

struct LoopbackResult {
    cplx accumulated{};
    std::size_t overdrive_count = 0;
    std::size_t dac_clips = 0;
    std::size_t adc_clips = 0;
};

struct ScanResult {
    std::vector<double> drive_phases;
    std::vector<cplx> accumulated;
    std::optional<LoopbackConfig> config;
    std::size_t overdrive_count = 0;
    std::size_t clip_count = 0;

    std::size_t size() const { return accumulated.size(); }
};

/// Samples discarded ahead of the accumulation window so every FIR in the
/// two chains is in steady state.
std::size_t warmup_samples(const UpConverter& up, const ChainSpec& dn);

/// One readout: IF tone at `drive_phase` through DAC, up chain, RF path,
/// down chain, ADC, then digital mixing against exp(-i 2 pi f_IF k / fs) and
/// summation over accum_len samples. Accumulated units are ADC codes times
/// samples.
LoopbackResult run_loopback(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg,
                            double drive_phase);

/// Uniform 2 pi scan with point j seeded by mix_seed(cfg.seed, j). Points
/// are evaluated in parallel (OpenMP); output is identical to
/// phase_scan_serial.
ScanResult phase_scan(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg);

/// Reference implementation of phase_scan, one point after another.
ScanResult phase_scan_serial(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg);

/// Coefficients of the noiseless small-signal locus
/// acc(theta) = mu e^{i theta} + nu e^{-i theta} + c.
struct CompositeTransfer {
    cplx mu{};
    cplx nu{};
    cplx c{};
};

/// Analytic composition of the two mixers' (mu, nu, leak) with the linear
/// gains, filter responses, bias, predistorter and digital down-conversion.
/// Whenever if_freq != 0 the accumulator rejects the image and DC terms and
/// nu = c = 0.
CompositeTransfer composite_transfer(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg);

/// Uniformly sampled locus mu e^{i theta} + nu e^{-i theta} + c, n points.
ScanResult ellipse_scan(std::size_t n, cplx mu, cplx nu, cplx c);

} // namespace rfmix
