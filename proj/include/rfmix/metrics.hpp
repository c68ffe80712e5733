#pragma once

#include "rfmix/loopback.hpp"

#include <limits>

namespace rfmix {

/// Ratios below this (relative to the reference bin) report as sentinels.
inline constexpr double kSentinelFloor = 1e-15;

struct LinearityReport {
    double amp_linearity = 0.0;   // (max|acc| - min|acc|) / mean|acc|
    double phase_linearity = 0.0; // rad, pk-pk after linear detrend
    double freq = 0.0;            // Hz, drive frequency when known
    std::size_t n_points = 0;
};

struct IqImbalanceEstimate {
    cplx mu_hat{};
    cplx nu_hat{};
    cplx c_hat{};
    double irr_dbc = std::numeric_limits<double>::infinity();
};

double amp_linearity(const ScanResult& scan);

/// Unwraps arg(acc) along the scan, removes the least-squares line against
/// drive phase and returns the residual max - min. Rejects scans whose
/// wrapped phase steps exceed 3 pi / 4, where the 2 pi ambiguity is no
/// longer resolvable.
double phase_linearity(const ScanResult& scan);

LinearityReport linearity_report(const ScanResult& scan);

/// Harmonic decomposition of a uniform scan: c = mean(acc),
/// mu = mean(acc e^{-i theta}), nu = mean(acc e^{+i theta}).
IqImbalanceEstimate estimate_imbalance(const ScanResult& scan);

/// Single-tone probe of an up converter, noiseless and unquantized.
struct ProbeConfig {
    double sample_rate = 1e9;
    double if_freq = 62.5e6;
    double amplitude = 0.25; // V peak at the chain input
    std::size_t n_samples = 2000;
    double lo_freq = 6.5e9;
};

void validate(const ProbeConfig& probe);

/// Complex bins of the up-converted envelope at +f_IF, -f_IF and DC.
struct UpProbe {
    cplx signal{};
    cplx image{};
    cplx carrier{};
};

UpProbe probe_up(const UpConverter& up, const ProbeConfig& probe);

/// 20 log10(|bin(+f)| / |bin(-f)|); +inf when the image is below the floor.
double measure_sideband_rejection(const UpConverter& up, const ProbeConfig& probe);

/// 20 log10(|bin(0)| / |bin(+f)|) with `bias` in place of up.bias; -inf
/// when the carrier is below the floor.
double measure_lo_leakage(const UpConverter& up, const BiasSetting& bias, const ProbeConfig& probe);

} // namespace rfmix
