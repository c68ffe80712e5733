#pragma once

#include "rfmix/signal.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rfmix {

/// Supply rail available to the I/Q bias DACs, volts.
inline constexpr double kDefaultBiasRange = 1.8;

/// Quadrature mixer as a widely-linear map z = mu * s + nu * conj(s) + leak.
///
/// `mu` carries the conversion loss, `nu` the image (conjugate) transfer
/// produced by I/Q gain and phase mismatch, and `leak` the LO feedthrough
/// that lands on the output carrier.
struct MixerParams {
    cplx mu{1.0, 0.0};
    cplx nu{0.0, 0.0};
    cplx leak{0.0, 0.0}; // V

    /// Datasheet-facing form: I branch gain 1, Q branch gain g e^{i phi},
    /// then mu = L (1 + g e^{i phi}) / 2, nu = L (1 - g e^{i phi}) / 2 with
    /// L = 10^(-conv_loss_db / 20).
    static MixerParams from_gain_phase(double gain, double phase_rad, double conv_loss_db,
                                       cplx leak = {});

    double conv_loss_db() const;
    /// 20 log10(|mu| / |nu|); +inf when nu == 0.
    double image_rejection_db() const;
    /// LO drive relative to the leak amplitude, dB.
    double lo_to_rf_isolation_db(double lo_drive_dbm) const;
};

struct AmpParams {
    double gain_db = 20.0;
    double nf_db = 0.0;
    double p1db_in_dbm = 10.0;
    double iip3_dbm = 20.0; // +inf selects a perfectly linear stage

    /// Peak envelope amplitude corresponding to iip3_dbm.
    double a3_vpeak() const;
};

struct AttenParams {
    double attenuation_db = 0.0;
};

struct FilterParams {
    double cutoff = 400e6; // Hz
    int taps = 63;         // odd
};

struct BiasSetting {
    double b_i = 0.0; // V
    double b_q = 0.0; // V

    cplx as_complex() const { return {b_i, b_q}; }
    static BiasSetting from_complex(cplx b) { return {b.real(), b.imag()}; }
};

void validate(const MixerParams& m);
void validate(const AmpParams& a);
void validate(const AttenParams& a);
void validate(const FilterParams& f, double sample_rate);
void validate(const BiasSetting& b, double range = kDefaultBiasRange);

/// Up-conversion: z = mu s' + nu conj(s') + leak with s' = s + (b_i + i b_q).
/// The input must be IF-referenced (center 0); the output is centered on lo_freq.
Envelope mixer_up(const Envelope& s, const MixerParams& m, const BiasSetting& bias, double lo_freq);

/// Down-conversion of an RF envelope: mu w + nu conj(w) + leak, output centered at 0.
Envelope mixer_down(const Envelope& w, const MixerParams& m);

struct AmpResult {
    Envelope env;
    std::size_t overdrive_count = 0; // samples beyond A3 / 2 at the nonlinearity input
};

/// Memoryless AM-AM stage y = g x - (g / A3^2) |x|^2 x. When `noise_seed` is
/// set, input-referred noise at kT (F - 1) is added ahead of the cubic.
AmpResult amplify(const Envelope& env, const AmpParams& a, std::optional<std::uint64_t> noise_seed);

Envelope attenuate(const Envelope& env, const AttenParams& at);

/// Matched attenuator at 290 K: attenuates and adds kT (L - 1) input-referred noise.
Envelope attenuate_thermal(const Envelope& env, const AttenParams& at, std::uint64_t seed);

/// Kaiser-windowed sinc taps, unit DC gain.
std::vector<double> design_lowpass(const FilterParams& f, double sample_rate);

/// Causal FIR, output length equals input length.
Envelope lowpass(const Envelope& env, const FilterParams& f);

/// Frequency response of real taps at `freq` (DTFT with causal indexing).
cplx fir_response(const std::vector<double>& taps, double freq, double sample_rate);

/// Input-referred excess noise density kT (F - 1) for a given noise figure;
/// kNoNoise when nf_db <= 0.
double excess_noise_density_dbm_hz(double nf_db);

} // namespace rfmix
