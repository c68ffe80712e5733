#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace rfmix {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reference impedance used for every dBm <-> volt conversion.
inline constexpr double kZ0 = 50.0;

/// Boltzmann constant times 290 K, in dBm/Hz (about -174).
double thermal_floor_dbm_hz();

/// Pass as a noise density to disable noise injection.
inline constexpr double kNoNoise = -std::numeric_limits<double>::infinity();

/// Uniformly sampled complex envelope around `center_freq`. A sample z
/// stands for the passband voltage Re{z e^{i 2 pi f_c t}}, so |z| is the
/// peak voltage and |z|^2 / (2 Z0) the average power.
struct Envelope {
    double sample_rate = 1e9;
    double center_freq = 0.0;
    std::vector<cplx> samples;

    std::size_t size() const { return samples.size(); }
};

struct ToneSpec {
    double freq = 0.0;      // Hz, offset from the envelope center
    double amplitude = 1.0; // V peak
    double phase = 0.0;     // rad
};

struct QuantizerSpec {
    int bits = 16;
    double full_scale = 1.0; // V peak, symmetric

    /// Level spacing of the symmetric mid-tread grid.
    double lsb() const;
};

struct QuantizeResult {
    Envelope env;
    std::size_t clip_count = 0; // samples with at least one clipped component
};

double dbm_to_vpeak(double p_dbm, double z0 = kZ0);
double vpeak_to_dbm(double v_peak, double z0 = kZ0);
double dbm_to_watts(double p_dbm);
double watts_to_dbm(double w);

/// Mean power of the envelope in dBm (|z|^2 / 2 Z0 averaged).
double mean_power_dbm(const Envelope& env, double z0 = kZ0);

void validate(const Envelope& env);
void validate(const QuantizerSpec& q);

Envelope synth_tone(const ToneSpec& tone, double sample_rate, std::size_t n);

/// Adds a second tone in place; same rules as synth_tone.
void add_tone(Envelope& env, const ToneSpec& tone);

QuantizeResult quantize(const Envelope& env, const QuantizerSpec& q);

/// Adds white complex Gaussian noise whose total power over the envelope
/// bandwidth is `noise_density_dbm_hz + 10 log10(sample_rate)`. Passing
/// kNoNoise returns the input unchanged.
Envelope add_awgn(const Envelope& env, double noise_density_dbm_hz, std::uint64_t seed,
                  double z0 = kZ0);

/// Complex peak amplitude of the component at `freq`. The record must hold
/// an integer number of periods of `freq`; otherwise ValidationError.
cplx single_bin_dft(const Envelope& env, double freq);

/// Whether `freq` completes an integer number of periods in `n` samples.
bool is_integer_period(double freq, double sample_rate, std::size_t n);

/// splitmix64 finalizer, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace rfmix
