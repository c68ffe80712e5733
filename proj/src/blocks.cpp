#include "rfmix/blocks.hpp"

#include "rfmix/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rfmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kaiser design target; leaves margin over the 60 dB stopband contract.
constexpr double kFilterAttenDb = 70.0;

double kaiser_beta(double atten_db)
{
    return 0.1102 * (atten_db - 8.7);
}

// Edges the filter contract is stated against.
double pass_edge(const FilterParams& f) { return 0.8 * f.cutoff; }
double stop_edge(const FilterParams& f) { return 1.5 * f.cutoff; }

int min_taps(const FilterParams& f, double sample_rate)
{
    if (stop_edge(f) >= sample_rate / 2.0) {
        return 3;
    }
    const double dw = kTwoPi * (stop_edge(f) - pass_edge(f)) / sample_rate;
    int n = static_cast<int>(std::ceil((kFilterAttenDb - 7.95) / (2.285 * dw))) + 1;
    return n % 2 == 0 ? n + 1 : n;
}

} // namespace

MixerParams MixerParams::from_gain_phase(double gain, double phase_rad, double conv_loss_db, cplx leak)
{
    require(std::isfinite(gain) && gain > 0.0, "mixer: gain imbalance must be > 0");
    require(std::isfinite(phase_rad), "mixer: phase imbalance must be finite");
    require(std::isfinite(conv_loss_db) && conv_loss_db >= 0.0, "mixer: conv_loss_db must be >= 0");
    const double l = std::pow(10.0, -conv_loss_db / 20.0);
    const cplx gq = std::polar(gain, phase_rad);
    return MixerParams{l * (1.0 + gq) / 2.0, l * (1.0 - gq) / 2.0, leak};
}

double MixerParams::conv_loss_db() const
{
    return -20.0 * std::log10(std::abs(mu));
}

double MixerParams::image_rejection_db() const
{
    if (std::abs(nu) == 0.0) {
        return kInf;
    }
    return 20.0 * std::log10(std::abs(mu) / std::abs(nu));
}

double MixerParams::lo_to_rf_isolation_db(double lo_drive_dbm) const
{
    if (std::abs(leak) == 0.0) {
        return kInf;
    }
    return 20.0 * std::log10(dbm_to_vpeak(lo_drive_dbm) / std::abs(leak));
}

double AmpParams::a3_vpeak() const
{
    if (iip3_dbm == kInf) {
        return kInf;
    }
    return dbm_to_vpeak(iip3_dbm);
}

void validate(const MixerParams& m)
{
    auto finite = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    require(finite(m.mu) && finite(m.nu) && finite(m.leak), "mixer: non-finite parameter");
    require(std::abs(m.nu) < std::abs(m.mu), "mixer: |nu| must be below |mu|");
    require(std::abs(m.mu) <= 1.0 + 1e-12, "mixer: |mu| > 1 implies negative conversion loss");
}

void validate(const AmpParams& a)
{
    require(std::isfinite(a.gain_db), "amp: gain_db must be finite");
    require(std::isfinite(a.nf_db) && a.nf_db >= 0.0, "amp: nf_db must be >= 0");
    require(std::isfinite(a.p1db_in_dbm), "amp: p1db_in_dbm must be finite");
    require(!std::isnan(a.iip3_dbm) && a.iip3_dbm > a.p1db_in_dbm,
            "amp: iip3_dbm must exceed p1db_in_dbm");
}

void validate(const AttenParams& a)
{
    require(std::isfinite(a.attenuation_db) && a.attenuation_db >= 0.0,
            "atten: attenuation_db must be >= 0");
}

void validate(const FilterParams& f, double sample_rate)
{
    require(std::isfinite(f.cutoff) && f.cutoff > 0.0 && f.cutoff < sample_rate / 2.0,
            "lowpass: cutoff must lie in (0, sample_rate / 2)");
    require(f.taps >= 3 && f.taps % 2 == 1, "lowpass: taps must be odd and >= 3");
    const int need = min_taps(f, sample_rate);
    require(f.taps >= need, "lowpass: " + std::to_string(f.taps) + " taps cannot reach 60 dB at 1.5x cutoff; need " +
                                std::to_string(need));
}

void validate(const BiasSetting& b, double range)
{
    require(std::isfinite(b.b_i) && std::isfinite(b.b_q), "bias: non-finite value");
    require(std::abs(b.b_i) <= range && std::abs(b.b_q) <= range,
            "bias: setting outside the +/-" + std::to_string(range) + " V supply range");
}

Envelope mixer_up(const Envelope& s, const MixerParams& m, const BiasSetting& bias, double lo_freq)
{
    validate(m);
    validate(bias);
    require(s.center_freq == 0.0, "mixer_up: input must be IF-referenced (center_freq 0)");
    const cplx b = bias.as_complex();
    Envelope out{s.sample_rate, lo_freq, {}};
    out.samples.reserve(s.size());
    for (const auto& x : s.samples) {
        const cplx xb = x + b;
        out.samples.push_back(m.mu * xb + m.nu * std::conj(xb) + m.leak);
    }
    return out;
}

Envelope mixer_down(const Envelope& w, const MixerParams& m)
{
    validate(m);
    require(w.center_freq > 0.0, "mixer_down: input must be an RF envelope (center_freq = LO)");
    Envelope out{w.sample_rate, 0.0, {}};
    out.samples.reserve(w.size());
    for (const auto& x : w.samples) {
        out.samples.push_back(m.mu * x + m.nu * std::conj(x) + m.leak);
    }
    return out;
}

double excess_noise_density_dbm_hz(double nf_db)
{
    if (nf_db <= 0.0) {
        return kNoNoise;
    }
    const double f = std::pow(10.0, nf_db / 10.0);
    return thermal_floor_dbm_hz() + 10.0 * std::log10(f - 1.0);
}

AmpResult amplify(const Envelope& env, const AmpParams& a, std::optional<std::uint64_t> noise_seed)
{
    validate(a);
    AmpResult res;
    res.env = noise_seed ? add_awgn(env, excess_noise_density_dbm_hz(a.nf_db), *noise_seed) : env;

    const double g = std::pow(10.0, a.gain_db / 20.0);
    const double a3 = a.a3_vpeak();
    const double k = std::isinf(a3) ? 0.0 : g / (a3 * a3);
    const double overdrive = a3 / 2.0;
    for (auto& x : res.env.samples) {
        const double mag = std::abs(x);
        if (mag > overdrive) {
            ++res.overdrive_count;
        }
        x = g * x - k * (mag * mag) * x;
    }
    return res;
}

Envelope attenuate(const Envelope& env, const AttenParams& at)
{
    validate(at);
    const double scale = std::pow(10.0, -at.attenuation_db / 20.0);
    Envelope out = env;
    for (auto& x : out.samples) {
        x *= scale;
    }
    return out;
}

Envelope attenuate_thermal(const Envelope& env, const AttenParams& at, std::uint64_t seed)
{
    // A matched pad at 290 K has NF equal to its loss.
    return attenuate(add_awgn(env, excess_noise_density_dbm_hz(at.attenuation_db), seed), at);
}

std::vector<double> design_lowpass(const FilterParams& f, double sample_rate)
{
    validate(f, sample_rate);
    // Transition centred between the passband edge and the stopband edge
    // (or Nyquist when the stopband edge lies beyond it).
    const double design = std::min(1.15 * f.cutoff, (pass_edge(f) + sample_rate / 2.0) / 2.0);
    const double wc = design / sample_rate; // cycles/sample
    const double beta = kaiser_beta(kFilterAttenDb);
    const double i0_beta = std::cyl_bessel_i(0.0, beta);
    const int n = f.taps;
    const double mid = (n - 1) / 2.0;

    std::vector<double> h(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = k - mid;
        const double sinc = t == 0.0 ? 2.0 * wc : std::sin(kTwoPi * wc * t) / (kPi * t);
        const double r = t / mid;
        const double w = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
        h[static_cast<std::size_t>(k)] = sinc * w;
        sum += h[static_cast<std::size_t>(k)];
    }
    for (auto& v : h) {
        v /= sum;
    }
    return h;
}

Envelope lowpass(const Envelope& env, const FilterParams& f)
{
    const auto h = design_lowpass(f, env.sample_rate);
    Envelope out{env.sample_rate, env.center_freq, std::vector<cplx>(env.size())};
    for (std::size_t k = 0; k < env.size(); ++k) {
        cplx acc{};
        const std::size_t top = std::min(k + 1, h.size());
        for (std::size_t j = 0; j < top; ++j) {
            acc += h[j] * env.samples[k - j];
        }
        out.samples[k] = acc;
    }
    return out;
}

cplx fir_response(const std::vector<double>& taps, double freq, double sample_rate)
{
    cplx acc{};
    for (std::size_t k = 0; k < taps.size(); ++k) {
        acc += taps[k] * std::polar(1.0, -kTwoPi * freq * static_cast<double>(k) / sample_rate);
    }
    return acc;
}

} // namespace rfmix
