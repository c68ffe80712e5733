#include "rfmix/signal.hpp"

#include "rfmix/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace rfmix {

namespace {

constexpr double kBoltzmann = 1.380649e-23;

// Phase in cycles of sample k for a tone at `ratio` = freq / sample_rate,
// reduced to [0, 1) before the multiply by 2 pi.
double cycles_at(double ratio, std::size_t k)
{
    const double x = static_cast<double>(k) * ratio;
    return x - std::floor(x);
}

} // namespace

double thermal_floor_dbm_hz()
{
    return 10.0 * std::log10(kBoltzmann * 290.0 * 1e3);
}

double QuantizerSpec::lsb() const
{
    const double half_levels = std::ldexp(1.0, bits - 1) - 1.0;
    return full_scale / half_levels;
}

double dbm_to_watts(double p_dbm)
{
    require(std::isfinite(p_dbm), "dbm_to_watts: non-finite power");
    return std::pow(10.0, (p_dbm - 30.0) / 10.0);
}

double watts_to_dbm(double w)
{
    require(std::isfinite(w) && w >= 0.0, "watts_to_dbm: power must be finite and >= 0");
    return 10.0 * std::log10(w) + 30.0;
}

double dbm_to_vpeak(double p_dbm, double z0)
{
    require(std::isfinite(z0) && z0 > 0.0, "dbm_to_vpeak: z0 must be > 0");
    return std::sqrt(2.0 * z0 * dbm_to_watts(p_dbm));
}

double vpeak_to_dbm(double v_peak, double z0)
{
    require(std::isfinite(v_peak), "vpeak_to_dbm: non-finite voltage");
    require(std::isfinite(z0) && z0 > 0.0, "vpeak_to_dbm: z0 must be > 0");
    return watts_to_dbm(v_peak * v_peak / (2.0 * z0));
}

double mean_power_dbm(const Envelope& env, double z0)
{
    require(!env.samples.empty(), "mean_power_dbm: empty envelope");
    double acc = 0.0;
    for (const auto& s : env.samples) {
        acc += std::norm(s);
    }
    return watts_to_dbm(acc / static_cast<double>(env.size()) / (2.0 * z0));
}

void validate(const Envelope& env)
{
    require(std::isfinite(env.sample_rate) && env.sample_rate > 0.0,
            "envelope: sample_rate must be > 0");
    require(std::isfinite(env.center_freq), "envelope: center_freq must be finite");
    require(!env.samples.empty(), "envelope: no samples");
    for (const auto& s : env.samples) {
        require(std::isfinite(s.real()) && std::isfinite(s.imag()), "envelope: non-finite sample");
    }
}

void validate(const QuantizerSpec& q)
{
    require(q.bits >= 2 && q.bits <= 24, "quantizer: bits must be in [2, 24]");
    require(std::isfinite(q.full_scale) && q.full_scale > 0.0, "quantizer: full_scale must be > 0");
}

Envelope synth_tone(const ToneSpec& tone, double sample_rate, std::size_t n)
{
    require(std::isfinite(sample_rate) && sample_rate > 0.0, "synth_tone: sample_rate must be > 0");
    require(n >= 1, "synth_tone: n must be >= 1");
    Envelope env{sample_rate, 0.0, std::vector<cplx>(n, cplx{})};
    add_tone(env, tone);
    return env;
}

void add_tone(Envelope& env, const ToneSpec& tone)
{
    require(std::isfinite(tone.freq) && std::abs(tone.freq) < env.sample_rate / 2.0,
            "tone: |freq| must be below sample_rate / 2");
    require(std::isfinite(tone.amplitude) && tone.amplitude >= 0.0, "tone: amplitude must be >= 0");
    require(std::isfinite(tone.phase), "tone: phase must be finite");
    const double ratio = tone.freq / env.sample_rate;
    for (std::size_t k = 0; k < env.size(); ++k) {
        env.samples[k] += std::polar(tone.amplitude, kTwoPi * cycles_at(ratio, k) + tone.phase);
    }
}

QuantizeResult quantize(const Envelope& env, const QuantizerSpec& q)
{
    validate(q);
    const double step = q.lsb();
    const double top = std::ldexp(1.0, q.bits - 1) - 1.0;

    auto level = [&](double x, bool& clipped) {
        double code = std::round(x / step);
        if (code > top) {
            code = top;
            clipped = true;
        } else if (code < -top) {
            code = -top;
            clipped = true;
        }
        return code * step;
    };

    QuantizeResult out{Envelope{env.sample_rate, env.center_freq, {}}, 0};
    out.env.samples.reserve(env.size());
    for (const auto& s : env.samples) {
        bool clipped = false;
        const double re = level(s.real(), clipped);
        const double im = level(s.imag(), clipped);
        out.env.samples.emplace_back(re, im);
        out.clip_count += clipped ? 1 : 0;
    }
    return out;
}

Envelope add_awgn(const Envelope& env, double noise_density_dbm_hz, std::uint64_t seed, double z0)
{
    if (noise_density_dbm_hz == kNoNoise) {
        return env;
    }
    require(std::isfinite(noise_density_dbm_hz), "add_awgn: density must be finite or kNoNoise");
    const double total_w = dbm_to_watts(noise_density_dbm_hz + 10.0 * std::log10(env.sample_rate));
    const double sigma = std::sqrt(z0 * total_w);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    Envelope out = env;
    for (auto& s : out.samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s += cplx(re, im);
    }
    return out;
}

bool is_integer_period(double freq, double sample_rate, std::size_t n)
{
    const double cycles = freq * static_cast<double>(n) / sample_rate;
    return std::abs(cycles - std::round(cycles)) <= 1e-9 * std::max(1.0, std::abs(cycles));
}

cplx single_bin_dft(const Envelope& env, double freq)
{
    require(!env.samples.empty(), "single_bin_dft: empty envelope");
    require(std::isfinite(freq) && std::abs(freq) < env.sample_rate / 2.0,
            "single_bin_dft: |freq| must be below sample_rate / 2");
    const std::size_t n = env.size();
    require(is_integer_period(freq, env.sample_rate, n),
            "single_bin_dft: record is not an integer number of periods of " + std::to_string(freq) +
                " Hz");

    // Exact index reduction: phase of sample k is 2 pi (cycles * k mod n) / n.
    const auto cycles = static_cast<long long>(std::llround(freq * static_cast<double>(n) / env.sample_rate));
    const auto nn = static_cast<long long>(n);
    const long long c = ((cycles % nn) + nn) % nn;

    cplx acc{};
    long long idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = -kTwoPi * static_cast<double>(idx) / static_cast<double>(n);
        acc += env.samples[k] * cplx(std::cos(angle), std::sin(angle));
        idx += c;
        if (idx >= nn) {
            idx -= nn;
        }
    }
    return acc / static_cast<double>(n);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace rfmix
