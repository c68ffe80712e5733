#include "rfmix/loopback.hpp"

#include "rfmix/error.hpp"

#include <array>
#include <cmath>
#include <exception>
#include <type_traits>

namespace rfmix {

namespace {

// Sub-seed streams inside one loopback point.
enum : std::uint64_t { kStreamSource = 0, kStreamUp = 1, kStreamPath = 2, kStreamDown = 3 };

void validate_pair(const UpConverter& up, const ChainSpec& dn, double fs)
{
    require(is_up(up.chain.role), "loopback: transmit chain must have an UP role");
    require(!is_up(dn.role), "loopback: receive chain must have the DN role");
    validate(up.chain, fs);
    validate(dn, fs);
    validate(up.predistorter);
}

// Linear bookkeeping for composite_transfer: slot = frequency (+f, -f, DC),
// term = drive-phase dependence (e^{i theta}, e^{-i theta}, constant).
struct Components {
    std::array<std::array<cplx, 3>, 3> v{};

    static constexpr int kPos = 0;
    static constexpr int kNeg = 1;
    static constexpr int kDc = 2;

    static int flip(int i) { return i == kPos ? kNeg : (i == kNeg ? kPos : kDc); }

    Components conj() const
    {
        Components out;
        for (int s = 0; s < 3; ++s) {
            for (int t = 0; t < 3; ++t) {
                out.v[flip(s)][flip(t)] = std::conj(v[s][t]);
            }
        }
        return out;
    }

    void scale(int slot, cplx g)
    {
        for (auto& x : v[slot]) {
            x *= g;
        }
    }

    void widely_linear(cplx a, cplx b)
    {
        const Components c = conj();
        for (int s = 0; s < 3; ++s) {
            for (int t = 0; t < 3; ++t) {
                v[s][t] = a * v[s][t] + b * c.v[s][t];
            }
        }
    }
};

void propagate(Components& x, const ChainSpec& chain, const BiasSetting& bias, double f, double fs)
{
    for (const auto& stage : chain.stages) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, AmpParams>) {
                    const double g = std::pow(10.0, p.gain_db / 20.0);
                    for (int s = 0; s < 3; ++s) x.scale(s, g);
                } else if constexpr (std::is_same_v<T, AttenParams>) {
                    const double g = std::pow(10.0, -p.attenuation_db / 20.0);
                    for (int s = 0; s < 3; ++s) x.scale(s, g);
                } else if constexpr (std::is_same_v<T, FilterParams>) {
                    const auto h = design_lowpass(p, fs);
                    x.scale(Components::kPos, fir_response(h, f, fs));
                    x.scale(Components::kNeg, fir_response(h, -f, fs));
                    x.scale(Components::kDc, fir_response(h, 0.0, fs));
                } else {
                    if (is_up(chain.role)) {
                        x.v[Components::kDc][Components::kDc] += bias.as_complex();
                    }
                    x.widely_linear(p.mu, p.nu);
                    x.v[Components::kDc][Components::kDc] += p.leak;
                }
            },
            stage.params);
    }
}

std::size_t filter_delay(const ChainSpec& chain)
{
    std::size_t n = 0;
    for (const auto& s : chain.stages) {
        if (const auto* f = std::get_if<FilterParams>(&s.params)) {
            n += static_cast<std::size_t>(f->taps - 1);
        }
    }
    return n;
}

template <bool Parallel>
ScanResult scan_impl(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg)
{
    validate(cfg);
    validate_pair(up, dn, cfg.sample_rate);

    const std::size_t n = cfg.n_phase_points;
    ScanResult out;
    out.config = cfg;
    out.drive_phases.resize(n);
    out.accumulated.resize(n);
    std::vector<LoopbackResult> points(n);
    std::vector<std::exception_ptr> errors(n);

    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (Parallel)
    for (long long j = 0; j < count; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        try {
            LoopbackConfig point = cfg;
            point.seed = mix_seed(cfg.seed, idx);
            const double theta = kTwoPi * static_cast<double>(idx) / static_cast<double>(n);
            out.drive_phases[idx] = theta;
            points[idx] = run_loopback(up, dn, point, theta);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (errors[j]) {
            std::rethrow_exception(errors[j]);
        }
        out.accumulated[j] = points[j].accumulated;
        out.overdrive_count += points[j].overdrive_count;
        out.clip_count += points[j].dac_clips + points[j].adc_clips;
    }
    return out;
}

} // namespace

void validate(const LoopbackConfig& cfg)
{
    require(std::isfinite(cfg.sample_rate) && cfg.sample_rate > 0.0, "loopback: sample_rate must be > 0");
    require(std::isfinite(cfg.if_freq) && cfg.if_freq >= 0.0 && cfg.if_freq <= kMaxIfHz,
            "loopback: if_freq must lie in [0, 500 MHz]");
    require(cfg.if_freq < cfg.sample_rate / 2.0, "loopback: if_freq must be below sample_rate / 2");
    require(cfg.lo_freq >= kMinLoHz && cfg.lo_freq <= kMaxLoHz, "loopback: lo_freq must lie in [2.5, 8.5] GHz");
    validate(cfg.dac);
    validate(cfg.adc);
    require(std::isfinite(cfg.drive_amplitude) && cfg.drive_amplitude >= 0.0,
            "loopback: drive_amplitude must be >= 0");
    require(cfg.accum_len >= 1, "loopback: accum_len must be >= 1");
    require(is_integer_period(cfg.if_freq, cfg.sample_rate, cfg.accum_len),
            "loopback: accum_len * if_freq / sample_rate must be an integer");
    require(std::isfinite(cfg.rf_path_atten_db) && cfg.rf_path_atten_db >= 0.0,
            "loopback: rf_path_atten_db must be >= 0");
    require(cfg.n_phase_points >= 8, "loopback: n_phase_points must be >= 8");
}

std::size_t warmup_samples(const UpConverter& up, const ChainSpec& dn)
{
    return filter_delay(up.chain) + filter_delay(dn);
}

LoopbackResult run_loopback(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg,
                            double drive_phase)
{
    validate(cfg);
    require(std::isfinite(drive_phase), "loopback: drive_phase must be finite");
    const double fs = cfg.sample_rate;
    validate_pair(up, dn, fs);
    const std::size_t warm = warmup_samples(up, dn);
    const std::size_t total = warm + cfg.accum_len;

    LoopbackResult res;
    Envelope tx = up.predistorter.apply(synth_tone({cfg.if_freq, cfg.drive_amplitude, drive_phase}, fs, total));
    if (cfg.quantize) {
        auto q = quantize(tx, cfg.dac);
        tx = std::move(q.env);
        res.dac_clips = q.clip_count;
    }
    if (cfg.noise_on) {
        tx = add_awgn(tx, thermal_floor_dbm_hz(), mix_seed(cfg.seed, kStreamSource));
    }

    auto up_out = run_chain(tx, up.chain, {cfg.noise_on, mix_seed(cfg.seed, kStreamUp), up.bias, cfg.lo_freq});
    const AttenParams path{cfg.rf_path_atten_db};
    Envelope rf = cfg.noise_on ? attenuate_thermal(up_out.env, path, mix_seed(cfg.seed, kStreamPath))
                               : attenuate(up_out.env, path);
    auto dn_out = run_chain(rf, dn, {cfg.noise_on, mix_seed(cfg.seed, kStreamDown), {}, cfg.lo_freq});
    res.overdrive_count = up_out.overdrive_count + dn_out.overdrive_count;

    Envelope rx = std::move(dn_out.env);
    if (cfg.quantize) {
        auto q = quantize(rx, cfg.adc);
        rx = std::move(q.env);
        res.adc_clips = q.clip_count;
    }

    // Digital LO: the IF completes `cycles` periods in accum_len samples, so
    // the phase of sample k reduces exactly to (cycles * k mod accum_len).
    const auto len = static_cast<long long>(cfg.accum_len);
    const auto cycles = static_cast<long long>(std::llround(cfg.if_freq * static_cast<double>(len) / fs)) % len;
    const double inv_lsb = 1.0 / cfg.adc.lsb();
    cplx acc{};
    for (std::size_t k = warm; k < total; ++k) {
        const long long idx = (cycles * static_cast<long long>(k % cfg.accum_len)) % len;
        const double angle = -kTwoPi * static_cast<double>(idx) / static_cast<double>(len);
        acc += rx.samples[k] * cplx(std::cos(angle), std::sin(angle));
    }
    res.accumulated = acc * inv_lsb;
    return res;
}

ScanResult phase_scan(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg)
{
    return scan_impl<true>(up, dn, cfg);
}

ScanResult phase_scan_serial(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg)
{
    return scan_impl<false>(up, dn, cfg);
}

CompositeTransfer composite_transfer(const UpConverter& up, const ChainSpec& dn, const LoopbackConfig& cfg)
{
    validate(cfg);
    validate_pair(up, dn, cfg.sample_rate);
    const double f = cfg.if_freq;
    const double fs = cfg.sample_rate;

    Components x;
    x.v[Components::kPos][Components::kPos] = cfg.drive_amplitude;
    x.widely_linear(up.predistorter.a, up.predistorter.b);
    propagate(x, up.chain, up.bias, f, fs);
    const double path = std::pow(10.0, -cfg.rf_path_atten_db / 20.0);
    for (int s = 0; s < 3; ++s) {
        x.scale(s, path);
    }
    propagate(x, dn, {}, f, fs);

    std::array<cplx, 3> terms{};
    for (int s = 0; s < 3; ++s) {
        if (f == 0.0 || s == Components::kPos) {
            for (int t = 0; t < 3; ++t) {
                terms[static_cast<std::size_t>(t)] += x.v[s][t];
            }
        }
    }
    const double k = static_cast<double>(cfg.accum_len) / cfg.adc.lsb();
    return {k * terms[0], k * terms[1], k * terms[2]};
}

ScanResult ellipse_scan(std::size_t n, cplx mu, cplx nu, cplx c)
{
    require(n >= 1, "ellipse_scan: n must be >= 1");
    ScanResult out;
    out.drive_phases.resize(n);
    out.accumulated.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double theta = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        out.drive_phases[j] = theta;
        out.accumulated[j] = mu * std::polar(1.0, theta) + nu * std::polar(1.0, -theta) + c;
    }
    return out;
}

} // namespace rfmix
