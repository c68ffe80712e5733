#include "oracles.hpp"

#include <rfmix/blocks.hpp>
#include <rfmix/error.hpp>

#include <doctest.h>

#include <random>

using namespace rfmix;

namespace {

constexpr double kFs = 1e9;
constexpr std::size_t kN = 2000;
constexpr double kIf = 62.5e6; // 125 periods in kN samples

double irr_measured(const MixerParams& m)
{
    const auto rf = mixer_up(synth_tone({kIf, 0.25, 0.3}, kFs, kN), m, {}, 6e9);
    return 20.0 * std::log10(std::abs(single_bin_dft(rf, kIf)) / std::abs(single_bin_dft(rf, -kIf)));
}

} // namespace

TEST_CASE("mixer from gain and phase")
{
    const auto m = MixerParams::from_gain_phase(1.0, 5.12 * oracle::pi / 180.0, 0.0);
    CHECK(std::abs(m.nu / m.mu) == doctest::Approx(std::tan(5.12 * oracle::pi / 360.0)).epsilon(1e-12));
    CHECK(m.image_rejection_db() == doctest::Approx(27.0).epsilon(2e-3));
    const auto lossy = MixerParams::from_gain_phase(1.0, 0.0, 9.0);
    CHECK(lossy.conv_loss_db() == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(std::isinf(lossy.image_rejection_db()));
    CHECK_THROWS_AS(MixerParams::from_gain_phase(0.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(MixerParams::from_gain_phase(1.0, 0.0, -1.0), ValidationError);

    MixerParams leaky{{0.5, 0.0}, {}, {dbm_to_vpeak(13.0 - 51.5), 0.0}};
    CHECK(leaky.lo_to_rf_isolation_db(13.0) == doctest::Approx(51.5).epsilon(1e-12));
}

TEST_CASE("mixer validation")
{
    CHECK_THROWS_AS(validate(MixerParams{{0.5, 0}, {0.5, 0}, {}}), ValidationError);
    CHECK_THROWS_AS(validate(MixerParams{{1.5, 0}, {0.0, 0}, {}}), ValidationError);
    CHECK_THROWS_AS(validate(MixerParams{{std::nan(""), 0}, {0.0, 0}, {}}), ValidationError);
    CHECK_NOTHROW(validate(MixerParams{}));
}

TEST_CASE("ideal up mixer passes only the upper sideband")
{
    const auto rf = mixer_up(synth_tone({kIf, 0.25, 0.0}, kFs, kN), MixerParams{}, {}, 6e9);
    CHECK(rf.center_freq == 6e9);
    CHECK(std::abs(single_bin_dft(rf, kIf) - cplx(0.25, 0.0)) < 1e-12);
    CHECK(std::abs(single_bin_dft(rf, -kIf)) < 1e-15);
    CHECK(std::abs(single_bin_dft(rf, 0.0)) < 1e-15);
}

TEST_CASE("image rejection of the up mixer matches 20 log |mu/nu|")
{
    CHECK(irr_measured(MixerParams{{1, 0}, {0.0447, 0}, {}}) == doctest::Approx(26.993).epsilon(1e-4));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lr(-4.0, std::log10(0.3));
    std::uniform_real_distribution<double> ph(-oracle::pi, oracle::pi);
    std::uniform_real_distribution<double> mag(0.2, 1.0);
    for (int i = 0; i < 50; ++i) {
        const cplx mu = std::polar(mag(rng), ph(rng));
        const cplx nu = mu * std::polar(std::pow(10.0, lr(rng)), ph(rng));
        const MixerParams m{mu, nu, {0.01, -0.02}};
        REQUIRE(std::abs(irr_measured(m) - m.image_rejection_db()) < 0.05);
    }
}

TEST_CASE("carrier bin equals mu b + nu conj(b) + leak")
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const MixerParams m{{0.6 + 0.2 * u(rng), 0.2 * u(rng)}, {0.05 * u(rng), 0.05 * u(rng)}, {0.1 * u(rng), 0.1 * u(rng)}};
        const BiasSetting b{0.5 * u(rng), 0.5 * u(rng)};
        const auto rf = mixer_up(synth_tone({kIf, 0.25, u(rng)}, kFs, kN), m, b, 6e9);
        const cplx want = m.mu * b.as_complex() + m.nu * std::conj(b.as_complex()) + m.leak;
        REQUIRE(std::abs(single_bin_dft(rf, 0.0) - want) <= 1e-9 * std::abs(want));
    }
    // Closed-form null for nu = 0.
    const MixerParams m{{1.0, 0.0}, {}, {0.02, -0.01}};
    const auto b = BiasSetting::from_complex(-m.leak / m.mu);
    const auto rf = mixer_up(synth_tone({kIf, 0.25, 0.0}, kFs, kN), m, b, 6e9);
    CHECK(std::abs(single_bin_dft(rf, 0.0)) < 1e-16);
}

TEST_CASE("down mixer")
{
    const auto rf = synth_tone({kIf, 0.1, 0.7}, kFs, kN);
    Envelope w = rf;
    w.center_freq = 6e9;

    const MixerParams lossy{{0.5, 0.0}, {}, {}};
    const auto ideal = mixer_down(w, lossy);
    CHECK(ideal.center_freq == 0.0);
    CHECK(std::abs(single_bin_dft(ideal, kIf) - 0.5 * std::polar(0.1, 0.7)) < 1e-14);

    const MixerParams imb{{0.5, 0.1}, {0.02, -0.01}, {0.003, 0.004}};
    const auto d = mixer_down(w, imb);
    const double ratio = std::abs(single_bin_dft(d, -kIf)) / std::abs(single_bin_dft(d, kIf));
    CHECK(ratio == doctest::Approx(std::abs(imb.nu) / std::abs(imb.mu)).epsilon(1e-10));
    CHECK(std::abs(single_bin_dft(d, 0.0) - imb.leak) < 1e-15);

    CHECK_THROWS_AS(mixer_down(rf, lossy), ValidationError);
    CHECK_THROWS_AS(mixer_up(w, lossy, {}, 6e9), ValidationError);
}

TEST_CASE("ideal up then down is the identity")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Envelope s{kFs, 0.0, {}};
    for (int i = 0; i < 1000; ++i) {
        s.samples.emplace_back(g(rng), g(rng));
    }
    const auto back = mixer_down(mixer_up(s, {}, {}, 5e9), {});
    CHECK(back.samples == s.samples);
}

TEST_CASE("amplifier small signal gain and compression")
{
    const AmpParams a{20.0, 0.0, 16.0, 25.64};
    const auto in = synth_tone({kIf, dbm_to_vpeak(-60.0), 0.0}, kFs, kN);
    const auto out = amplify(in, a, std::nullopt);
    CHECK(mean_power_dbm(out.env) == doctest::Approx(-40.0).epsilon(0.01 / 40.0));
    CHECK(out.overdrive_count == 0);

    // Linear within 0.01 dB up to iip3 - 40 dB.
    const auto lin = amplify(synth_tone({kIf, dbm_to_vpeak(a.iip3_dbm - 40.0), 0.0}, kFs, kN), a, std::nullopt);
    CHECK(std::abs(mean_power_dbm(lin.env) - (a.iip3_dbm - 40.0 + a.gain_db)) < 0.01);

    // Bisect the 1 dB compression point of a single tone.
    auto gain_drop = [&](double pin) {
        const auto o = amplify(synth_tone({0.0, dbm_to_vpeak(pin), 0.0}, kFs, 4), a, std::nullopt);
        return a.gain_db - (mean_power_dbm(o.env) - pin);
    };
    double lo = a.iip3_dbm - 30.0, hi = a.iip3_dbm - 5.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (gain_drop(mid) < 1.0 ? lo : hi) = mid;
    }
    CHECK(lo - a.iip3_dbm == doctest::Approx(-9.6357).epsilon(1e-4));

    const auto hot = amplify(synth_tone({0.0, 0.6 * a.a3_vpeak(), 0.0}, kFs, 8), a, std::nullopt);
    CHECK(hot.overdrive_count == 8);

    const AmpParams linear{10.0, 0.0, 30.0, std::numeric_limits<double>::infinity()};
    const auto l = amplify(synth_tone({0.0, 10.0, 0.0}, kFs, 4), linear, std::nullopt);
    CHECK(std::abs(l.env.samples[0] - cplx(std::sqrt(10.0) * 10.0, 0.0)) < 1e-12);
    CHECK(l.overdrive_count == 0);

    CHECK_THROWS_AS(amplify(in, AmpParams{20.0, -1.0, 10.0, 20.0}, std::nullopt), ValidationError);
    CHECK_THROWS_AS(amplify(in, AmpParams{20.0, 1.0, 10.0, 5.0}, std::nullopt), ValidationError);
}

TEST_CASE("two-tone IM3 gives the declared IIP3")
{
    const AmpParams a{20.0, 0.0, 11.0, 21.0};
    const std::size_t n = 1000;
    const double f1 = 10e6, f2 = 13e6;
    Envelope x = synth_tone({f1, dbm_to_vpeak(-40.0), 0.0}, kFs, n);
    add_tone(x, {f2, dbm_to_vpeak(-40.0), 0.5});
    const auto y = amplify(x, a, std::nullopt).env;
    const double p_tone = vpeak_to_dbm(std::abs(single_bin_dft(y, f1)));
    const double p_im3 = vpeak_to_dbm(std::abs(single_bin_dft(y, 2 * f1 - f2)));
    const double p_in = -40.0;
    const double iip3 = p_in + (p_tone - p_im3) / 2.0;
    CHECK(std::abs(iip3 - 21.0) < 0.5);
    CHECK(iip3 == doctest::Approx(21.0).epsilon(1e-3));
}

TEST_CASE("amplifier noise figure by Monte Carlo")
{
    for (double nf : {1.1, 1.8, 6.0}) {
        const AmpParams a{20.0, nf, 0.0, 10.0};
        const Envelope zero{kFs, 0.0, std::vector<cplx>(1'000'000)};
        const auto src = add_awgn(zero, thermal_floor_dbm_hz(), 1);
        const auto out = amplify(src, a, std::uint64_t{2});
        const double f = oracle::mean_power_watts(out.env.samples) /
                         (oracle::from_db10(a.gain_db) * oracle::mean_power_watts(src.samples));
        CHECK(std::abs(oracle::db10(f) - nf) < 0.2);
    }
    CHECK(excess_noise_density_dbm_hz(0.0) == kNoNoise);
}

TEST_CASE("attenuators")
{
    const auto x = synth_tone({kIf, 1.0, 0.0}, kFs, 8);
    CHECK(attenuate(x, {0.0}).samples == x.samples);
    CHECK(std::abs(attenuate(x, {20.0}).samples[3] - 0.1 * x.samples[3]) < 1e-15);
    const auto twice = attenuate(attenuate(x, {3.0}), {3.0});
    const auto once = attenuate(x, {6.0});
    CHECK(std::abs(twice.samples[5] - once.samples[5]) < 1e-15);
    CHECK_THROWS_AS(attenuate(x, {-1.0}), ValidationError);

    // Matched pad noise figure equals its loss.
    const Envelope zero{kFs, 0.0, std::vector<cplx>(1'000'000)};
    const auto src = add_awgn(zero, thermal_floor_dbm_hz(), 4);
    const auto out = attenuate_thermal(src, {6.0}, 5);
    const double nf = oracle::db10(oracle::mean_power_watts(out.samples) /
                                   (oracle::from_db10(-6.0) * oracle::mean_power_watts(src.samples)));
    CHECK(std::abs(nf - 6.0) < 0.05);
}

TEST_CASE("lowpass filter contract")
{
    const FilterParams f{300e6, 63};
    const auto h = design_lowpass(f, kFs);
    REQUIRE(h.size() == 63);
    double sum = 0.0;
    for (double v : h) {
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(h[k] == doctest::Approx(h[h.size() - 1 - k]).epsilon(1e-15));
    }

    // Impulse returns the taps.
    Envelope imp{kFs, 0.0, std::vector<cplx>(100)};
    imp.samples[0] = 1.0;
    const auto ir = lowpass(imp, f);
    for (std::size_t k = 0; k < h.size(); ++k) {
        CHECK(ir.samples[k] == cplx(h[k], 0.0));
    }
    CHECK(std::abs(ir.samples[80]) == 0.0);

    // Steady-state tones, measured after the fill-in transient.
    auto gain_db = [&](double freq) {
        const std::size_t n = 4000;
        const auto y = lowpass(synth_tone({freq, 1.0, 0.0}, kFs, n + 62), f);
        Envelope tail{kFs, 0.0, {y.samples.begin() + 62, y.samples.end()}};
        return 20.0 * std::log10(std::abs(single_bin_dft(tail, freq)));
    };
    CHECK(std::abs(gain_db(0.0)) < 0.1);
    for (double fr : {-240e6, -100e6, 50e6, 200e6, 240e6}) {
        CHECK(std::abs(gain_db(fr)) < 0.1);
    }
    for (double fr : {450e6, -450e6, 475e6}) {
        CHECK(gain_db(fr) <= -60.0);
    }

    // Dense response scan against the contract edges.
    for (int i = 0; i <= 400; ++i) {
        const double fr = 0.5 * kFs * i / 400.0;
        const double mag = 20.0 * std::log10(std::abs(fir_response(h, fr, kFs)));
        if (fr <= 0.8 * f.cutoff) {
            REQUIRE(std::abs(mag) < 0.1);
        } else if (fr >= 1.5 * f.cutoff) {
            REQUIRE(mag <= -60.0);
        }
    }

    // A cutoff of 100 MHz at 1 GSPS: tone at 2x cutoff.
    const FilterParams g{100e6, 63};
    const auto hg = design_lowpass(g, kFs);
    CHECK(20.0 * std::log10(std::abs(fir_response(hg, 200e6, kFs))) <= -60.0);
    CHECK(std::abs(20.0 * std::log10(std::abs(fir_response(hg, 80e6, kFs)))) < 0.1);

    CHECK_THROWS_AS(design_lowpass({300e6, 64}, kFs), ValidationError);
    CHECK_THROWS_AS(design_lowpass({600e6, 63}, kFs), ValidationError);
    CHECK_THROWS_AS(design_lowpass({0.0, 63}, kFs), ValidationError);
    CHECK_THROWS_AS(design_lowpass({300e6, 7}, kFs), ValidationError);
}

TEST_CASE("bias range")
{
    CHECK_NOTHROW(validate(BiasSetting{1.8, -1.8}));
    CHECK_THROWS_AS(validate(BiasSetting{1.81, 0.0}), ValidationError);
    CHECK_NOTHROW(validate(BiasSetting{2.5, 0.0}, 3.0));
}
