#pragma once

#include <rfmix/loopback.hpp>

#include <limits>

namespace fixture {

using namespace rfmix;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline ChainSpec make_chain(ChainRole role, std::vector<BlockParams> blocks)
{
    ChainSpec c{role, {}, 13.0};
    int i = 0;
    for (auto& b : blocks) {
        c.stages.push_back({"b" + std::to_string(i++), std::move(b)});
    }
    return c;
}

inline UpConverter ideal_up() { return {make_chain(ChainRole::UPL, {MixerParams{}}), {}, {}}; }
inline ChainSpec ideal_dn() { return make_chain(ChainRole::DN, {MixerParams{}}); }

// Same blocks as the shipped example configs.
inline MixerParams hmc_mixer(double phase_deg = 0.0, cplx leak = {})
{
    return MixerParams::from_gain_phase(1.0, phase_deg * 3.14159265358979323846 / 180.0, 9.0, leak);
}
inline AmpParams if_amp() { return {22.0, 1.1, -2.0, 7.5}; }
inline AmpParams rf_amp() { return {20.0, 1.8, -3.0, 12.0}; }

inline ChainSpec dn_example(const MixerParams& m = hmc_mixer())
{
    return make_chain(ChainRole::DN, {m, if_amp(), AttenParams{2.0}, if_amp(), AttenParams{2.0},
                                      FilterParams{300e6, 63}});
}

inline ChainSpec uph_example(const MixerParams& m = hmc_mixer())
{
    return make_chain(ChainRole::UPH, {m, rf_amp(), AttenParams{2.0}, AttenParams{2.0}});
}

inline ChainSpec upl_example(const MixerParams& m = hmc_mixer())
{
    return make_chain(ChainRole::UPL, {m, AttenParams{2.0}, AttenParams{2.0}});
}

inline LoopbackConfig clean_config()
{
    LoopbackConfig c;
    c.quantize = false;
    c.noise_on = false;
    return c;
}

} // namespace fixture
