#include "rfmix/chain.hpp"

#include "rfmix/error.hpp"

#include <cmath>
#include <type_traits>

namespace rfmix {

std::string_view to_string(ChainRole role)
{
    switch (role) {
    case ChainRole::UPH: return "UPH";
    case ChainRole::UPL: return "UPL";
    case ChainRole::DN: return "DN";
    }
    return "?";
}

std::optional<ChainRole> parse_role(std::string_view text)
{
    if (text == "UPH") return ChainRole::UPH;
    if (text == "UPL") return ChainRole::UPL;
    if (text == "DN") return ChainRole::DN;
    return std::nullopt;
}

std::size_t mixer_index(const ChainSpec& chain)
{
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        if (std::holds_alternative<MixerParams>(chain.stages[i].params)) {
            require(!found, "chain: more than one mixer");
            found = i;
        }
    }
    require(found.has_value(), "chain: no mixer");
    return *found;
}

const MixerParams& chain_mixer(const ChainSpec& chain)
{
    return std::get<MixerParams>(chain.stages[mixer_index(chain)].params);
}

void validate(const ChainSpec& chain, double sample_rate)
{
    require(!chain.stages.empty(), "chain: no stages");
    require(std::isfinite(chain.lo_drive_dbm), "chain: lo_drive_dbm must be finite");
    const std::size_t mix = mixer_index(chain);
    bool rf_amp = false;
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, FilterParams>) {
                    validate(p, sample_rate);
                } else {
                    validate(p);
                }
                if constexpr (std::is_same_v<T, AmpParams>) {
                    rf_amp = rf_amp || i > mix;
                }
            },
            chain.stages[i].params);
    }
    if (chain.role == ChainRole::UPH) {
        require(rf_amp, "chain: UPH needs an amplifier in the RF channel");
    } else if (chain.role == ChainRole::UPL) {
        require(!rf_amp, "chain: UPL has no amplifier in the RF channel");
    }
}

ChainRunResult run_chain(const Envelope& in, const ChainSpec& chain, const ChainRunOptions& opt)
{
    ChainRunResult res{in, 0};
    for (std::size_t i = 0; i < chain.stages.size(); ++i) {
        const std::uint64_t seed = mix_seed(opt.seed, i);
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, AmpParams>) {
                    auto r = amplify(res.env, p, opt.noise ? std::optional(seed) : std::nullopt);
                    res.env = std::move(r.env);
                    res.overdrive_count += r.overdrive_count;
                } else if constexpr (std::is_same_v<T, AttenParams>) {
                    res.env = opt.noise ? attenuate_thermal(res.env, p, seed) : attenuate(res.env, p);
                } else if constexpr (std::is_same_v<T, FilterParams>) {
                    res.env = lowpass(res.env, p);
                } else {
                    if (opt.noise) {
                        res.env = add_awgn(res.env, excess_noise_density_dbm_hz(p.conv_loss_db()), seed);
                    }
                    res.env = is_up(chain.role) ? mixer_up(res.env, p, opt.bias, opt.lo_freq)
                                                : mixer_down(res.env, p);
                }
            },
            chain.stages[i].params);
    }
    return res;
}

} // namespace rfmix
