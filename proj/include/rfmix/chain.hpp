#pragma once

#include "rfmix/blocks.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rfmix {

enum class ChainRole { UPH, UPL, DN };

std::string_view to_string(ChainRole role);
std::optional<ChainRole> parse_role(std::string_view text);
inline bool is_up(ChainRole role) { return role != ChainRole::DN; }

using BlockParams = std::variant<AmpParams, AttenParams, MixerParams, FilterParams>;

struct Stage {
    std::string label;
    BlockParams params;
};

/// Ordered analog blocks of one converter module.
struct ChainSpec {
    ChainRole role = ChainRole::DN;
    std::vector<Stage> stages;
    double lo_drive_dbm = 0.0;
};

/// Checks the module-level rules: exactly one mixer, UPH carries an
/// amplifier after the mixer and UPL does not, every block valid.
void validate(const ChainSpec& chain, double sample_rate);

/// Index of the single mixer stage; throws if there is not exactly one.
std::size_t mixer_index(const ChainSpec& chain);
const MixerParams& chain_mixer(const ChainSpec& chain);

struct ChainRunOptions {
    bool noise = false;
    std::uint64_t seed = 0;
    BiasSetting bias{};  // applied at the mixer input of up chains
    double lo_freq = 0.0; // center of the RF side
};

struct ChainRunResult {
    Envelope env;
    std::size_t overdrive_count = 0;
};

/// Time-domain pass through every stage in order. With noise enabled each
/// stage contributes its own input-referred excess noise (amplifiers
/// kT (F - 1), pads and the passive mixer kT (L - 1)); stage i draws from
/// the stream mix_seed(seed, i).
ChainRunResult run_chain(const Envelope& in, const ChainSpec& chain, const ChainRunOptions& opt);

} // namespace rfmix
