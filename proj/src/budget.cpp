#include "rfmix/budget.hpp"

#include <cmath>
#include <limits>
#include <type_traits>

namespace rfmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double lin(double db) { return std::pow(10.0, db / 10.0); }
double db(double x) { return 10.0 * std::log10(x); }

std::string kind_of(const BlockParams& p)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, AmpParams>) return "amp";
            else if constexpr (std::is_same_v<T, AttenParams>) return "atten";
            else if constexpr (std::is_same_v<T, MixerParams>) return "mixer";
            else return "lowpass";
        },
        p);
}

// Cumulative gain / noise factor / inverse intercept, walked stage by stage.
struct Running {
    double gain = 1.0;
    double factor = 1.0;
    double inv_ip3 = 0.0;
    bool first = true;

    void push(const BlockParams& p)
    {
        const double f = lin(stage_nf_db(p));
        const double ip3 = stage_iip3_dbm(p);
        if (first) {
            factor = f;
            first = false;
        } else {
            factor += (f - 1.0) / gain;
        }
        if (!std::isinf(ip3)) {
            inv_ip3 += gain / lin(ip3);
        }
        gain *= lin(stage_gain_db(p));
    }

    double iip3_dbm() const { return inv_ip3 == 0.0 ? kInf : -db(inv_ip3); }
};

} // namespace

double stage_gain_db(const BlockParams& p)
{
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, AmpParams>) return v.gain_db;
            else if constexpr (std::is_same_v<T, AttenParams>) return -v.attenuation_db;
            else if constexpr (std::is_same_v<T, MixerParams>) return -v.conv_loss_db();
            else return 0.0;
        },
        p);
}

double stage_nf_db(const BlockParams& p)
{
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, AmpParams>) return v.nf_db;
            else if constexpr (std::is_same_v<T, AttenParams>) return v.attenuation_db;
            else if constexpr (std::is_same_v<T, MixerParams>) return std::max(0.0, v.conv_loss_db());
            else return 0.0;
        },
        p);
}

double stage_iip3_dbm(const BlockParams& p)
{
    if (const auto* a = std::get_if<AmpParams>(&p)) {
        return a->iip3_dbm;
    }
    return kInf;
}

double cascade_gain(const ChainSpec& chain)
{
    double total = 0.0;
    for (const auto& s : chain.stages) {
        total += stage_gain_db(s.params);
    }
    return total;
}

double cascade_nf(const ChainSpec& chain)
{
    Running r;
    for (const auto& s : chain.stages) {
        r.push(s.params);
    }
    return db(r.factor);
}

double cascade_iip3(const ChainSpec& chain)
{
    Running r;
    for (const auto& s : chain.stages) {
        r.push(s.params);
    }
    return r.iip3_dbm();
}

BudgetReport budget_report(const ChainSpec& chain, double input_dbm, double margin_db)
{
    BudgetReport rep;
    rep.role = chain.role;
    rep.input_dbm = input_dbm;

    Running r;
    double gain_db = 0.0;
    double level = input_dbm;
    for (const auto& s : chain.stages) {
        StageBudget sb;
        sb.label = s.label;
        sb.kind = kind_of(s.params);
        sb.gain_db = stage_gain_db(s.params);
        sb.nf_db = stage_nf_db(s.params);
        sb.iip3_dbm = stage_iip3_dbm(s.params);
        sb.input_dbm = level;

        r.push(s.params);
        gain_db += sb.gain_db;
        level = input_dbm + gain_db;

        sb.cum_gain_db = gain_db;
        sb.cum_nf_db = db(r.factor);
        sb.cum_iip3_dbm = r.iip3_dbm();
        sb.output_dbm = level;
        if (const auto* a = std::get_if<AmpParams>(&s.params)) {
            if (sb.input_dbm > a->p1db_in_dbm - margin_db) {
                sb.compression_warning = true;
                rep.warnings.push_back(s.label + ": input " + std::to_string(sb.input_dbm) +
                                       " dBm exceeds P1dB - " + std::to_string(margin_db) + " dB");
            }
        }
        rep.stages.push_back(std::move(sb));
    }
    rep.total_gain_db = gain_db;
    rep.total_nf_db = db(r.factor);
    rep.total_iip3_dbm = r.iip3_dbm();
    rep.output_dbm = level;
    return rep;
}

} // namespace rfmix
