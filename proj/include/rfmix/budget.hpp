#pragma once

#include "rfmix/chain.hpp"

#include <string>
#include <vector>

namespace rfmix {

inline constexpr double kCompressionMarginDb = 3.0;

// Small-signal view of one stage. Pads count NF equal to their loss, the
// passive mixer NF equal to its conversion loss, filters are ideal in band.
double stage_gain_db(const BlockParams& p);
double stage_nf_db(const BlockParams& p);
/// Input-referred IIP3; +inf for stages without a nonlinearity.
double stage_iip3_dbm(const BlockParams& p);

double cascade_gain(const ChainSpec& chain);
/// Friis: F = F1 + sum_{k>=2} (F_k - 1) / prod_{j<k} G_j.
double cascade_nf(const ChainSpec& chain);
/// 1 / P = sum_k prod_{j<k} G_j / P_k in linear power units.
double cascade_iip3(const ChainSpec& chain);

struct StageBudget {
    std::string label;
    std::string kind;
    double gain_db = 0.0;
    double nf_db = 0.0;
    double iip3_dbm = 0.0;
    double cum_gain_db = 0.0;
    double cum_nf_db = 0.0;
    double cum_iip3_dbm = 0.0;
    double input_dbm = 0.0;
    double output_dbm = 0.0;
    bool compression_warning = false;
};

struct BudgetReport {
    ChainRole role = ChainRole::DN;
    double input_dbm = 0.0;
    std::vector<StageBudget> stages;
    double total_gain_db = 0.0;
    double total_nf_db = 0.0;
    double total_iip3_dbm = 0.0;
    double output_dbm = 0.0;
    std::vector<std::string> warnings;
};

/// Running levels for a declared input; flags amplifiers driven beyond
/// p1db_in_dbm - margin_db.
BudgetReport budget_report(const ChainSpec& chain, double input_dbm,
                           double margin_db = kCompressionMarginDb);

} // namespace rfmix
