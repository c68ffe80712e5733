#pragma once

#include "rfmix/metrics.hpp"
#include "rfmix/simplex.hpp"

#include <string>
#include <vector>

namespace rfmix {

struct OptimizerConfig {
    int max_evals = 200;
    double init_step = 10e-3; // V
    double tol_dbc = -80.0;   // target leakage
    std::uint64_t seed = 1;
    double bias_range = kDefaultBiasRange;
};

void validate(const OptimizerConfig& opt);

struct ClosedFormNull {
    BiasSetting bias;
    bool feasible = true; // inside the bias supply range
};

/// Solves mu b + nu conj(b) + leak = 0 as a 2x2 real system in (b_i, b_q).
ClosedFormNull solve_null_closed_form(const MixerParams& m, double range = kDefaultBiasRange);

enum class NullStatus { converged, max_evals, stalled };
std::string_view to_string(NullStatus s);

struct NullResult {
    BiasSetting bias;
    double leakage_dbc = 0.0;
    NullStatus status = NullStatus::max_evals;
    int evals = 0;
    bool restarted = false;
    std::vector<SimplexEval> trace; // x = (b_i, b_q), f = leakage dBc
};

/// Derivative-free (simplex) minimization of measured LO leakage over the
/// I/Q bias, starting from up.bias. Settings outside the supply range score
/// +inf. Non-convergence is reported in `status`, never thrown.
NullResult null_lo_blackbox(const UpConverter& up, const ProbeConfig& probe, const OptimizerConfig& opt);

struct PredistorterDesign {
    Predistorter predistorter;
    cplx mu_eff{}; // direct transfer of predistorter followed by the mixer
};

/// a = 1, b = -nu / mu, which zeroes the composite conjugate transfer
/// mu b + nu conj(a).
PredistorterDesign design_predistorter(const MixerParams& m);

struct ScanCalibration {
    IqImbalanceEstimate estimate;
    BiasSetting bias_delta;     // add to the bias the scan was taken with
    Predistorter correction;    // apply ahead of the predistorter in use
    BiasSetting bias;           // updated settings
    Predistorter predistorter;  // compose(current, correction)
    bool bias_feasible = true;
    // A loopback scan measures up and down imbalance together; the whole
    // composite is attributed to the up converter.
    bool attributed_to_up = true;
    std::string note;
};

/// Derives bias and predistortion corrections from a drive-phase scan taken
/// with a DC (if_freq = 0) drive of `drive_amplitude` volts at the mixer
/// input, using the bias and predistorter that were active during the scan.
ScanCalibration calibrate_from_scan(const ScanResult& scan, double drive_amplitude,
                                    const BiasSetting& current_bias = {},
                                    const Predistorter& current_predistorter = {},
                                    double range = kDefaultBiasRange);

} // namespace rfmix
