#include "rfmix/calibrate.hpp"

#include "rfmix/error.hpp"

#include <cmath>
#include <limits>

namespace rfmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_range(const BiasSetting& b, double range)
{
    return std::abs(b.b_i) <= range && std::abs(b.b_q) <= range;
}

// Solves mu x + nu conj(x) = rhs for complex x.
cplx solve_widely_linear(cplx mu, cplx nu, cplx rhs)
{
    const cplx p = mu + nu;
    const cplx q = cplx(0.0, 1.0) * (mu - nu);
    const double det = p.real() * q.imag() - q.real() * p.imag();
    require(det != 0.0 && std::isfinite(det), "calibrate: singular system (|mu| == |nu|)");
    const double x = (rhs.real() * q.imag() - q.real() * rhs.imag()) / det;
    const double y = (p.real() * rhs.imag() - rhs.real() * p.imag()) / det;
    return {x, y};
}

} // namespace

void validate(const OptimizerConfig& opt)
{
    require(opt.max_evals >= 10, "optimizer: max_evals must be >= 10");
    require(std::isfinite(opt.init_step) && opt.init_step > 0.0, "optimizer: init_step must be > 0");
    require(opt.tol_dbc < -40.0, "optimizer: tol must be below -40 dBc");
    require(std::isfinite(opt.bias_range) && opt.bias_range > 0.0, "optimizer: bias_range must be > 0");
}

std::string_view to_string(NullStatus s)
{
    switch (s) {
    case NullStatus::converged: return "converged";
    case NullStatus::max_evals: return "max_evals";
    case NullStatus::stalled: return "stalled";
    }
    return "?";
}

ClosedFormNull solve_null_closed_form(const MixerParams& m, double range)
{
    validate(m);
    const BiasSetting b = BiasSetting::from_complex(solve_widely_linear(m.mu, m.nu, -m.leak));
    return {b, in_range(b, range)};
}

NullResult null_lo_blackbox(const UpConverter& up, const ProbeConfig& probe, const OptimizerConfig& opt)
{
    validate(opt);
    validate(probe);
    validate(up.chain, probe.sample_rate);

    auto objective = [&](std::span<const double> x) {
        const BiasSetting b{x[0], x[1]};
        if (!in_range(b, opt.bias_range)) {
            return kInf;
        }
        return measure_lo_leakage(up, b, probe);
    };

    SimplexOptions so;
    so.max_evals = opt.max_evals;
    so.init_step = opt.init_step;
    so.f_target = opt.tol_dbc;
    so.seed = opt.seed;
    const auto sr = nelder_mead(objective, {up.bias.b_i, up.bias.b_q}, so);

    NullResult res;
    res.bias = {sr.x[0], sr.x[1]};
    res.leakage_dbc = sr.f;
    res.evals = sr.evals;
    res.restarted = sr.restarted;
    res.trace = sr.trace;
    if (sr.reached_target) {
        res.status = NullStatus::converged;
    } else if (sr.evals >= opt.max_evals) {
        res.status = NullStatus::max_evals;
    } else {
        res.status = NullStatus::stalled;
    }
    return res;
}

PredistorterDesign design_predistorter(const MixerParams& m)
{
    validate(m);
    const Predistorter pd{cplx(1.0, 0.0), -m.nu / m.mu};
    return {pd, m.mu * pd.a + m.nu * std::conj(pd.b)};
}

ScanCalibration calibrate_from_scan(const ScanResult& scan, double drive_amplitude,
                                    const BiasSetting& current_bias, const Predistorter& current_predistorter,
                                    double range)
{
    require(std::isfinite(drive_amplitude) && drive_amplitude > 0.0,
            "calibrate_from_scan: drive_amplitude must be > 0");
    validate(current_predistorter);

    ScanCalibration out;
    out.estimate = estimate_imbalance(scan);
    const auto& est = out.estimate;
    require(std::abs(est.nu_hat) < std::abs(est.mu_hat),
            "calibrate_from_scan: |nu| >= |mu|, scan is not a usable ellipse");

    // Effective (predistorter + mixer) transfer, scaled by the unknown
    // receive gain; strip the active predistorter to get the raw mixer.
    const Predistorter effective{est.mu_hat / drive_amplitude, est.nu_hat / drive_amplitude};
    const Predistorter raw = compose(effective, inverse(current_predistorter));

    out.correction = Predistorter{cplx(1.0, 0.0), -est.nu_hat / est.mu_hat};
    out.predistorter = compose(current_predistorter, out.correction);

    out.bias_delta = BiasSetting::from_complex(solve_widely_linear(raw.a, raw.b, -est.c_hat));
    out.bias = {current_bias.b_i + out.bias_delta.b_i, current_bias.b_q + out.bias_delta.b_q};
    out.bias_feasible = in_range(out.bias, range);

    out.note = "composite up+down imbalance attributed to the up converter";
    if (scan.config && scan.config->if_freq != 0.0) {
        out.note += "; scan taken at nonzero IF, where the accumulator rejects image and carrier, so "
                    "corrections are identity";
    }
    if (!out.bias_feasible) {
        out.note += "; bias outside supply range";
    }
    return out;
}

} // namespace rfmix
