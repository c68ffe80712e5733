#include <rfmix/budget.hpp>
#include <rfmix/calibrate.hpp>
#include <rfmix/config.hpp>
#include <rfmix/csv.hpp>
#include <rfmix/error.hpp>
#include <rfmix/metrics.hpp>
#include <rfmix/rbfit.hpp>
#include <rfmix/report.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace rfmix;

namespace {

enum ExitCode : int { kOk = 0, kValidation = 1, kConvergence = 2, kIo = 3 };

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

void write_json(const std::string& path, const Json& j)
{
    write_text_file(path, j.dump(2) + "\n");
}

int cmd_budget(const std::string& config_path, const std::string& out_flag)
{
    const auto cfg = load_config(config_path);
    Json chains = Json::object();
    for (const auto& c : cfg.chains) {
        const auto r = budget_report(c.spec, c.input_dbm);
        chains[c.name] = to_json(r);
        std::cout << c.name << " (" << to_string(c.spec.role) << "): gain " << fmt("%.2f", r.total_gain_db)
                  << " dB, NF " << fmt("%.2f", r.total_nf_db) << " dB, IIP3 " << fmt("%.2f", r.total_iip3_dbm)
                  << " dBm, out " << fmt("%.2f", r.output_dbm) << " dBm at " << fmt("%.1f", r.input_dbm)
                  << " dBm in\n";
        for (const auto& w : r.warnings) {
            std::cout << "  warning: " << w << "\n";
        }
    }
    const std::string out = out_flag.empty() ? cfg.outputs.budget_report : out_flag;
    write_json(out, Json{{"config", config_path}, {"chains", chains}});
    std::cout << "wrote " << out << "\n";
    return kOk;
}

struct ScanOptions {
    std::optional<std::size_t> points;
    std::optional<std::uint64_t> seed;
    std::optional<double> if_freq;
    std::string out;
    std::string report;
};

int cmd_scan(const std::string& config_path, const ScanOptions& opt)
{
    const auto cfg = load_config(config_path);
    require(cfg.loopback.has_value(), config_path + ": scan needs a loopback section");
    LoopbackConfig lb = cfg.loopback->config;
    if (opt.points) lb.n_phase_points = *opt.points;
    if (opt.seed) lb.seed = *opt.seed;
    if (opt.if_freq) lb.if_freq = *opt.if_freq;

    const auto scan = phase_scan(cfg.loopback_up(), cfg.loopback_dn(), lb);
    const auto lin = linearity_report(scan);

    const std::string csv = opt.out.empty() ? cfg.outputs.scan_csv : opt.out;
    const std::string rep = opt.report.empty() ? cfg.outputs.scan_report : opt.report;
    save_scan_csv(csv, scan);

    Json j{{"config", config_path},
           {"points", lb.n_phase_points},
           {"seed", lb.seed},
           {"if_freq_hz", real_json(lb.if_freq)},
           {"linearity", to_json(lin)},
           {"overdrive_count", scan.overdrive_count},
           {"clip_count", scan.clip_count}};
    if (lb.if_freq == 0.0) {
        j["imbalance"] = to_json(estimate_imbalance(scan));
    }
    write_json(rep, j);

    std::cout << "amp linearity   " << fmt("%.6e", lin.amp_linearity) << "\n"
              << "phase linearity " << fmt("%.6e", lin.phase_linearity) << " rad\n";
    if (scan.overdrive_count) std::cout << "warning: " << scan.overdrive_count << " overdriven samples\n";
    if (scan.clip_count) std::cout << "warning: " << scan.clip_count << " clipped samples\n";
    std::cout << "wrote " << csv << ", " << rep << "\n";
    return kOk;
}

const MixerParams& first_mixer(const ChainSpec& chain)
{
    for (const auto& s : chain.stages) {
        if (const auto* m = std::get_if<MixerParams>(&s.params)) {
            return *m;
        }
    }
    throw ValidationError("calibrate: up chain has no mixer");
}

void print_levels(const char* what, double before, double after)
{
    std::cout << what << ": before " << fmt("%.2f", before) << " dBc, after " << fmt("%.2f", after) << " dBc\n";
}

int cmd_calibrate(const std::string& config_path, const std::string& mode, const std::string& scan_path,
                  const std::string& out_flag)
{
    const auto cfg = load_config(config_path);
    const std::string out = out_flag.empty() ? cfg.outputs.settings : out_flag;
    int rc = kOk;
    Settings settings;

    if (mode == "lo-null") {
        const UpConverter up = cfg.calibration_target();
        const double before = measure_lo_leakage(up, up.bias, cfg.probe);
        const auto res = null_lo_blackbox(up, cfg.probe, cfg.optimizer);
        settings = {res.bias, up.predistorter};
        print_levels("LO leakage", before, res.leakage_dbc);
        std::cout << "bias (" << fmt("%.9g", res.bias.b_i) << ", " << fmt("%.9g", res.bias.b_q) << ") V, "
                  << res.evals << " evaluations, " << to_string(res.status) << "\n";
        if (res.status != NullStatus::converged) {
            std::cerr << "error: LO null did not reach " << fmt("%.1f", cfg.optimizer.tol_dbc) << " dBc ("
                      << to_string(res.status) << "); best setting written\n";
            rc = kConvergence;
        }
    } else if (mode == "sideband") {
        const UpConverter up = cfg.calibration_target();
        const auto design = design_predistorter(first_mixer(up.chain));
        const UpConverter fixed{up.chain, up.bias, design.predistorter};
        settings = {up.bias, design.predistorter};
        print_levels("sideband rejection", measure_sideband_rejection(up, cfg.probe),
                     measure_sideband_rejection(fixed, cfg.probe));
    } else {
        require(cfg.loopback.has_value(), config_path + ": from-scan needs a loopback section");
        const UpConverter up = cfg.loopback_up();
        ScanResult scan;
        if (scan_path.empty()) {
            LoopbackConfig lb = cfg.loopback->config;
            lb.if_freq = 0.0;
            scan = phase_scan(up, cfg.loopback_dn(), lb);
        } else {
            scan = load_scan_csv(scan_path);
        }
        const auto cal = calibrate_from_scan(scan, cfg.loopback->config.drive_amplitude, up.bias, up.predistorter,
                                             cfg.optimizer.bias_range);
        settings = {cal.bias, cal.predistorter};
        const auto& e = cal.estimate;
        std::cout << "scan estimate: image " << fmt("%.2f", -e.irr_dbc) << " dBc, carrier "
                  << fmt("%.2f", 20.0 * std::log10(std::abs(e.c_hat) / std::abs(e.mu_hat))) << " dBc\n";
        const UpConverter fixed{up.chain, cal.bias, cal.predistorter};
        print_levels("probe sideband rejection", measure_sideband_rejection(up, cfg.probe),
                     measure_sideband_rejection(fixed, cfg.probe));
        print_levels("probe LO leakage", measure_lo_leakage(up, up.bias, cfg.probe),
                     measure_lo_leakage(fixed, fixed.bias, cfg.probe));
        std::cout << "note: " << cal.note << "\n";
        if (!cal.bias_feasible) {
            std::cerr << "error: bias correction outside the supply range\n";
            rc = kConvergence;
        }
    }

    write_json(out, to_json(settings));
    std::cout << "wrote " << out << "\n";
    return rc;
}

int cmd_rbfit(const std::string& csv_path, int dimension, const std::string& out)
{
    const auto data = load_rb_csv(csv_path, dimension);
    const auto fit = fit_decay(data);
    std::cout << "A " << fmt("%.6f", fit.A) << " +/- " << fmt("%.2e", fit.se_A) << "\n"
              << "p " << fmt("%.8f", fit.p) << " +/- " << fmt("%.2e", fit.se_p) << "\n"
              << "process infidelity " << fmt("%.4e", fit.process_infidelity) << " +/- "
              << fmt("%.2e", fit.se_infidelity) << "\n"
              << "status " << to_string(fit.status) << "\n";
    write_json(out, to_json(fit, data));
    std::cout << "wrote " << out << "\n";
    return fit.status == RbFitStatus::not_converged ? kConvergence : kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Heterodyne mixing-chain bench: budget, loopback scan, calibration, RB fitting"};
    app.require_subcommand(1);

    std::string config, out, scan_path, report, mode = "lo-null";
    ScanOptions so;
    int dimension = 2;

    auto* budget = app.add_subcommand("budget", "Cascade budget report for every chain in the config");
    budget->add_option("config", config, "Configuration file")->required();
    budget->add_option("--out", out, "Report path (JSON)");

    auto* scan = app.add_subcommand("scan", "Loopback drive-phase scan with linearity metrics");
    scan->add_option("config", config, "Configuration file")->required();
    scan->add_option("--points", so.points, "Number of scan points")->check(CLI::Range(8, 1 << 20));
    scan->add_option("--seed", so.seed, "Noise seed");
    scan->add_option("--if-freq", so.if_freq, "Override the IF in Hz (0 gives a DC-drive scan)");
    scan->add_option("--out", so.out, "Scan CSV path");
    scan->add_option("--report", so.report, "Metrics report path (JSON)");

    auto* cal = app.add_subcommand("calibrate", "LO nulling, sideband predistortion or scan-based correction");
    cal->add_option("config", config, "Configuration file")->required();
    cal->add_option("--mode", mode, "lo-null | sideband | from-scan")
        ->check(CLI::IsMember({"lo-null", "sideband", "from-scan"}));
    cal->add_option("--scan", scan_path, "Scan CSV for from-scan (default: simulate a DC-drive scan)");
    cal->add_option("--out", out, "Settings path (JSON)");

    auto* rb = app.add_subcommand("rbfit", "Fit A p^m to randomized-benchmarking survival data");
    std::string rb_csv;
    rb->add_option("data", rb_csv, "CSV with columns m,survival,shots")->required();
    rb->add_option("--dimension", dimension, "Hilbert-space dimension (2 or 4)")->check(CLI::IsMember({2, 4}));
    rb->add_option("--out", out, "Fit report path (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*budget) return cmd_budget(config, out);
        if (*scan) return cmd_scan(config, so);
        if (*cal) {
            require(scan_path.empty() || mode == "from-scan", "--scan only applies to --mode from-scan");
            return cmd_calibrate(config, mode, scan_path, out);
        }
        return cmd_rbfit(rb_csv, dimension, out.empty() ? "rb_report.json" : out);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
}
