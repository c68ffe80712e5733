#pragma once

#include "rfmix/calibrate.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rfmix {

struct NamedChain {
    std::string name;
    ChainSpec spec;
    double input_dbm = -30.0; // drive level used by the budget report
};

struct LoopbackSection {
    std::string up;
    std::string dn;
    LoopbackConfig config;
    BiasSetting bias;
    Predistorter predistorter;
};

struct OutputPaths {
    std::string budget_report = "budget_report.json";
    std::string scan_csv = "scan.csv";
    std::string scan_report = "scan_report.json";
    std::string settings = "settings.json";
    std::string rb_report = "rb_report.json";
};

struct BenchConfig {
    std::string source;
    std::vector<NamedChain> chains; // file order
    std::optional<LoopbackSection> loopback;
    std::optional<std::string> calibrate_up; // chain nulled / predistorted
    ProbeConfig probe;
    OptimizerConfig optimizer;
    OutputPaths outputs;

    const NamedChain& chain(const std::string& name) const;
    /// calibrate_up if set, else the loopback transmit chain, else the only
    /// UP chain. Bias and predistorter come from the loopback section when
    /// it drives the same chain.
    UpConverter calibration_target() const;
    UpConverter loopback_up() const;
    const ChainSpec& loopback_dn() const;
};

/// Parses and fully validates a configuration. Errors carry
/// "<source>:<line>: <key path>: <message>".
BenchConfig parse_config(const std::string& text, const std::string& source = "<config>",
                         const std::filesystem::path& base_dir = {});

/// Relative file references inside the config resolve against its directory.
BenchConfig load_config(const std::filesystem::path& path);

struct Settings {
    BiasSetting bias;
    Predistorter predistorter;
};

Settings parse_settings(const std::string& text, const std::string& source = "<settings>");
Settings load_settings(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace rfmix
