#pragma once

#include "rfmix/loopback.hpp"
#include "rfmix/rbfit.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace rfmix {

// Column orders:
//   scan: drive_phase_rad,acc_re,acc_im
//   rb:   m,survival,shots
// Reals are written in the shortest form that parses back to the same
// double, so a canonical file reads back and rewrites to identical bytes.

inline constexpr const char* kScanCsvHeader = "drive_phase_rad,acc_re,acc_im";
inline constexpr const char* kRbCsvHeader = "m,survival,shots";

std::string format_double(double x);

void write_scan_csv(std::ostream& os, const ScanResult& scan);
/// Throws ValidationError naming `source` and the offending line.
ScanResult read_scan_csv(std::istream& is, const std::string& source = "<scan>");

void write_rb_csv(std::ostream& os, const RbDataset& data);
/// Dimension is not part of the file; it is taken from `dimension`.
RbDataset read_rb_csv(std::istream& is, int dimension = 2, const std::string& source = "<rb>");

// File variants; failures to open or write throw IoError.
void save_scan_csv(const std::filesystem::path& path, const ScanResult& scan);
ScanResult load_scan_csv(const std::filesystem::path& path);
void save_rb_csv(const std::filesystem::path& path, const RbDataset& data);
RbDataset load_rb_csv(const std::filesystem::path& path, int dimension = 2);

} // namespace rfmix
