#include "rfmix/csv.hpp"

#include "rfmix/error.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace rfmix {

namespace {

std::string where(const std::string& source, std::size_t line)
{
    return source + ":" + std::to_string(line) + ": ";
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_real(const std::string& cell, const std::string& at, const char* column)
{
    if (cell.empty()) {
        throw ValidationError(at + "empty " + column);
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE) {
        throw ValidationError(at + "cannot parse " + column + " '" + cell + "'");
    }
    if (!std::isfinite(v)) {
        throw ValidationError(at + column + " must be finite");
    }
    return v;
}

long long parse_int(const std::string& cell, const std::string& at, const char* column)
{
    if (cell.empty()) {
        throw ValidationError(at + "empty " + column);
    }
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(cell.c_str(), &end, 10);
    if (end != cell.c_str() + cell.size() || errno == ERANGE) {
        throw ValidationError(at + "cannot parse integer " + column + " '" + cell + "'");
    }
    return v;
}

// Reads the header and data rows, stripping a trailing CR. Blank lines are
// only allowed at the end of the file.
template <typename Row>
void read_rows(std::istream& is, const std::string& source, const char* header, std::size_t columns, Row row)
{
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::size_t blank_at = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            if (blank_at == 0) {
                blank_at = lineno;
            }
            continue;
        }
        if (blank_at != 0) {
            throw ValidationError(where(source, blank_at) + "blank line inside data");
        }
        if (!have_header) {
            if (line != header) {
                throw ValidationError(where(source, lineno) + "expected header '" + header + "'");
            }
            have_header = true;
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != columns) {
            throw ValidationError(where(source, lineno) + "expected " + std::to_string(columns) + " columns, got " +
                                  std::to_string(cells.size()));
        }
        row(cells, where(source, lineno));
    }
    if (!have_header) {
        throw ValidationError(where(source, lineno == 0 ? 1 : lineno) + "missing header '" + header + "'");
    }
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return os;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return is;
}

void finish(std::ofstream& os, const std::filesystem::path& path)
{
    os.flush();
    if (!os) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

} // namespace

std::string format_double(double x)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

void write_scan_csv(std::ostream& os, const ScanResult& scan)
{
    require(scan.drive_phases.size() == scan.accumulated.size(), "scan: phase and value counts differ");
    os << kScanCsvHeader << '\n';
    for (std::size_t j = 0; j < scan.size(); ++j) {
        os << format_double(scan.drive_phases[j]) << ',' << format_double(scan.accumulated[j].real()) << ','
           << format_double(scan.accumulated[j].imag()) << '\n';
    }
}

ScanResult read_scan_csv(std::istream& is, const std::string& source)
{
    ScanResult scan;
    read_rows(is, source, kScanCsvHeader, 3, [&](const std::vector<std::string>& c, const std::string& at) {
        scan.drive_phases.push_back(parse_real(c[0], at, "drive_phase_rad"));
        scan.accumulated.emplace_back(parse_real(c[1], at, "acc_re"), parse_real(c[2], at, "acc_im"));
    });
    return scan;
}

void write_rb_csv(std::ostream& os, const RbDataset& data)
{
    os << kRbCsvHeader << '\n';
    for (const auto& p : data.points) {
        os << p.m << ',' << format_double(p.survival) << ',' << p.shots << '\n';
    }
}

RbDataset read_rb_csv(std::istream& is, int dimension, const std::string& source)
{
    RbDataset data;
    data.dimension = dimension;
    read_rows(is, source, kRbCsvHeader, 3, [&](const std::vector<std::string>& c, const std::string& at) {
        const long long m = parse_int(c[0], at, "m");
        if (m < 1 || m > 1'000'000'000) {
            throw ValidationError(at + "m must be a positive integer");
        }
        const double s = parse_real(c[1], at, "survival");
        if (s < 0.0 || s > 1.0) {
            throw ValidationError(at + "survival must lie in [0, 1]");
        }
        const long long shots = parse_int(c[2], at, "shots");
        if (shots < 1) {
            throw ValidationError(at + "shots must be >= 1");
        }
        data.points.push_back({static_cast<int>(m), s, static_cast<long>(shots)});
    });
    return data;
}

void save_scan_csv(const std::filesystem::path& path, const ScanResult& scan)
{
    auto os = open_out(path);
    write_scan_csv(os, scan);
    finish(os, path);
}

ScanResult load_scan_csv(const std::filesystem::path& path)
{
    auto is = open_in(path);
    return read_scan_csv(is, path.string());
}

void save_rb_csv(const std::filesystem::path& path, const RbDataset& data)
{
    auto os = open_out(path);
    write_rb_csv(os, data);
    finish(os, path);
}

RbDataset load_rb_csv(const std::filesystem::path& path, int dimension)
{
    auto is = open_in(path);
    return read_rb_csv(is, dimension, path.string());
}

} // namespace rfmix
