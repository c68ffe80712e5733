#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rfmix {

struct RbPoint {
    int m = 1;             // sequence length in Clifford gates
    double survival = 1.0; // probability
    long shots = 1;
};

struct RbDataset {
    std::vector<RbPoint> points;
    int dimension = 2; // 2 single-qubit, 4 two-qubit
};

void validate(const RbDataset& data);

enum class RbFitStatus { ok, p_clamped, not_converged };
std::string_view to_string(RbFitStatus s);

struct RbFit {
    double A = 0.0;
    double p = 0.0;
    double process_infidelity = 0.0;
    double se_A = 0.0;            // scaled by the residual variance
    double se_p = 0.0;
    double se_p_binomial = 0.0;   // from the binomial weights alone
    double se_infidelity = 0.0;
    int iterations = 0;
    RbFitStatus status = RbFitStatus::ok;
    std::vector<double> curve;    // A p^m at each input point, input order
};

/// Survival ~ Binomial(shots, A p^m) / shots at each length; `noiseless`
/// returns A p^m exactly.
RbDataset gen_synthetic_rb(double A, double p, std::span<const int> lengths, long shots, std::uint64_t seed,
                           int dimension = 2, bool noiseless = false);

/// Weighted nonlinear least squares of A p^m, started from a log-linear
/// regression. Weights are binomial variances of the starting model with a
/// floor on f (1 - f).
RbFit fit_decay(const RbDataset& data);

/// e = (d^2 - 1)(1 - p) / d^2.
double process_infidelity(double p, int d);
/// Inverse of process_infidelity.
double decay_from_infidelity(double e, int d);

} // namespace rfmix
