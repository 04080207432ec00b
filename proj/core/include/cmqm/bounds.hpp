#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace cmqm {

using bigint = boost::multiprecision::cpp_int;

struct PhysicalConstants {
    double hbar = 1.0;
    double k_b = 1.0;
    static PhysicalConstants natural() { return {1.0, 1.0}; }
    static PhysicalConstants si() { return {1.054571817e-34, 1.380649e-23}; }
};

/// Largest N with 2^N * mu <= total_bits (exact big-integer arithmetic).
/// Returns 0 when even a single qubit does not fit.
unsigned memory_capacity_qubits(const bigint& total_bits, unsigned mu);

/// 2^mu, the largest number factorizable before the register collapses.
bigint shor_max_n(unsigned mu);

/// Spatial granularity L / 2^(mu/3).
double spatial_resolution(double length, unsigned mu);

/// The mu at which 2^mu equals the universe dimension exp(S/k_B):
/// S_over_kB / ln 2 bits. (The source estimate quotes 10^143 for
/// S/k_B = 10^120, which this formula does not reproduce; the formula value
/// is reported as computed.)
double mu_upper_bound_from_entropy(double s_over_kb);

/// Parse a decimal big integer, allowing "NeM" / "N*10^M" shorthand for
/// integer mantissas.
bigint parse_bigint(const std::string& text);

}  // namespace cmqm
