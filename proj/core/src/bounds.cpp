#include "cmqm/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace cmqm {

unsigned memory_capacity_qubits(const bigint& total_bits, unsigned mu) {
    if (total_bits <= 0) {
        throw std::invalid_argument("memory_capacity_qubits: total_bits must be > 0");
    }
    if (mu == 0) {
        throw std::invalid_argument("memory_capacity_qubits: mu must be > 0");
    }
    bigint budget = total_bits / mu;  // largest 2^N fitting the amplitude budget
    if (budget < 1) return 0;
    unsigned n = 0;
    bigint pow = 1;
    while (pow * 2 <= budget) {
        pow *= 2;
        ++n;
    }
    return n;
}

bigint shor_max_n(unsigned mu) {
    if (mu == 0) {
        throw std::invalid_argument("shor_max_n: mu must be >= 1");
    }
    return bigint(1) << mu;
}

double spatial_resolution(double length, unsigned mu) {
    if (!(length > 0)) {
        throw std::invalid_argument("spatial_resolution: length must be > 0");
    }
    return length / std::exp2(static_cast<double>(mu) / 3.0);
}

double mu_upper_bound_from_entropy(double s_over_kb) {
    if (!(s_over_kb > 0)) {
        throw std::invalid_argument(
            "mu_upper_bound_from_entropy: entropy must be > 0");
    }
    return s_over_kb / std::log(2.0);
}

bigint parse_bigint(const std::string& text) {
    auto fail = [&] {
        throw std::invalid_argument("parse_bigint: cannot parse '" + text + "'");
    };
    if (text.empty()) fail();
    std::size_t epos = text.find_first_of("eE");
    std::string mantissa = text;
    unsigned long exponent = 0;
    if (epos != std::string::npos) {
        mantissa = text.substr(0, epos);
        try {
            exponent = std::stoul(text.substr(epos + 1));
        } catch (const std::exception&) {
            fail();
        }
    } else if (std::size_t cpos = text.find("*10^"); cpos != std::string::npos) {
        mantissa = text.substr(0, cpos);
        try {
            exponent = std::stoul(text.substr(cpos + 4));
        } catch (const std::exception&) {
            fail();
        }
    }
    bigint value;
    try {
        value = bigint(mantissa);
    } catch (const std::exception&) {
        fail();
    }
    for (unsigned long i = 0; i < exponent; ++i) value *= 10;
    return value;
}

}  // namespace cmqm
