#include "cmqm/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmqm {

namespace {

double snap(double x, double eps) {
    // eps is a power of two, so the scaling is exact and nearbyint's
    // round-half-to-even lands on the even grid multiple.
    return std::nearbyint(x / eps) * eps;
}

}  // namespace

MultipartiteState discretize(const MultipartiteState& s,
                             const ResolutionParams& res) {
    s.validate();
    if (res.mu > ResolutionParams::max_mu) {
        throw std::domain_error(
            "discretize: mu exceeds the precision supported by double "
            "amplitudes (max " + std::to_string(ResolutionParams::max_mu) + ")");
    }
    double eps = res.epsilon();
    MultipartiteState out = s;
    for (cplx& a : out.amplitudes) {
        a = cplx{snap(a.real(), eps), snap(a.imag(), eps)};
    }
    out.mu = res.mu;
    return out;
}

double hilbert_angle(const MultipartiteState& a, const MultipartiteState& b) {
    if (a.dims != b.dims) {
        throw std::invalid_argument("hilbert_angle: dimension mismatch");
    }
    double na = a.norm();
    double nb = b.norm();
    if (na < 1e-300 || nb < 1e-300) {
        throw std::domain_error("hilbert_angle: zero-norm input");
    }
    cplx overlap{0, 0};
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        overlap += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    }
    double c = std::abs(overlap) / (na * nb);
    return std::acos(std::clamp(c, 0.0, 1.0));
}

bool is_resolvable_pair(const MultipartiteState& a, const MultipartiteState& b,
                        const ResolutionParams& res) {
    return hilbert_angle(a, b) >= res.epsilon();
}

std::size_t effective_dimension(const MultipartiteState& s,
                                const ResolutionParams& res) {
    s.validate();
    double eps = res.epsilon();
    std::size_t count = 0;
    for (const cplx& a : s.amplitudes) {
        if (std::abs(a) >= eps) ++count;
    }
    // For a normalized state count * eps^2 <= ~1 forces count <= 2^mu.
    if (std::abs(s.norm() - 1.0) < 1e-6 && res.mu < 64 &&
        count > (std::size_t{1} << res.mu)) {
        throw std::domain_error(
            "effective_dimension: resolvable count exceeds 2^mu for a "
            "normalized state");
    }
    return count;
}

double algorithmic_information(double dimension, const ResolutionParams& res,
                               InfoKind kind) {
    if (!(dimension >= 1.0)) {
        throw std::invalid_argument("algorithmic_information: dimension < 1");
    }
    double mu = static_cast<double>(res.mu);
    return kind == InfoKind::state ? dimension * mu
                                   : dimension * dimension * mu;
}

}  // namespace cmqm
