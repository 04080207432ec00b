#pragma once

#include <Eigen/Dense>
#include <Eigen/QR>
#include <random>

#include "cmqm/state.hpp"

namespace cmqm::test {

inline MultipartiteState random_state(const std::vector<std::size_t>& dims,
                                      std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    MultipartiteState s;
    s.dims = dims;
    std::size_t d = 1;
    for (std::size_t x : dims) d *= x;
    s.amplitudes.reserve(d);
    double n2 = 0;
    for (std::size_t i = 0; i < d; ++i) {
        cplx a{gauss(rng), gauss(rng)};
        n2 += std::norm(a);
        s.amplitudes.push_back(a);
    }
    double inv = 1.0 / std::sqrt(n2);
    for (cplx& a : s.amplitudes) a *= inv;
    return s;
}

inline Eigen::MatrixXcd random_unitary(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
            g(r, c) = cplx{gauss(rng), gauss(rng)};
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    return qr.householderQ();
}

/// Tensor product of two states, a's parties first.
inline MultipartiteState tensor(const MultipartiteState& a,
                                const MultipartiteState& b) {
    MultipartiteState s;
    s.dims = a.dims;
    s.dims.insert(s.dims.end(), b.dims.begin(), b.dims.end());
    s.amplitudes.reserve(a.amplitudes.size() * b.amplitudes.size());
    for (const cplx& x : a.amplitudes) {
        for (const cplx& y : b.amplitudes) s.amplitudes.push_back(x * y);
    }
    return s;
}

/// Apply a unitary to a single party.
inline MultipartiteState apply_local(const MultipartiteState& s, std::size_t k,
                                     const Eigen::MatrixXcd& u) {
    std::size_t dk = s.dims[k];
    std::size_t inner = 1;
    for (std::size_t q = k + 1; q < s.dims.size(); ++q) inner *= s.dims[q];
    std::size_t outer = s.amplitudes.size() / (dk * inner);
    MultipartiteState out = s;
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
            Eigen::VectorXcd v(dk);
            for (std::size_t a = 0; a < dk; ++a) {
                v[a] = s.amplitudes[(o * dk + a) * inner + i];
            }
            Eigen::VectorXcd w = u * v;
            for (std::size_t a = 0; a < dk; ++a) {
                out.amplitudes[(o * dk + a) * inner + i] = w[a];
            }
        }
    }
    return out;
}

inline double fidelity(const MultipartiteState& a, const MultipartiteState& b) {
    cplx ip{0, 0};
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        ip += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    }
    return std::norm(ip) / (a.norm() * a.norm() * b.norm() * b.norm());
}

}  // namespace cmqm::test
