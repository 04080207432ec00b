#pragma once

// Brute-force reference implementations used to cross-check the library.
// Everything here goes through the dense outer product |psi><psi| and
// explicit index loops, deliberately avoiding the library's reduced-density
// and island code paths.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

#include "cmqm/state.hpp"

namespace cmqm::oracle {

inline std::vector<std::size_t> digits_of(std::size_t g,
                                          const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> d(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        d[k] = g % dims[k];
        g /= dims[k];
    }
    return d;
}

/// rho_keep = Tr_traced(|psi><psi|), keep[k] true for kept parties.
inline Eigen::MatrixXcd brute_reduced(const MultipartiteState& s,
                                      const std::vector<bool>& keep) {
    std::size_t dim = s.dimension();
    Eigen::Map<const Eigen::VectorXcd> v(s.amplitudes.data(),
                                         static_cast<Eigen::Index>(dim));
    Eigen::MatrixXcd full = v * v.adjoint();

    std::size_t keep_dim = 1;
    for (std::size_t k = 0; k < s.dims.size(); ++k) {
        if (keep[k]) keep_dim *= s.dims[k];
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(keep_dim), static_cast<Eigen::Index>(keep_dim));

    auto keep_index = [&](std::size_t g) {
        std::vector<std::size_t> d = digits_of(g, s.dims);
        std::size_t idx = 0;
        for (std::size_t k = 0; k < s.dims.size(); ++k) {
            if (keep[k]) idx = idx * s.dims[k] + d[k];
        }
        return idx;
    };
    auto traced_index = [&](std::size_t g) {
        std::vector<std::size_t> d = digits_of(g, s.dims);
        std::size_t idx = 0;
        for (std::size_t k = 0; k < s.dims.size(); ++k) {
            if (!keep[k]) idx = idx * s.dims[k] + d[k];
        }
        return idx;
    };

    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if (traced_index(r) == traced_index(c)) {
                rho(static_cast<Eigen::Index>(keep_index(r)),
                    static_cast<Eigen::Index>(keep_index(c))) += full(
                    static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
    }
    return rho;
}

inline double brute_entropy(const Eigen::MatrixXcd& rho, double floor = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                       Eigen::EigenvaluesOnly);
    double h = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double lam = es.eigenvalues()[i];
        if (lam > floor) h -= lam * std::log2(lam);
    }
    return h;
}

inline double brute_lambda_plus(const MultipartiteState& s,
                                const std::vector<bool>& keep) {
    Eigen::MatrixXcd rho = brute_reduced(s, keep);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                       Eigen::EigenvaluesOnly);
    Eigen::Index n = es.eigenvalues().size();
    if (n < 2) return 0.0;
    return std::max(0.0, es.eigenvalues()[n - 2]);
}

/// All-subsets evaluation of the monotone: sum of single-party marginal
/// entropies, gated on every proper subset having nonzero entropy.
inline double brute_xi(const MultipartiteState& s, double floor = 1e-12) {
    std::size_t n = s.dims.size();
    std::size_t full = std::size_t{1} << n;
    for (std::size_t bits = 1; bits + 1 < full; ++bits) {
        std::vector<bool> keep(n);
        for (std::size_t k = 0; k < n; ++k) keep[k] = (bits >> k) & 1u;
        if (brute_entropy(brute_reduced(s, keep), floor) <= floor) return 0.0;
    }
    double total = 0;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<bool> keep(n, false);
        keep[k] = true;
        total += brute_entropy(brute_reduced(s, keep), floor);
    }
    return total;
}

namespace detail {

/// Pure state of a party block, extracted as the top eigenvector of the
/// block's reduced density (valid when the block is product with its
/// complement up to sub-resolution terms).
inline MultipartiteState block_state(const MultipartiteState& s,
                                     const std::vector<bool>& keep) {
    Eigen::MatrixXcd rho = brute_reduced(s, keep);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    Eigen::Index top = rho.rows() - 1;  // ascending order
    MultipartiteState out;
    for (std::size_t k = 0; k < s.dims.size(); ++k) {
        if (keep[k]) out.dims.push_back(s.dims[k]);
    }
    out.amplitudes.resize(static_cast<std::size_t>(rho.rows()));
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        out.amplitudes[static_cast<std::size_t>(i)] = es.eigenvectors()(i, top);
    }
    return out;
}

/// Recursive split of one block. parties holds the global indices of the
/// block. Cut order is this oracle's own (size, then mask value); the
/// resulting partition is order-independent because a product structure is
/// unique, so any valid split sequence reaches the same blocks.
inline void brute_split(const MultipartiteState& block,
                        const std::vector<std::size_t>& parties, double eps,
                        std::vector<std::vector<std::size_t>>& out) {
    std::size_t n = parties.size();
    if (n == 1) {
        out.push_back(parties);
        return;
    }
    std::vector<std::size_t> masks;
    for (std::size_t bits = 1; bits + 1 < (std::size_t{1} << n); ++bits) {
        masks.push_back(bits);
    }
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::size_t a, std::size_t b) {
                         int ca = __builtin_popcountll(a);
                         int cb = __builtin_popcountll(b);
                         if (ca != cb) return ca < cb;
                         return a < b;
                     });
    for (std::size_t bits : masks) {
        if (!((bits >> 0) & 1u)) continue;  // canonical side holds party 0
        std::vector<bool> keep(n);
        for (std::size_t k = 0; k < n; ++k) keep[k] = (bits >> k) & 1u;
        if (brute_lambda_plus(block, keep) < eps) {
            std::vector<bool> rest(n);
            for (std::size_t k = 0; k < n; ++k) rest[k] = !keep[k];
            std::vector<std::size_t> left, right;
            for (std::size_t k = 0; k < n; ++k) {
                (keep[k] ? left : right).push_back(parties[k]);
            }
            brute_split(block_state(block, keep), left, eps, out);
            brute_split(block_state(block, rest), right, eps, out);
            return;
        }
    }
    out.push_back(parties);
}

}  // namespace detail

/// Island partition via recursive bipartition splitting, with block states
/// re-extracted from reduced densities rather than the library's Schmidt
/// projection.
inline std::vector<std::vector<std::size_t>> brute_islands(
    const MultipartiteState& s, double eps) {
    std::vector<std::size_t> all(s.dims.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    std::vector<std::vector<std::size_t>> out;
    MultipartiteState norm = s;
    double inv = 1.0 / s.norm();
    for (cplx& a : norm.amplitudes) a *= inv;
    detail::brute_split(norm, all, eps, out);
    std::sort(out.begin(), out.end());
    return out;
}

/// Eq-by-hand invariant count in arbitrary precision.
inline boost::multiprecision::cpp_int big_invariant_count(unsigned d,
                                                          unsigned n) {
    using boost::multiprecision::cpp_int;
    cpp_int dd = d;
    cpp_int result = 1;
    for (unsigned i = 0; i < n + 1; ++i) result *= dd;
    result -= (dd * dd - 1) * n;
    result -= 1;
    return result;
}

}  // namespace cmqm::oracle
