#include "cmqm/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cmqm {

namespace {

std::vector<std::size_t> compute_strides(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> stride(dims.size());
    std::size_t acc = 1;
    for (std::size_t k = dims.size(); k-- > 0;) {
        stride[k] = acc;
        acc *= dims[k];
    }
    return stride;
}

std::size_t dims_product(const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& parties) {
    std::size_t d = 1;
    for (std::size_t p : parties) d *= dims[p];
    return d;
}

// Flattened index offsets of all multi-indices over the given party list
// (row-major in list order).
std::vector<std::size_t> subset_offsets(const std::vector<std::size_t>& dims,
                                        const std::vector<std::size_t>& stride,
                                        const std::vector<std::size_t>& parties) {
    std::size_t total = dims_product(dims, parties);
    std::vector<std::size_t> offsets(total, 0);
    std::size_t repeat = total;
    for (std::size_t p : parties) {
        repeat /= dims[p];
        std::size_t block = repeat * dims[p];
        for (std::size_t i = 0; i < total; ++i) {
            std::size_t digit = (i % block) / repeat;
            offsets[i] += digit * stride[p];
        }
    }
    return offsets;
}

Eigen::VectorXd spectrum_descending(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho,
                                                       Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();
    return ev.reverse();
}

// Reduced density on whichever side of the cut is smaller; for pure global
// states both sides share the nonzero spectrum.
Eigen::MatrixXcd reduced_density_smaller_side(const MultipartiteState& s,
                                              const SubsetMask& subset) {
    SubsetMask comp = subset.complement();
    std::size_t ds = dims_product(s.dims, subset.members());
    std::size_t dc = dims_product(s.dims, comp.members());
    return reduced_density(s, ds <= dc ? subset : comp);
}

double second_eigenvalue(const MultipartiteState& s, const SubsetMask& subset) {
    Eigen::VectorXd ev = spectrum_descending(reduced_density_smaller_side(s, subset));
    if (ev.size() < 2) return 0.0;
    return std::max(ev[1], 0.0);
}

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
    std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] + (k - i) < n) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

void canonical_phase(Eigen::VectorXcd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            return;
        }
    }
}

// Rank-1 Schmidt split of a pure block state across the local-subset cut.
std::pair<MultipartiteState, MultipartiteState> schmidt_split(
    const MultipartiteState& block, const SubsetMask& subset) {
    auto stride = compute_strides(block.dims);
    auto sub = subset.members();
    auto comp = subset.complement().members();
    std::size_t ds = dims_product(block.dims, sub);
    std::size_t dc = dims_product(block.dims, comp);
    auto off_s = subset_offsets(block.dims, stride, sub);
    auto off_c = subset_offsets(block.dims, stride, comp);
    Eigen::MatrixXcd m(ds, dc);
    for (std::size_t r = 0; r < ds; ++r) {
        for (std::size_t c = 0; c < dc; ++c) {
            m(r, c) = block.amplitudes[off_s[r] + off_c[c]];
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXcd u = svd.matrixU().col(0);
    Eigen::VectorXcd v = svd.matrixV().col(0).conjugate();
    canonical_phase(u);
    canonical_phase(v);

    MultipartiteState su, sv;
    for (std::size_t p : sub) su.dims.push_back(block.dims[p]);
    for (std::size_t p : comp) sv.dims.push_back(block.dims[p]);
    su.amplitudes.assign(u.data(), u.data() + u.size());
    sv.amplitudes.assign(v.data(), v.data() + v.size());
    return {std::move(su), std::move(sv)};
}

void split_block(const std::vector<std::size_t>& parties,
                 const MultipartiteState& block, const ResolutionParams& res,
                 IslandDecomposition& out) {
    std::size_t m = parties.size();
    if (m == 1) {
        out.islands.push_back(parties);
        out.states.push_back(block);
        return;
    }
    double eps = res.epsilon();
    for (std::size_t sz = 1; sz < m; ++sz) {
        std::vector<std::size_t> comb(sz);
        std::iota(comb.begin(), comb.end(), std::size_t{0});
        do {
            SubsetMask cut = SubsetMask::from_members(comb, m);
            if (second_eigenvalue(block, cut) < eps) {
                auto [sy, sc] = schmidt_split(block, cut);
                std::vector<std::size_t> py, pc;
                for (std::size_t i = 0; i < m; ++i) {
                    (cut.contains(i) ? py : pc).push_back(parties[i]);
                }
                split_block(py, sy, res, out);
                split_block(pc, sc, res, out);
                return;
            }
        } while (next_combination(comb, m));
    }
    out.islands.push_back(parties);
    out.states.push_back(block);
}

void check_party_cap(std::size_t n) {
    if (n > max_parties) {
        throw std::invalid_argument(
            "party count exceeds the supported maximum of " +
            std::to_string(max_parties) +
            " (bipartition enumeration is exponential)");
    }
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw std::overflow_error("invariant_count: 64-bit overflow");
    }
    return r;
}

}  // namespace

SubsetMask::SubsetMask(std::uint32_t bits_, std::uint32_t n_total_)
    : bits(bits_), n_total(n_total_) {
    if (n_total == 0 || n_total > max_parties) {
        throw std::invalid_argument("SubsetMask: bad party count");
    }
    if (bits >> n_total) {
        throw std::invalid_argument("SubsetMask: bits outside party range");
    }
}

SubsetMask SubsetMask::from_members(const std::vector<std::size_t>& members,
                                    std::size_t n_total) {
    std::uint32_t bits = 0;
    for (std::size_t p : members) {
        if (p >= n_total) {
            throw std::invalid_argument("SubsetMask: member out of range");
        }
        bits |= 1u << p;
    }
    return SubsetMask(bits, static_cast<std::uint32_t>(n_total));
}

std::size_t SubsetMask::size() const { return std::popcount(bits); }

bool SubsetMask::full() const { return bits == (1u << n_total) - 1u; }

SubsetMask SubsetMask::complement() const {
    return SubsetMask(~bits & ((1u << n_total) - 1u), n_total);
}

std::vector<std::size_t> SubsetMask::members() const {
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < n_total; ++p) {
        if (contains(p)) out.push_back(p);
    }
    return out;
}

std::string SubsetMask::to_string() const {
    std::string s = "{";
    bool first = true;
    for (std::size_t p : members()) {
        if (!first) s += ',';
        s += std::to_string(p);
        first = false;
    }
    return s + "}";
}

Eigen::MatrixXcd reduced_density(const MultipartiteState& s,
                                 const SubsetMask& subset) {
    s.validate();
    if (subset.n_total != s.num_parties()) {
        throw std::invalid_argument("reduced_density: mask/state party mismatch");
    }
    if (subset.empty()) {
        throw std::invalid_argument("reduced_density: empty subset");
    }
    auto stride = compute_strides(s.dims);
    auto sub = subset.members();
    auto comp = subset.complement().members();
    std::size_t ds = dims_product(s.dims, sub);
    std::size_t dc = dims_product(s.dims, comp);
    auto off_s = subset_offsets(s.dims, stride, sub);
    auto off_c = subset_offsets(s.dims, stride, comp);

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ds, ds);
    Eigen::VectorXcd v(ds);
    for (std::size_t c = 0; c < dc; ++c) {
        for (std::size_t r = 0; r < ds; ++r) {
            v[r] = s.amplitudes[off_s[r] + off_c[c]];
        }
        rho.noalias() += v * v.adjoint();
    }
    return rho;
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho, double entropy_floor) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("von_neumann_entropy: non-square input");
    }
    Eigen::VectorXd ev = spectrum_descending(rho);
    if (ev.size() > 0 && ev[ev.size() - 1] < -1e-9) {
        throw std::domain_error("von_neumann_entropy: input not PSD");
    }
    double s = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > entropy_floor) s -= ev[i] * std::log2(ev[i]);
    }
    return std::max(s, 0.0);
}

double xi(const MultipartiteState& s, double entropy_floor) {
    s.validate();
    std::size_t n = s.num_parties();
    if (n < 2) throw std::domain_error("xi: need at least 2 parties");
    check_party_cap(n);
    require_normalized(s, 1e-6);

    // Every proper-subset marginal must carry entropy; subsets containing
    // party 0 cover each bipartition once (S(rho_y) = S(rho_ybar)).
    std::uint32_t full = (1u << n) - 1u;
    for (std::uint32_t bits = 1; bits < full; bits += 2) {
        SubsetMask y(bits, static_cast<std::uint32_t>(n));
        double ent = von_neumann_entropy(reduced_density_smaller_side(s, y),
                                         entropy_floor);
        if (ent <= entropy_floor) return 0.0;
    }
    double total = 0;
    for (std::size_t j = 0; j < n; ++j) {
        SubsetMask mj(1u << j, static_cast<std::uint32_t>(n));
        total += von_neumann_entropy(reduced_density(s, mj), entropy_floor);
    }
    return total;
}

double lambda_plus(const MultipartiteState& s, const SubsetMask& subset) {
    Eigen::VectorXd ev = spectrum_descending(reduced_density(s, subset));
    if (ev.size() < 2) return 0.0;
    return std::max(ev[1], 0.0);
}

double xi_mu(const MultipartiteState& s, const ResolutionParams& res) {
    s.validate();
    std::size_t n = s.num_parties();
    if (n < 2) return 0.0;
    check_party_cap(n);
    double eps = res.epsilon();
    std::uint32_t full = (1u << n) - 1u;
    for (std::uint32_t bits = 1; bits < full; bits += 2) {
        SubsetMask y(bits, static_cast<std::uint32_t>(n));
        if (second_eigenvalue(s, y) < eps) return 0.0;
    }
    double total = 0;
    for (std::size_t j = 0; j < n; ++j) {
        SubsetMask mj(1u << j, static_cast<std::uint32_t>(n));
        total += von_neumann_entropy(reduced_density(s, mj), res.entropy_floor);
    }
    return total;
}

IslandDecomposition decompose_islands(const MultipartiteState& s,
                                      const ResolutionParams& res) {
    s.validate();
    check_party_cap(s.num_parties());
    IslandDecomposition out;
    std::vector<std::size_t> all(s.num_parties());
    std::iota(all.begin(), all.end(), std::size_t{0});
    split_block(all, s, res, out);

    // canonical order: blocks sorted by first member
    std::vector<std::size_t> order(out.islands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.islands[a].front() < out.islands[b].front();
    });
    IslandDecomposition sorted;
    for (std::size_t i : order) {
        sorted.islands.push_back(std::move(out.islands[i]));
        sorted.states.push_back(std::move(out.states[i]));
    }
    return sorted;
}

std::vector<std::vector<std::size_t>> island_decomposition(
    const MultipartiteState& s, const ResolutionParams& res) {
    return decompose_islands(s, res).islands;
}

double chi(const MultipartiteState& s, const ResolutionParams& res) {
    IslandDecomposition dec = decompose_islands(s, res);
    double best = 0;
    for (const MultipartiteState& block : dec.states) {
        if (block.num_parties() < 2) continue;
        best = std::max(best, xi_mu(block, res));
    }
    return best;
}

std::uint64_t invariant_count(std::uint64_t level_dim, std::uint64_t parties) {
    if (level_dim < 2 || parties < 1) {
        throw std::invalid_argument("invariant_count: need D >= 2, N >= 1");
    }
    std::uint64_t p = 1;
    for (std::uint64_t i = 0; i <= parties; ++i) p = checked_mul(p, level_dim);
    std::uint64_t q = checked_mul(checked_mul(level_dim, level_dim) - 1, parties);
    if (p < q + 1) {
        throw std::overflow_error("invariant_count: negative result");
    }
    return p - q - 1;
}

bool is_computationally_stable(const MultipartiteState& s,
                               const ResolutionParams& res) {
    return chi(s, res) < res.kappa * static_cast<double>(res.mu);
}

EntanglementReport analyze_entanglement(const MultipartiteState& s,
                                        const ResolutionParams& res) {
    s.validate();
    std::size_t n = s.num_parties();
    check_party_cap(n);
    EntanglementReport r;
    r.xi = n >= 2 ? xi(s, res.entropy_floor) : 0.0;
    r.xi_mu = xi_mu(s, res);
    IslandDecomposition dec = decompose_islands(s, res);
    r.islands = dec.islands;
    double best = 0;
    for (const MultipartiteState& block : dec.states) {
        if (block.num_parties() >= 2) best = std::max(best, xi_mu(block, res));
    }
    r.chi = best;
    r.stable = r.chi < res.kappa * static_cast<double>(res.mu);
    if (n >= 2) {
        std::uint32_t full = (1u << n) - 1u;
        for (std::uint32_t bits = 1; bits < full; bits += 2) {
            SubsetMask y(bits, static_cast<std::uint32_t>(n));
            r.lambda_plus_by_bipartition[y] = second_eigenvalue(s, y);
        }
    }
    return r;
}

std::string format_report(const EntanglementReport& r) {
    char buf[64];
    std::ostringstream os;
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    os << "xi " << num(r.xi) << '\n';
    os << "xi_mu " << num(r.xi_mu) << '\n';
    os << "chi " << num(r.chi) << '\n';
    os << "stable " << (r.stable ? "true" : "false") << '\n';
    os << "islands ";
    for (std::size_t i = 0; i < r.islands.size(); ++i) {
        if (i) os << ';';
        os << '{';
        for (std::size_t j = 0; j < r.islands[i].size(); ++j) {
            if (j) os << ',';
            os << r.islands[i][j];
        }
        os << '}';
    }
    os << '\n';
    for (const auto& [mask, lp] : r.lambda_plus_by_bipartition) {
        os << "lambda_plus " << mask.to_string() << '|'
           << mask.complement().to_string() << ' ' << num(lp) << '\n';
    }
    return os.str();
}

}  // namespace cmqm
