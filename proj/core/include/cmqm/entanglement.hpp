#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cmqm/state.hpp"

namespace cmqm {

/// Hard cap on party count: bipartition enumeration is 2^(N-1)-1 cuts.
inline constexpr std::size_t max_parties = 20;

/// A subset of party indices, as a bit mask over at most max_parties.
struct SubsetMask {
    std::uint32_t bits = 0;
    std::uint32_t n_total = 0;

    SubsetMask() = default;
    SubsetMask(std::uint32_t bits_, std::uint32_t n_total_);
    static SubsetMask from_members(const std::vector<std::size_t>& members,
                                   std::size_t n_total);

    std::size_t size() const;
    bool contains(std::size_t party) const { return bits >> party & 1u; }
    bool empty() const { return bits == 0; }
    bool full() const;
    SubsetMask complement() const;
    std::vector<std::size_t> members() const;
    std::string to_string() const;  // e.g. "{0,2}"

    bool operator<(const SubsetMask& o) const { return bits < o.bits; }
    bool operator==(const SubsetMask& o) const = default;
};

/// Reduced density matrix rho_y = Tr_complement(|psi><psi|). Hermitian, PSD,
/// unit trace for normalized input; dimension = product of subset dims.
Eigen::MatrixXcd reduced_density(const MultipartiteState& s,
                                 const SubsetMask& subset);

/// -sum lambda log2 lambda over eigenvalues above entropy_floor. Throws
/// std::domain_error for inputs that are not PSD beyond tolerance.
double von_neumann_entropy(const Eigen::MatrixXcd& rho,
                           double entropy_floor = 1e-12);

/// Entanglement monotone: sum of single-party marginal entropies if every
/// proper-subset marginal has nonzero entropy, else 0. N log D for maximally
/// entangled N-partite states.
double xi(const MultipartiteState& s, double entropy_floor = 1e-12);

/// Second-largest eigenvalue of the reduced density matrix; 0 for product
/// cuts.
double lambda_plus(const MultipartiteState& s, const SubsetMask& subset);

/// mu-resolvable entanglement: sum of marginal entropies if
/// lambda_plus(y) >= 2^(-mu/2) for every proper subset y, else 0.
double xi_mu(const MultipartiteState& s, const ResolutionParams& res);

struct IslandDecomposition {
    /// Partition of party indices; blocks sorted by first member.
    std::vector<std::vector<std::size_t>> islands;
    /// Pure state of each block, obtained by rank-1 Schmidt projection of
    /// the sub-resolution cross terms.
    std::vector<MultipartiteState> states;
};

/// Finest partition into blocks whose recursive splits all had
/// lambda_plus < 2^(-mu/2). Cuts are tested by increasing subset size then
/// lexicographic member order; the first sub-threshold cut splits the block.
IslandDecomposition decompose_islands(const MultipartiteState& s,
                                      const ResolutionParams& res);
std::vector<std::vector<std::size_t>> island_decomposition(
    const MultipartiteState& s, const ResolutionParams& res);

/// chi: the largest xi_mu over pure island blocks (singletons contribute 0).
double chi(const MultipartiteState& s, const ResolutionParams& res);

/// Number of independent nonlocal real invariants, D^(N+1) - (D^2-1)N - 1.
/// Throws std::overflow_error when the value does not fit 64 bits.
std::uint64_t invariant_count(std::uint64_t level_dim,
                              std::uint64_t parties);

/// Stability condition chi < kappa * mu.
bool is_computationally_stable(const MultipartiteState& s,
                               const ResolutionParams& res);

struct EntanglementReport {
    double xi = 0;
    double xi_mu = 0;
    double chi = 0;
    bool stable = true;
    std::vector<std::vector<std::size_t>> islands;
    /// lambda_plus per canonical bipartition (subsets containing party 0).
    std::map<SubsetMask, double> lambda_plus_by_bipartition;
};

EntanglementReport analyze_entanglement(const MultipartiteState& s,
                                        const ResolutionParams& res);

/// Structured-text report with keys xi, xi_mu, chi, stable, islands and the
/// lambda_plus table.
std::string format_report(const EntanglementReport& r);

}  // namespace cmqm
