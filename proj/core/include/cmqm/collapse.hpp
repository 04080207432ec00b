#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cmqm/entanglement.hpp"
#include "cmqm/state.hpp"

namespace cmqm {

/// An orthonormal basis for one party's space, used as the projection basis
/// of the trigger party.
struct TriggerBasis {
    std::size_t trigger = 0;
    std::vector<Eigen::VectorXcd> vectors;
    std::string label;  // "single_index", "marginal_eigen", "computational", ...

    /// Throws std::invalid_argument unless vectors are pairwise orthonormal
    /// within 1e-9.
    void validate(std::size_t expected_dim) const;
};

/// Expansion sum_j c_j |j_0>|j_1>...|j_{N-1}> with orthonormal per-party
/// vectors (generalized Schmidt form). Terms are ordered by the dominant
/// computational component of their per-party vectors, so preset states keep
/// their natural outcome labels.
struct SingleIndexForm {
    std::vector<cplx> coefficients;
    /// party_vectors[k][j] is party k's vector in term j.
    std::vector<std::vector<Eigen::VectorXcd>> party_vectors;
};

/// Detect a single-index expansion via the marginal eigenbases: rotate the
/// state into every party's marginal eigenbasis and require the residual
/// off-single-index mass to vanish within tol. Absence is a value, not an
/// error.
std::optional<SingleIndexForm> single_index_form(const MultipartiteState& s,
                                                 double tol = 1e-8);

/// Expected post-collapse entanglement chi_bar for a trigger basis: project
/// the trigger party on each basis vector, renormalize the remainder and
/// weight its chi by the outcome probability. Zero-probability outcomes
/// contribute 0.
double mean_post_chi(const MultipartiteState& s, const TriggerBasis& tb,
                     const ResolutionParams& res);

/// The algorithmically minimal trigger basis: the single-index expansion's
/// vectors when the state has one (completed to a full basis), otherwise the
/// argmin of mean_post_chi over the candidate set (trigger marginal
/// eigenbasis, computational basis, plus caller extras). Ties keep the first
/// candidate.
TriggerBasis minimal_basis(const MultipartiteState& s, std::size_t trigger,
                           const ResolutionParams& res,
                           const std::vector<TriggerBasis>& extra_candidates = {});

/// Born probabilities |c_j|^2 renormalized against discretization norm
/// drift; sums to 1 exactly. Throws std::domain_error for all-zero
/// coefficients.
std::vector<double> born_probabilities(const SingleIndexForm& form);

struct CollapseEvent {
    std::size_t trigger = 0;
    std::string basis_label;
    std::size_t outcome_index = 0;
    double born_probability = 0;
    double chi_before = 0;
    double chi_after = 0;
};

std::string collapse_event_csv_header();
std::string collapse_event_csv_row(const CollapseEvent& ev);

/// Two-step state reduction: a uniformly random trigger in the unstable
/// island projects in its minimal basis (outcome sampled by inverse CDF over
/// the Born weights, one draw per projection), then the rest of the island
/// is productized by correlated projections. The result is renormalized and
/// snapped to the mu grid.
///
/// Throws std::logic_error when called on a computationally stable state
/// without allow_stable.
std::pair<MultipartiteState, CollapseEvent> collapse(
    const MultipartiteState& s, const ResolutionParams& res,
    std::mt19937_64& rng, bool allow_stable = false);

/// One uniform draw in [0,1) from the stream (53 bits).
double uniform_draw(std::mt19937_64& rng);

}  // namespace cmqm
