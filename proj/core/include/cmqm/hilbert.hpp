#pragma once

#include "cmqm/state.hpp"

namespace cmqm {

/// Snap every amplitude's real and imaginary part to the nearest integer
/// multiple of the grid step 2^(-mu/2), ties to the even multiple. The state
/// is not renormalized. Throws std::domain_error for unsupported mu.
MultipartiteState discretize(const MultipartiteState& s,
                             const ResolutionParams& res);

/// Fubini-Study angle arccos(|<a|b>| / (||a|| ||b||)) in [0, pi/2].
/// Invariant under global phase of either argument.
double hilbert_angle(const MultipartiteState& a, const MultipartiteState& b);

/// True iff the pair is separated by at least the minimum resolvable angle
/// 2^(-mu/2).
bool is_resolvable_pair(const MultipartiteState& a, const MultipartiteState& b,
                        const ResolutionParams& res);

/// Number of basis amplitudes with modulus >= 2^(-mu/2). For normalized
/// states this never exceeds 2^mu; a violation is reported as an
/// inconsistency (std::domain_error), never ignored.
std::size_t effective_dimension(const MultipartiteState& s,
                                const ResolutionParams& res);

enum class InfoKind { state, op };

/// Algorithmic information in bits: D*mu for a state, D^2*mu for an
/// operator. (Normalization would allow (D-1)*mu for states; the D*mu form
/// is used as defined.)
double algorithmic_information(double dimension, const ResolutionParams& res,
                               InfoKind kind);

}  // namespace cmqm
