#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cmqm {

using cplx = std::complex<double>;

/// Resolution parameters of the discretized state space.
///
/// mu is the number of bits of precision per complex amplitude (mu/2 for the
/// real part, mu/2 for the imaginary part), giving a grid step of 2^(-mu/2)
/// per real component. kappa scales the instability threshold chi < kappa*mu.
struct ResolutionParams {
    unsigned mu = 50;
    double kappa = 1.0;
    /// Eigenvalues below this are treated as exactly zero in entropy sums.
    /// Distinct from the physical threshold 2^(-mu/2).
    double entropy_floor = 1e-12;

    /// Largest mu for which the 2^(-mu/2) grid stays above double rounding
    /// noise for O(1) amplitudes. Larger mu is rejected, never silently
    /// truncated.
    static constexpr unsigned max_mu = 100;

    ResolutionParams() = default;
    explicit ResolutionParams(unsigned mu_, double kappa_ = 1.0,
                              double entropy_floor_ = 1e-12);

    /// Amplitude grid step 2^(-mu/2).
    double epsilon() const;
};

/// A pure state of N parties with arbitrary per-party dimensions.
///
/// Amplitudes are indexed in row-major party order (party 0 most
/// significant). The optional mu tag records the grid the state was last
/// snapped to; states are not in general exactly normalized after snapping.
struct MultipartiteState {
    std::vector<std::size_t> dims;
    std::vector<cplx> amplitudes;
    std::optional<unsigned> mu;

    MultipartiteState() = default;
    MultipartiteState(std::vector<std::size_t> dims_, std::vector<cplx> amps);

    std::size_t dimension() const;
    std::size_t num_parties() const { return dims.size(); }
    double norm() const;

    /// Throws std::invalid_argument if dims/amplitudes are inconsistent.
    void validate() const;
};

/// Worst-case accumulated rounding deviation of the norm, D * epsilon.
double norm_tolerance(const MultipartiteState& s, const ResolutionParams& res);

/// Throws std::domain_error if | ||s|| - 1 | exceeds tol.
void require_normalized(const MultipartiteState& s, double tol = 1e-9);

// Preset states.
MultipartiteState make_basis_state(std::vector<std::size_t> dims,
                                   std::size_t index);
MultipartiteState make_bell();
MultipartiteState make_ghz(std::size_t parties, std::size_t level_dim = 2);
MultipartiteState make_w(std::size_t parties);
/// The measurement-chain state sum_j c_j |j>|j>|j> on `parties` parties of
/// dimension len(coefficients) each. Coefficients are normalized; an
/// all-zero list is a degenerate-state error.
MultipartiteState make_measurement_chain(const std::vector<cplx>& coefficients,
                                         std::size_t parties = 3);

// Text serialization: "dims d0 d1 ...", "mu <bits>|none", then one
// amplitude per line as "re im" at 17 significant digits (round-trips
// bit-exactly).
void write_state(std::ostream& os, const MultipartiteState& s);
MultipartiteState read_state(std::istream& is);
void save_state(const std::string& path, const MultipartiteState& s);
MultipartiteState load_state(const std::string& path);
std::string state_to_string(const MultipartiteState& s);

/// FNV-1a 64-bit digest of the serialized state text.
std::uint64_t state_digest(const MultipartiteState& s);

}  // namespace cmqm
