#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cmqm/collapse.hpp"
#include "cmqm/state.hpp"

namespace cmqm {

/// A unitary with entries rounded to the mu grid; approximately
/// norm-preserving. deviation is the operator-norm distance to the nearest
/// exact unitary (diagnostic, not corrected).
struct MuUnitary {
    Eigen::MatrixXcd matrix;
    unsigned mu = 0;
    double deviation = 0;
};

MuUnitary make_mu_unitary(const Eigen::MatrixXcd& exact,
                          const ResolutionParams& res);

struct EnergySpectrum {
    std::vector<double> energies;  // E_j >= 0, hbar = 1 natural units
    double mean() const;
    double total() const;
};

struct EvolveResult {
    MultipartiteState state;
    double norm_drift = 0;  // | ||out|| - ||in|| |
};

/// Matrix-vector product followed by grid snapping.
EvolveResult apply_mu_unitary(const MultipartiteState& s, const MuUnitary& u,
                              const ResolutionParams& res);

/// Total sub-physical update rate 2^(mu/2) * sum_j E_j / hbar ops.
double ops_rate(const EnergySpectrum& spec, const ResolutionParams& res,
                double hbar = 1.0);
/// Per-amplitude rate 2^(mu/2) * E_j / hbar.
double per_amplitude_rate(double energy, const ResolutionParams& res,
                          double hbar = 1.0);
/// Operator update rate 2^(mu/2) * D^2 * Ebar / hbar.
double operator_update_rate(double mean_energy, const ResolutionParams& res,
                            double dimension, double hbar = 1.0);
/// Classical logical-operation rate 2E/(pi hbar).
double classical_ops_rate(double energy, double hbar = 1.0);

/// Single qubit under the flip Hamiltonian, starting from |0>:
/// (|E0> + e^{i 2 dE t / hbar} |E1>)/sqrt(2) expressed in the computational
/// basis. Reaches |1> (up to global phase) at t = pi hbar / (2 dE).
MultipartiteState qubit_flip_evolve(double t, double delta_e,
                                    double hbar = 1.0);

struct CoherentTruncation {
    std::size_t n_r = 0;       // first Fock index below resolution
    double tail = 0;           // probability lost to truncation
    MultipartiteState state;   // mu-rounded Fock expansion on n < n_r
};

/// Truncate the coherent state |alpha> at the first Fock amplitude below
/// 2^(-mu/2). All scanning and the tail sum run in log domain, so there is
/// no factorial overflow.
CoherentTruncation coherent_truncation(cplx alpha, const ResolutionParams& res,
                                       std::size_t max_dim = 4096);

struct TrajectoryStep {
    std::size_t step = 0;
    double chi = 0;
    std::optional<CollapseEvent> event;
    double norm_drift = 0;
};

/// Alternating mu-unitary evolution and collapse: at each step apply u,
/// snap, and collapse whenever the state is computationally unstable.
/// Deterministic under the seed of rng.
std::vector<TrajectoryStep> run_recollapse_cycle(
    const MultipartiteState& initial, const MuUnitary& u,
    const ResolutionParams& res, std::size_t steps, std::mt19937_64& rng);

std::string trajectory_csv_header();
std::string trajectory_csv_row(const TrajectoryStep& ts);

}  // namespace cmqm
