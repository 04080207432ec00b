#include "cmqm/dynamics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "cmqm/entanglement.hpp"
#include "cmqm/hilbert.hpp"

namespace cmqm {

double EnergySpectrum::mean() const {
    if (energies.empty()) return 0.0;
    return total() / static_cast<double>(energies.size());
}

double EnergySpectrum::total() const {
    return std::accumulate(energies.begin(), energies.end(), 0.0);
}

MuUnitary make_mu_unitary(const Eigen::MatrixXcd& exact,
                          const ResolutionParams& res) {
    if (exact.rows() != exact.cols()) {
        throw std::invalid_argument("make_mu_unitary: non-square matrix");
    }
    if (res.mu > ResolutionParams::max_mu) {
        throw std::domain_error("make_mu_unitary: mu exceeds supported precision");
    }
    double eps = res.epsilon();
    MuUnitary u;
    u.mu = res.mu;
    u.matrix = exact.unaryExpr([eps](const cplx& z) {
        return cplx{std::nearbyint(z.real() / eps) * eps,
                    std::nearbyint(z.imag() / eps) * eps};
    });
    // distance to the nearest exact unitary = max |sigma_i - 1|
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(u.matrix);
    double dev = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        dev = std::max(dev, std::abs(svd.singularValues()[i] - 1.0));
    }
    u.deviation = dev;
    return u;
}

EvolveResult apply_mu_unitary(const MultipartiteState& s, const MuUnitary& u,
                              const ResolutionParams& res) {
    s.validate();
    std::size_t dim = s.dimension();
    if (u.matrix.rows() != static_cast<Eigen::Index>(dim)) {
        throw std::invalid_argument("apply_mu_unitary: dimension mismatch");
    }
    Eigen::Map<const Eigen::VectorXcd> psi(s.amplitudes.data(),
                                           static_cast<Eigen::Index>(dim));
    Eigen::VectorXcd evolved = u.matrix * psi;
    MultipartiteState out;
    out.dims = s.dims;
    out.amplitudes.assign(evolved.data(), evolved.data() + evolved.size());
    double norm_in = s.norm();
    out = discretize(out, res);
    return {out, std::abs(out.norm() - norm_in)};
}

double ops_rate(const EnergySpectrum& spec, const ResolutionParams& res,
                double hbar) {
    return std::exp2(0.5 * static_cast<double>(res.mu)) * spec.total() / hbar;
}

double per_amplitude_rate(double energy, const ResolutionParams& res,
                          double hbar) {
    return std::exp2(0.5 * static_cast<double>(res.mu)) * energy / hbar;
}

double operator_update_rate(double mean_energy, const ResolutionParams& res,
                            double dimension, double hbar) {
    return std::exp2(0.5 * static_cast<double>(res.mu)) * dimension *
           dimension * mean_energy / hbar;
}

double classical_ops_rate(double energy, double hbar) {
    if (energy < 0) {
        throw std::invalid_argument("classical_ops_rate: negative energy");
    }
    return 2.0 * energy / (M_PI * hbar);
}

MultipartiteState qubit_flip_evolve(double t, double delta_e, double hbar) {
    if (!(delta_e > 0)) {
        throw std::invalid_argument("qubit_flip_evolve: deltaE must be positive");
    }
    // (|E0> + e^{i theta} |E1>)/sqrt(2) with |E0,1> = (|0> +- |1>)/sqrt(2)
    double theta = 2.0 * delta_e * t / hbar;
    cplx phase = std::polar(1.0, theta);
    MultipartiteState s;
    s.dims = {2};
    s.amplitudes = {(cplx{1, 0} + phase) * 0.5, (cplx{1, 0} - phase) * 0.5};
    return s;
}

CoherentTruncation coherent_truncation(cplx alpha, const ResolutionParams& res,
                                       std::size_t max_dim) {
    double mag = std::abs(alpha);
    if (!(mag > 0)) {
        throw std::invalid_argument("coherent_truncation: |alpha| must be > 0");
    }
    double log_eps = -0.5 * static_cast<double>(res.mu) * std::log(2.0);
    auto log_amp = [&](std::size_t n) {
        return -0.5 * mag * mag + static_cast<double>(n) * std::log(mag) -
               0.5 * std::lgamma(static_cast<double>(n) + 1.0);
    };

    std::size_t cap = max_dim;
    if (res.mu < 63) cap = std::min<std::size_t>(cap, std::size_t{1} << res.mu);
    std::size_t n_r = cap;
    for (std::size_t n = 0; n < cap; ++n) {
        if (log_amp(n) < log_eps) {
            n_r = n;
            break;
        }
    }
    if (n_r == cap && log_amp(cap) >= log_eps) {
        throw std::domain_error(
            "coherent_truncation: truncation dimension exceeds the cap");
    }
    if (n_r == 0) n_r = 1;  // keep at least the vacuum term

    CoherentTruncation out;
    out.n_r = n_r;
    // tail sum_{n >= n_r} |a_n|^2, in log domain; the terms decay at least
    // geometrically once n > |alpha|^2
    double tail = 0;
    for (std::size_t n = n_r;; ++n) {
        double term = std::exp(2.0 * log_amp(n));
        tail += term;
        if (static_cast<double>(n) > mag * mag &&
            (term < tail * 1e-18 || term < 1e-300)) {
            break;
        }
    }
    out.tail = tail;

    double arg = std::arg(alpha);
    MultipartiteState s;
    s.dims = {n_r};
    s.amplitudes.reserve(n_r);
    for (std::size_t n = 0; n < n_r; ++n) {
        s.amplitudes.push_back(
            std::polar(std::exp(log_amp(n)), arg * static_cast<double>(n)));
    }
    out.state = discretize(s, res);
    return out;
}

std::vector<TrajectoryStep> run_recollapse_cycle(const MultipartiteState& initial,
                                                 const MuUnitary& u,
                                                 const ResolutionParams& res,
                                                 std::size_t steps,
                                                 std::mt19937_64& rng) {
    std::vector<TrajectoryStep> trajectory;
    trajectory.reserve(steps);
    MultipartiteState cur = initial;
    for (std::size_t step = 1; step <= steps; ++step) {
        EvolveResult ev = apply_mu_unitary(cur, u, res);
        cur = std::move(ev.state);
        TrajectoryStep ts;
        ts.step = step;
        ts.norm_drift = ev.norm_drift;
        double c = chi(cur, res);
        if (c >= res.kappa * static_cast<double>(res.mu)) {
            auto [collapsed, event] = collapse(cur, res, rng);
            cur = std::move(collapsed);
            ts.event = event;
            c = event.chi_after;
        }
        ts.chi = c;
        trajectory.push_back(std::move(ts));
    }
    return trajectory;
}

std::string trajectory_csv_header() {
    return "step,chi,event_flag,outcome_index,norm_drift";
}

std::string trajectory_csv_row(const TrajectoryStep& ts) {
    char buf[128];
    if (ts.event) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,1,%zu,%.17g", ts.step, ts.chi,
                      ts.event->outcome_index, ts.norm_drift);
    } else {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,0,,%.17g", ts.step, ts.chi,
                      ts.norm_drift);
    }
    return buf;
}

}  // namespace cmqm
