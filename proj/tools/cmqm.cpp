// Command-line front end: entanglement analysis, collapse experiments,
// ensemble statistics, recollapse trajectories, coherent truncation and the
// closed-form bounds calculators.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/QR>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "cmqm/bounds.hpp"
#include "cmqm/collapse.hpp"
#include "cmqm/dynamics.hpp"
#include "cmqm/entanglement.hpp"
#include "cmqm/experiments.hpp"
#include "cmqm/hilbert.hpp"
#include "cmqm/state.hpp"

namespace {

using json = nlohmann::json;

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
}

struct CommonOpts {
    std::string config_path;
    std::string state = "bell";
    unsigned mu = 50;
    double kappa = 1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t trajectories = 1;
    std::size_t steps = 16;
    std::string output;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "Load an experiment config file");
    cmd->add_option("--state", o.state, "State spec: bell, ghz(N), w(N), eq1(c,...), coherent(a), or a file");
    cmd->add_option("--mu", o.mu, "State resolution parameter (bits)");
    cmd->add_option("--kappa", o.kappa, "Instability threshold factor");
    cmd->add_option("--seed", o.seed, "Master seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--trajectories", o.trajectories, "Trajectory count M");
    cmd->add_option("--steps", o.steps, "Evolution steps");
    cmd->add_option("--output", o.output, "Output path (default stdout)");
    cmd->add_option("--format", o.format, "csv or json");
}

cmqm::ExperimentConfig to_config(const CommonOpts& o, cmqm::ExperimentKind kind) {
    cmqm::ExperimentConfig cfg;
    if (!o.config_path.empty()) cfg = cmqm::parse_config_file(o.config_path);
    cfg.experiment = kind;
    if (o.config_path.empty()) {
        cfg.state_spec = o.state;
        cfg.mu = o.mu;
        cfg.kappa = o.kappa;
        cfg.seed = o.seed;
        cfg.seed_set = o.seed_set;
        cfg.trajectories = o.trajectories;
        cfg.steps = o.steps;
        cfg.output = o.output;
        cfg.format = o.format == "json" ? cmqm::OutputFormat::json
                                        : cmqm::OutputFormat::csv;
        if (o.format != "json" && o.format != "csv") {
            throw cmqm::ConfigError("--format must be csv or json");
        }
    }
    return cfg;
}

int cmd_analyze(const CommonOpts& o) {
    cmqm::ExperimentConfig cfg = to_config(o, cmqm::ExperimentKind::analyze);
    cmqm::EntanglementReport rep = cmqm::analyze(cfg);
    if (cfg.format == cmqm::OutputFormat::json) {
        json j;
        j["xi"] = rep.xi;
        j["xi_mu"] = rep.xi_mu;
        j["chi"] = rep.chi;
        j["stable"] = rep.stable;
        j["islands"] = rep.islands;
        json lp = json::object();
        for (const auto& [mask, v] : rep.lambda_plus_by_bipartition) {
            lp[mask.to_string()] = v;
        }
        j["lambda_plus"] = lp;
        emit(cfg.output, j.dump(2) + "\n");
    } else {
        emit(cfg.output, cmqm::format_report(rep));
    }
    return 0;
}

int cmd_collapse(const CommonOpts& o, bool force) {
    cmqm::ExperimentConfig cfg =
        to_config(o, cmqm::ExperimentKind::measurement_chain);
    cmqm::ResolutionParams res(cfg.mu, cfg.kappa);
    cmqm::MultipartiteState state = cmqm::parse_state_spec(cfg.state_spec, res);
    std::mt19937_64 rng(cmqm::substream_seed(cfg.seed, 0));
    auto [post, ev] = cmqm::collapse(state, res, rng, force);
    std::ostringstream os;
    os << cmqm::collapse_event_csv_header() << '\n'
       << cmqm::collapse_event_csv_row(ev) << '\n';
    emit(cfg.output, os.str());
    return 0;
}

int cmd_ensemble(const CommonOpts& o) {
    cmqm::ExperimentConfig cfg = to_config(o, cmqm::ExperimentKind::ensemble);
    cmqm::EnsembleReport rep = cmqm::run_ensemble(cfg);
    std::ostringstream os;
    if (cfg.format == cmqm::OutputFormat::json) {
        json j;
        j["trajectories"] = rep.trajectories;
        j["outcome_counts"] = rep.outcome_counts;
        j["trace_distance"] = rep.trace_distance;
        os << j.dump(2) << '\n';
    } else {
        os << cmqm::trajectory_record_csv_header() << '\n';
        for (const auto& rec : rep.records) {
            os << cmqm::trajectory_record_csv_row(rec) << '\n';
        }
        os << "# trace_distance " << rep.trace_distance << '\n';
    }
    emit(cfg.output, os.str());
    return 0;
}

// Seeded Haar-random unitary, discretized to the mu grid. Used as the
// entangling evolution of the recollapse cycle.
cmqm::MuUnitary random_mu_unitary(std::size_t dim, const cmqm::ResolutionParams& res,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(dim, dim);
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
            g(r, c) = cmqm::cplx{gauss(rng), gauss(rng)};
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    return cmqm::make_mu_unitary(q, res);
}

int cmd_recollapse(const CommonOpts& o) {
    cmqm::ExperimentConfig cfg = to_config(o, cmqm::ExperimentKind::recollapse);
    cmqm::ResolutionParams res(cfg.mu, cfg.kappa);
    cmqm::MultipartiteState state = cmqm::parse_state_spec(cfg.state_spec, res);
    cmqm::MuUnitary u = random_mu_unitary(
        state.dimension(), res, cmqm::substream_seed(cfg.seed, 0xD1CEull));
    std::mt19937_64 rng(cmqm::substream_seed(cfg.seed, 0));
    auto traj = cmqm::run_recollapse_cycle(state, u, res, cfg.steps, rng);
    std::ostringstream os;
    os << cmqm::trajectory_csv_header() << '\n';
    for (const auto& ts : traj) os << cmqm::trajectory_csv_row(ts) << '\n';
    emit(cfg.output, os.str());
    return 0;
}

int cmd_truncate(const CommonOpts& o, double alpha) {
    cmqm::ResolutionParams res(o.mu, o.kappa);
    cmqm::CoherentTruncation tr =
        cmqm::coherent_truncation(cmqm::cplx{alpha, 0}, res);
    std::ostringstream os;
    if (o.format == "json") {
        json j;
        j["n_r"] = tr.n_r;
        j["tail"] = tr.tail;
        j["effective_dimension"] = cmqm::effective_dimension(tr.state, res);
        os << j.dump(2) << '\n';
    } else {
        os << "n_r " << tr.n_r << '\n';
        os << "tail " << tr.tail << '\n';
        os << cmqm::state_to_string(tr.state);
    }
    emit(o.output, os.str());
    return 0;
}

int cmd_bounds(const CommonOpts& o, const std::string& total_bits,
               double length, double entropy) {
    cmqm::bigint bits = cmqm::parse_bigint(total_bits);
    unsigned max_qubits = cmqm::memory_capacity_qubits(bits, o.mu);
    cmqm::bigint shor = cmqm::shor_max_n(o.mu);
    double dx = cmqm::spatial_resolution(length, o.mu);
    double mu_bound = cmqm::mu_upper_bound_from_entropy(entropy);
    std::ostringstream os;
    if (o.format == "json") {
        json j;
        j["max_qubits"] = max_qubits;
        j["shor_max_n"] = shor.str();
        j["delta_x"] = dx;
        j["mu_upper_bound"] = mu_bound;
        os << j.dump(2) << '\n';
    } else {
        os << "max_qubits     " << max_qubits << '\n';
        os << "shor_max_n     " << shor.str() << '\n';
        os << "delta_x        " << dx << '\n';
        os << "mu_upper_bound " << mu_bound << '\n';
    }
    emit(o.output, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cmqm: finite-resolution quantum state simulator"};
    app.require_subcommand(1);

    CommonOpts o;
    bool force = false;
    double alpha = 2.0;
    std::string total_bits = "1e21";
    double length = 1.0;
    double entropy = 1e120;

    auto* analyze = app.add_subcommand("analyze", "Entanglement report for a state");
    add_common(analyze, o);
    auto* collapse = app.add_subcommand("collapse", "Run a single collapse");
    add_common(collapse, o);
    collapse->add_flag("--force", force, "Collapse even if the state is stable");
    auto* ensemble = app.add_subcommand("ensemble", "Seeded collapse ensemble and decoherence comparison");
    add_common(ensemble, o);
    auto* recollapse = app.add_subcommand("recollapse", "Alternating evolve/collapse trajectory");
    add_common(recollapse, o);
    auto* truncate = app.add_subcommand("truncate", "Coherent-state truncation at the mu grid");
    add_common(truncate, o);
    truncate->add_option("--alpha", alpha, "Coherent amplitude");
    auto* bounds = app.add_subcommand("bounds", "Closed-form model bounds");
    add_common(bounds, o);
    bounds->add_option("--total-bits", total_bits, "Memory budget in bits (big integer, NeM allowed)");
    bounds->add_option("--length", length, "Region size L for the spatial bound");
    bounds->add_option("--entropy", entropy, "Dimensionless entropy S/k_B");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(analyze)) return cmd_analyze(o);
        if (app.got_subcommand(collapse)) return cmd_collapse(o, force);
        if (app.got_subcommand(ensemble)) return cmd_ensemble(o);
        if (app.got_subcommand(recollapse)) return cmd_recollapse(o);
        if (app.got_subcommand(truncate)) return cmd_truncate(o, alpha);
        if (app.got_subcommand(bounds)) return cmd_bounds(o, total_bits, length, entropy);
    } catch (const cmqm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
