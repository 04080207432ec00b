#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cmqm/collapse.hpp"
#include "cmqm/entanglement.hpp"
#include "cmqm/state.hpp"

namespace cmqm {

/// Raised for malformed configs and state specs (CLI exit code 2).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind {
    measurement_chain,
    ensemble,
    recollapse,
    truncate,
    bounds,
    analyze,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& name);

enum class OutputFormat { csv, json };

/// Declarative experiment description. Serialized as flat "key = value"
/// lines; unknown keys are errors.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::analyze;
    std::string state_spec = "bell";
    unsigned mu = 50;
    double kappa = 1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;  // seed is mandatory for stochastic experiments
    std::size_t trajectories = 1;
    std::size_t steps = 1;
    std::string output;  // empty = stdout
    OutputFormat format = OutputFormat::csv;

    void validate() const;  // throws ConfigError
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

/// Build a state from a spec: bell, ghz(N), w(N), eq1(c0,c1,...),
/// coherent(alpha), or a file path to a serialized state. coherent() needs
/// mu for the truncation.
MultipartiteState parse_state_spec(const std::string& spec,
                                   const ResolutionParams& res);

/// Substream i is seeded by splitmix64(master + GOLDEN * (i+1)), so
/// ensembles are order-independent and parallelizable.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t splitmix64(std::uint64_t x);

struct TrajectoryRecord {
    std::size_t trajectory_id = 0;
    std::vector<CollapseEvent> events;
    std::uint64_t final_state_digest = 0;
    MultipartiteState final_state;
};

/// One forced collapse of the eq1 measurement-chain state.
TrajectoryRecord run_measurement_chain(const ExperimentConfig& cfg);

struct EnsembleReport {
    std::size_t trajectories = 0;
    std::vector<std::size_t> outcome_counts;
    /// Trace distance between the empirical non-selective density matrix
    /// and the analytic decohered mixture.
    double trace_distance = 0;
    std::vector<TrajectoryRecord> records;
};

/// M independent seeded collapses; compares the averaged outcome projectors
/// against the decohered mixture sum_j |c_j|^2 P_j.
EnsembleReport run_ensemble(const ExperimentConfig& cfg);

/// Thin wrapper over the entanglement analysis.
EntanglementReport analyze(const ExperimentConfig& cfg);

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

std::string trajectory_record_csv_header();
std::string trajectory_record_csv_row(const TrajectoryRecord& rec);

}  // namespace cmqm
