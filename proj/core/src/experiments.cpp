#include "cmqm/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmqm/dynamics.hpp"
#include "cmqm/hilbert.hpp"

namespace cmqm {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(what + ": bad number '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

// "name(args)" -> {name, args}; plain names give empty args.
std::pair<std::string, std::string> split_call(const std::string& spec) {
    std::size_t open = spec.find('(');
    if (open == std::string::npos) return {trim(spec), ""};
    if (spec.back() != ')') {
        throw ConfigError("state spec: missing ')': " + spec);
    }
    return {trim(spec.substr(0, open)),
            trim(spec.substr(open + 1, spec.size() - open - 2))};
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::measurement_chain: return "measurement_chain";
        case ExperimentKind::ensemble: return "ensemble";
        case ExperimentKind::recollapse: return "recollapse";
        case ExperimentKind::truncate: return "truncate";
        case ExperimentKind::bounds: return "bounds";
        case ExperimentKind::analyze: return "analyze";
    }
    return "analyze";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "measurement_chain") return ExperimentKind::measurement_chain;
    if (name == "ensemble") return ExperimentKind::ensemble;
    if (name == "recollapse") return ExperimentKind::recollapse;
    if (name == "truncate") return ExperimentKind::truncate;
    if (name == "bounds") return ExperimentKind::bounds;
    if (name == "analyze") return ExperimentKind::analyze;
    throw ConfigError("unknown experiment kind: " + name);
}

void ExperimentConfig::validate() const {
    if (mu == 0) throw ConfigError("config: mu must be positive");
    if (!(kappa > 0) || kappa > 1.0) {
        throw ConfigError("config: kappa must be in (0, 1]");
    }
    if (trajectories == 0) throw ConfigError("config: trajectories must be >= 1");
    bool stochastic = experiment == ExperimentKind::measurement_chain ||
                      experiment == ExperimentKind::ensemble ||
                      experiment == ExperimentKind::recollapse;
    if (stochastic && !seed_set) {
        throw ConfigError("config: seed is mandatory for stochastic experiments");
    }
}

ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "experiment") {
                cfg.experiment = experiment_kind_from_string(val);
            } else if (key == "state_spec") {
                cfg.state_spec = val;
            } else if (key == "mu") {
                cfg.mu = static_cast<unsigned>(std::stoul(val));
            } else if (key == "kappa") {
                cfg.kappa = std::stod(val);
            } else if (key == "seed") {
                cfg.seed = std::stoull(val);
                cfg.seed_set = true;
            } else if (key == "trajectories") {
                cfg.trajectories = std::stoull(val);
            } else if (key == "steps") {
                cfg.steps = std::stoull(val);
            } else if (key == "output") {
                cfg.output = val;
            } else if (key == "format") {
                if (val == "csv") cfg.format = OutputFormat::csv;
                else if (val == "json") cfg.format = OutputFormat::json;
                else throw ConfigError("config: format must be csv or json");
            } else {
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": bad value for '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    return parse_config(f);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    char buf[48];
    os << "experiment = " << to_string(cfg.experiment) << '\n';
    os << "state_spec = " << cfg.state_spec << '\n';
    os << "mu = " << cfg.mu << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", cfg.kappa);
    os << "kappa = " << buf << '\n';
    if (cfg.seed_set) os << "seed = " << cfg.seed << '\n';
    os << "trajectories = " << cfg.trajectories << '\n';
    os << "steps = " << cfg.steps << '\n';
    if (!cfg.output.empty()) os << "output = " << cfg.output << '\n';
    os << "format = " << (cfg.format == OutputFormat::csv ? "csv" : "json")
       << '\n';
    return os.str();
}

MultipartiteState parse_state_spec(const std::string& spec,
                                   const ResolutionParams& res) {
    auto [name, args] = split_call(spec);
    try {
        if (name == "bell") return make_bell();
        if (name == "ghz") {
            auto v = parse_number_list(args.empty() ? "3" : args, "ghz");
            return make_ghz(static_cast<std::size_t>(v.at(0)));
        }
        if (name == "w") {
            auto v = parse_number_list(args.empty() ? "3" : args, "w");
            return make_w(static_cast<std::size_t>(v.at(0)));
        }
        if (name == "eq1") {
            auto v = parse_number_list(args, "eq1");
            std::vector<cplx> c(v.begin(), v.end());
            return make_measurement_chain(c);
        }
        if (name == "coherent") {
            auto v = parse_number_list(args, "coherent");
            return coherent_truncation(cplx{v.at(0), 0}, res).state;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("state spec '" + spec + "': " + e.what());
    }
    // anything else is a file path
    try {
        return load_state(spec);
    } catch (const std::exception& e) {
        throw ConfigError("state spec '" + spec + "': " + e.what());
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master + 0x9E3779B97F4A7C15ull * (index + 1));
}

namespace {

TrajectoryRecord collapse_once(const MultipartiteState& state,
                               const ResolutionParams& res, std::uint64_t seed,
                               std::size_t trajectory_id) {
    std::mt19937_64 rng(seed);
    auto [post, ev] = collapse(state, res, rng, /*allow_stable=*/true);
    TrajectoryRecord rec;
    rec.trajectory_id = trajectory_id;
    rec.events.push_back(ev);
    rec.final_state = std::move(post);
    rec.final_state_digest = state_digest(rec.final_state);
    return rec;
}

}  // namespace

TrajectoryRecord run_measurement_chain(const ExperimentConfig& cfg) {
    cfg.validate();
    ResolutionParams res(cfg.mu, cfg.kappa);
    MultipartiteState state = parse_state_spec(cfg.state_spec, res);
    return collapse_once(state, res, substream_seed(cfg.seed, 0), 0);
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a - b,
                                                       Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

EnsembleReport run_ensemble(const ExperimentConfig& cfg) {
    cfg.validate();
    ResolutionParams res(cfg.mu, cfg.kappa);
    MultipartiteState state = parse_state_spec(cfg.state_spec, res);
    std::size_t dim = state.dimension();

    EnsembleReport report;
    report.trajectories = cfg.trajectories;
    Eigen::MatrixXcd empirical = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < cfg.trajectories; ++i) {
        TrajectoryRecord rec =
            collapse_once(state, res, substream_seed(cfg.seed, i), i);
        std::size_t outcome = rec.events.front().outcome_index;
        if (outcome >= report.outcome_counts.size()) {
            report.outcome_counts.resize(outcome + 1, 0);
        }
        ++report.outcome_counts[outcome];
        Eigen::Map<const Eigen::VectorXcd> v(
            rec.final_state.amplitudes.data(), static_cast<Eigen::Index>(dim));
        empirical.noalias() += v * v.adjoint();
        report.records.push_back(std::move(rec));
    }
    empirical /= static_cast<double>(cfg.trajectories);

    // analytic decohered mixture of the ideal collapse outcomes
    Eigen::MatrixXcd mixture = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    if (auto form = single_index_form(state)) {
        std::vector<double> probs = born_probabilities(*form);
        std::size_t n = state.num_parties();
        for (std::size_t j = 0; j < probs.size(); ++j) {
            Eigen::VectorXcd v = form->party_vectors[0][j];
            for (std::size_t k = 1; k < n; ++k) {
                Eigen::VectorXcd w(v.size() * form->party_vectors[k][j].size());
                Eigen::Index idx = 0;
                for (Eigen::Index a = 0; a < v.size(); ++a) {
                    for (Eigen::Index b = 0; b < form->party_vectors[k][j].size();
                         ++b) {
                        w[idx++] = v[a] * form->party_vectors[k][j][b];
                    }
                }
                v = std::move(w);
            }
            mixture.noalias() += probs[j] * (v * v.adjoint());
        }
    } else {
        throw std::domain_error(
            "run_ensemble: state has no single-index form, no analytic "
            "decohered mixture to compare against");
    }
    report.trace_distance = trace_distance(empirical, mixture);
    return report;
}

EntanglementReport analyze(const ExperimentConfig& cfg) {
    cfg.validate();
    ResolutionParams res(cfg.mu, cfg.kappa);
    MultipartiteState state = parse_state_spec(cfg.state_spec, res);
    return analyze_entanglement(state, res);
}

std::string trajectory_record_csv_header() {
    return "trajectory_id," + collapse_event_csv_header() + ",final_state_digest";
}

std::string trajectory_record_csv_row(const TrajectoryRecord& rec) {
    std::ostringstream os;
    char hex[24];
    for (const CollapseEvent& ev : rec.events) {
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(rec.final_state_digest));
        os << rec.trajectory_id << ',' << collapse_event_csv_row(ev) << ','
           << hex;
    }
    return os.str();
}

}  // namespace cmqm
