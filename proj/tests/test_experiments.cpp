#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cmqm/experiments.hpp"
#include "cmqm/dynamics.hpp"
#include "cmqm/hilbert.hpp"
#include "testutil.hpp"

using namespace cmqm;

namespace {

ExperimentConfig chain_config(const std::string& coeffs, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::measurement_chain;
    cfg.state_spec = "eq1(" + coeffs + ")";
    cfg.mu = 50;
    cfg.seed = seed;
    cfg.seed_set = true;
    return cfg;
}

}  // namespace

TEST_CASE("config round-trip: parse of serialize of parse is stable") {
    std::string text =
        "# comment line\n"
        "experiment = ensemble\n"
        "state_spec = eq1(0.6,0.8)\n"
        "mu = 24\n"
        "kappa = 0.75\n"
        "seed = 12345\n"
        "trajectories = 32\n"
        "steps = 4\n"
        "format = json\n";
    std::istringstream is(text);
    ExperimentConfig a = parse_config(is);
    std::istringstream is2(serialize_config(a));
    ExperimentConfig b = parse_config(is2);
    CHECK(serialize_config(a) == serialize_config(b));
    CHECK(b.experiment == ExperimentKind::ensemble);
    CHECK(b.mu == 24u);
    CHECK(b.kappa == 0.75);
    CHECK(b.seed == 12345u);
    CHECK(b.trajectories == 32u);
    CHECK(b.format == OutputFormat::json);
}

TEST_CASE("config parsing fails fast on bad input") {
    auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return parse_config(is);
    };
    CHECK_THROWS_AS(parse("experiment = ensemble\nunknown_key = 1\nseed = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse("experiment = ensemble\n"), ConfigError);  // no seed
    CHECK_THROWS_AS(parse("experiment = waffle\nseed = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("mu = banana\n"), ConfigError);
    CHECK_THROWS_AS(parse("experiment = analyze\nkappa = 2.0\n"), ConfigError);
    CHECK_THROWS_AS(parse("experiment = analyze\nmu = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("this line has no equals sign\n"), ConfigError);
}

TEST_CASE("state specs build the advertised presets") {
    ResolutionParams res(50);
    CHECK(parse_state_spec("bell", res).dims == std::vector<std::size_t>{2, 2});
    CHECK(parse_state_spec("ghz(4)", res).dims ==
          std::vector<std::size_t>(4, 2));
    CHECK(parse_state_spec("w(3)", res).amplitudes.size() == 8);
    MultipartiteState chain = parse_state_spec("eq1(0.6,0.8)", res);
    CHECK(chain.dims == std::vector<std::size_t>{2, 2, 2});
    CHECK(std::norm(chain.amplitudes[7]) == doctest::Approx(0.64).epsilon(1e-12));
    MultipartiteState coh = parse_state_spec("coherent(2)", res);
    CHECK(coh.dims.size() == 1);
    CHECK(coh.dims[0] == coherent_truncation(cplx{2, 0}, res).n_r);
    CHECK(parse_state_spec("coherent(2)", ResolutionParams(100)).dims ==
          std::vector<std::size_t>{45});

    CHECK_THROWS_AS(parse_state_spec("eq1(a,b)", res), ConfigError);
    CHECK_THROWS_AS(parse_state_spec("ghz(4", res), ConfigError);
    CHECK_THROWS_AS(parse_state_spec("/no/such/file", res), ConfigError);
}

TEST_CASE("state specs load serialized states from files") {
    std::string path = "test_state_roundtrip.tmp";
    MultipartiteState s = make_basis_state({2, 2, 2, 2}, 0b0101);
    save_state(path, s);
    MultipartiteState back = parse_state_spec(path, ResolutionParams(50));
    CHECK(back.dims == s.dims);
    CHECK(state_digest(back) == state_digest(s));
    std::remove(path.c_str());
}

TEST_CASE("substreams are deterministic and decorrelated") {
    CHECK(substream_seed(42, 0) == substream_seed(42, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        seen.insert(substream_seed(42, i));
    }
    CHECK(seen.size() == 1000);  // no collisions across the ensemble
    CHECK(substream_seed(42, 0) != substream_seed(43, 0));
}

TEST_CASE("run_measurement_chain records the sampled outcome") {
    TrajectoryRecord det = run_measurement_chain(chain_config("1,0", 7));
    REQUIRE(det.events.size() == 1);
    CHECK(det.events[0].outcome_index == 0);
    CHECK(det.events[0].born_probability == doctest::Approx(1.0).epsilon(1e-12));

    TrajectoryRecord sym = run_measurement_chain(
        chain_config("0.70710678118654752,0.70710678118654752", 7));
    CHECK((sym.events[0].outcome_index == 0 || sym.events[0].outcome_index == 1));
    CHECK(sym.events[0].born_probability == doctest::Approx(0.5).epsilon(1e-10));

    // digest reproducibility across repeated runs of one config
    ExperimentConfig cfg = chain_config("0.54772255750516611,0.83666002653407556", 99);
    TrajectoryRecord r1 = run_measurement_chain(cfg);
    TrajectoryRecord r2 = run_measurement_chain(cfg);
    CHECK(r1.final_state_digest == r2.final_state_digest);
    CHECK(trajectory_record_csv_row(r1) == trajectory_record_csv_row(r2));
}

TEST_CASE("ensemble CSV output is byte-identical across runs") {
    ExperimentConfig cfg = chain_config("0.6,0.8", 1234);
    cfg.experiment = ExperimentKind::ensemble;
    cfg.trajectories = 16;
    auto render = [&]() {
        EnsembleReport rep = run_ensemble(cfg);
        std::ostringstream os;
        os << trajectory_record_csv_header() << '\n';
        for (const auto& rec : rep.records) {
            os << trajectory_record_csv_row(rec) << '\n';
        }
        return os.str();
    };
    CHECK(render() == render());
}

TEST_CASE("single-trajectory ensemble distance matches direct computation") {
    ExperimentConfig cfg = chain_config("0.6,0.8", 5);
    cfg.experiment = ExperimentKind::ensemble;
    cfg.trajectories = 1;
    EnsembleReport rep = run_ensemble(cfg);
    REQUIRE(rep.records.size() == 1);

    // recompute: |post><post| against the decohered 0.36/0.64 chain mixture
    const MultipartiteState& post = rep.records[0].final_state;
    Eigen::Map<const Eigen::VectorXcd> v(post.amplitudes.data(), 8);
    Eigen::MatrixXcd emp = v * v.adjoint();
    Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(8, 8);
    mix(0, 0) = 0.36;
    mix(7, 7) = 0.64;
    CHECK(rep.trace_distance ==
          doctest::Approx(trace_distance(emp, mix)).epsilon(1e-10));
    // single projector vs mixture: distance = 1 - the outcome's weight
    double outcome_p = rep.records[0].events[0].outcome_index == 0 ? 0.36 : 0.64;
    CHECK(rep.trace_distance == doctest::Approx(1.0 - outcome_p).epsilon(1e-9));
}

TEST_CASE("deterministic chains have zero ensemble distance") {
    ExperimentConfig cfg = chain_config("1,0", 77);
    cfg.experiment = ExperimentKind::ensemble;
    for (std::size_t m : {1u, 10u, 50u}) {
        cfg.trajectories = m;
        EnsembleReport rep = run_ensemble(cfg);
        CHECK(rep.trace_distance < 1e-9);
        CHECK(rep.outcome_counts[0] == m);
    }
}

TEST_CASE("ensemble distance shrinks with the trajectory count") {
    // averaged over master seeds, M = 1000 beats M = 100 (1/sqrt(M) trend)
    double mean_small = 0, mean_large = 0;
    const int seeds = 6;
    for (int s = 0; s < seeds; ++s) {
        ExperimentConfig cfg = chain_config("0.54772255750516611,0.83666002653407556",
                                            9000 + static_cast<std::uint64_t>(s));
        cfg.experiment = ExperimentKind::ensemble;
        cfg.trajectories = 100;
        mean_small += run_ensemble(cfg).trace_distance;
        cfg.trajectories = 1000;
        mean_large += run_ensemble(cfg).trace_distance;
    }
    CHECK(mean_large / seeds < mean_small / seeds);
}

TEST_CASE("analyze wraps the entanglement report") {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::analyze;
    cfg.state_spec = "ghz(3)";
    cfg.mu = 10;
    EntanglementReport rep = analyze(cfg);
    CHECK(rep.chi == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(rep.stable);

    cfg.state_spec = "bell";
    CHECK(analyze(cfg).xi == doctest::Approx(2.0).epsilon(1e-9));

    std::string path = "test_analyze_state.tmp";
    save_state(path, make_basis_state({2, 2, 2, 2}, 0b0101));
    cfg.state_spec = path;
    CHECK(analyze(cfg).chi == 0.0);
    std::remove(path.c_str());
}
