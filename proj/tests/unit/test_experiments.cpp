#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "bosegas/errors.hpp"
#include "bosegas/experiments.hpp"

using namespace bosegas;
using nlohmann::json;

namespace {

ExperimentConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_config(in);
}

json aggregates_of(const ExperimentReport& report) {
    return json::parse(report.aggregates_json);
}

} // namespace

TEST_CASE("config parsing covers every key and round-trips") {
    const std::string text = R"(
# full configuration exercising the whole key set
[experiment]
kind = energy_bounds
rate = 1.5
density = 0.75
beta = 2.0
sizes = 10, 20, 40
trials = 7
seed = 99
threads = 2
out_dir = /tmp/somewhere

[site]
shape = triangle
height = 3.5
support_left = 0.25
support_right = 0.125
strength = 4
strength_log_ladder = true

[analysis]
zeta1 = 0.6
zeta2 = 0.2
eps_window = 0.5
thresholds = 0.5, 1.5
gap_indices = 2, 4
grid_resolution = 0.02
iid_samples = 250
eig_tol = 1e-8
tail_eig_tol = 1e-5
mu_tol = 1e-9
prob_slack = 0.02
eig_slack = 5
eigen_count = 4
window_a = 0.1
window_b = 0.05
strength_ladder = 10, 100
fit_floor = 1e-4
fit_window_lo = 0.2
fit_window_hi = 0.8
ids_grid_lo = 0.01
ids_grid_hi = 2
ids_grid_per_decade = 8
quad_tol = 1e-7
)";
    const ExperimentConfig cfg = parse_text(text);
    CHECK(cfg.kind == ExperimentKind::energy_bounds);
    CHECK(cfg.rate == 1.5);
    CHECK(cfg.density == 0.75);
    CHECK(cfg.beta == 2.0);
    CHECK(cfg.sizes == std::vector<long>{10, 20, 40});
    CHECK(cfg.trials == 7);
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.threads == 2);
    CHECK(cfg.out_dir == "/tmp/somewhere");
    CHECK(cfg.site.shape == "triangle");
    CHECK(cfg.site.height == 3.5);
    CHECK(cfg.site.support_left == 0.25);
    CHECK(cfg.site.support_right == 0.125);
    CHECK(cfg.site.strength == 4.0);
    CHECK(cfg.site.strength_log_ladder);
    CHECK(cfg.zeta1 == 0.6);
    CHECK(cfg.zeta2 == 0.2);
    CHECK(cfg.eps_window == 0.5);
    CHECK(cfg.thresholds == std::vector<double>{0.5, 1.5});
    CHECK(cfg.gap_indices == std::vector<int>{2, 4});
    CHECK(cfg.grid_resolution == 0.02);
    CHECK(cfg.iid_samples == 250);
    CHECK(cfg.eig_tol == 1e-8);
    CHECK(cfg.tail_eig_tol == 1e-5);
    CHECK(cfg.mu_tol == 1e-9);
    CHECK(cfg.prob_slack == 0.02);
    CHECK(cfg.eig_slack == 5.0);
    CHECK(cfg.eigen_count == 4);
    CHECK(cfg.window_a == 0.1);
    CHECK(cfg.window_b == 0.05);
    CHECK(cfg.strength_ladder == std::vector<double>{10.0, 100.0});
    CHECK(cfg.fit_floor == 1e-4);
    CHECK(cfg.fit_window_lo == 0.2);
    CHECK(cfg.fit_window_hi == 0.8);
    CHECK(cfg.ids_grid_lo == 0.01);
    CHECK(cfg.ids_grid_hi == 2.0);
    CHECK(cfg.ids_grid_per_decade == 8);
    CHECK(cfg.quad_tol == 1e-7);
    CHECK_NOTHROW(validate_config(cfg));

    // serialize -> parse is the identity on the fields above
    const ExperimentConfig again = parse_text(serialize_config(cfg));
    CHECK(again.kind == cfg.kind);
    CHECK(again.sizes == cfg.sizes);
    CHECK(again.site.shape == cfg.site.shape);
    CHECK(again.site.strength == cfg.site.strength);
    CHECK(again.master_seed == cfg.master_seed);
    CHECK(again.strength_ladder == cfg.strength_ladder);
    CHECK(again.fit_window_hi == cfg.fit_window_hi);
    CHECK(again.eig_tol == cfg.eig_tol);
}

TEST_CASE("config parser reports the offending line") {
    CHECK_THROWS_WITH_AS(parse_text("kind = gap_law\nkind = lifshitz\n"),
                         doctest::Contains("duplicate key"), InvalidParameter);
    CHECK_THROWS_WITH_AS(parse_text("kind = gap_law\nwibble = 3\n"),
                         doctest::Contains("unknown key"), InvalidParameter);
    CHECK_THROWS_WITH_AS(parse_text("kind = gap_law\njust some words\n"),
                         doctest::Contains("line 2"), InvalidParameter);
    CHECK_THROWS_AS(parse_text("kind = gap_law\ntrials = many\n"), InvalidParameter);
    CHECK_THROWS_AS(parse_text("kind = nonsense\n"), InvalidParameter);
}

TEST_CASE("config validation rejects out-of-range knobs") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::gap_law;
    CHECK_NOTHROW(validate_config(cfg));

    ExperimentConfig bad = cfg;
    bad.zeta1 = 0.2; // zeta2 defaults to 0.25 > zeta1
    CHECK_THROWS_AS(validate_config(bad), InvalidParameter);
    bad = cfg;
    bad.sizes = {500, 250};
    CHECK_THROWS_AS(validate_config(bad), InvalidParameter);
    bad = cfg;
    bad.sizes = {1, 4};
    CHECK_THROWS_AS(validate_config(bad), InvalidParameter);
    bad = cfg;
    bad.trials = 0;
    CHECK_THROWS_AS(validate_config(bad), InvalidParameter);
    bad = cfg;
    bad.eigen_count = 6;
    CHECK_THROWS_AS(validate_config(bad), InvalidParameter);
    bad = cfg;
    bad.site.shape = "dodecahedron";
    CHECK_THROWS_AS(validate_config(bad), InvalidParameter);
    bad = cfg;
    bad.strength_ladder = {};
    CHECK_THROWS_AS(validate_config(bad), InvalidParameter);
}

TEST_CASE("per-size strength resolution") {
    SiteSpec site;
    site.shape = "box";
    site.strength = 10.0;
    CHECK(strength_for_size(site, 50) == 10.0);

    site.strength_log_ladder = true;
    CHECK(strength_for_size(site, 50) == doctest::Approx(10.0 * std::log(50.0)));
    CHECK_THROWS_AS(strength_for_size(site, 1), InvalidParameter);
}

TEST_CASE("experiment kind names round-trip") {
    for (ExperimentKind kind : {ExperimentKind::gap_law, ExperimentKind::energy_bounds,
                                ExperimentKind::condensation, ExperimentKind::lifshitz,
                                ExperimentKind::ls_compare}) {
        CHECK(experiment_kind_from_name(experiment_kind_name(kind)) == kind);
    }
    CHECK_THROWS_AS(experiment_kind_from_name("bogus"), InvalidParameter);
}

TEST_CASE("gap-law run: exact zero-threshold tail and monotone deep gaps") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::gap_law;
    cfg.rate = 1.0;
    cfg.density = 1.0;
    cfg.sizes = {120};
    cfg.trials = 150;
    cfg.iid_samples = 40;
    cfg.thresholds = {0.0, 1.0};
    cfg.gap_indices = {2, 3};
    cfg.master_seed = 9;

    const ExperimentReport report = run_experiment(cfg);
    CHECK(report.rows.size() == 300); // 150 iid + 150 box
    const json agg = aggregates_of(report);

    // threshold 0: the top two gaps are distinct almost surely
    CHECK(agg["iid"]["tails"][0]["c"] == 0.0);
    CHECK(agg["iid"]["tails"][0]["freq"] == 1.0);
    CHECK(agg["iid"]["tails"][0]["exact"] == 1.0);
    CHECK(agg["box"][0]["tails"][0]["freq"] == 1.0);

    // iid tail at c=1 within the CLT band of the closed form
    const double freq = agg["iid"]["tails"][1]["freq"].get<double>();
    const double exact = agg["iid"]["tails"][1]["exact"].get<double>();
    const double hw = agg["iid"]["tails"][1]["half_width"].get<double>();
    CHECK(std::abs(freq - exact) <= hw);

    // l1 - l_j grows with j, so deeper-gap tails dominate shallower ones
    const json deep = agg["box"][0]["gap_index_tails"];
    REQUIRE(deep.size() == 4); // 2 indices x 2 thresholds
    for (int c_idx = 0; c_idx < 2; ++c_idx) {
        const double f2 = deep[c_idx]["freq"].get<double>();
        const double f3 = deep[2 + c_idx]["freq"].get<double>();
        CHECK(f3 >= f2);
    }

    CHECK(agg["box"][0].contains("vanishing"));
    CHECK(agg["box"][0]["vanishing"]["c"].get<double>() ==
          doctest::Approx(1.0 / std::log(120.0)));

    // deterministic across worker counts and repeats
    ExperimentConfig threaded = cfg;
    threaded.threads = 3;
    const ExperimentReport again = run_experiment(threaded);
    CHECK(trials_csv(report) == trials_csv(again));
    CHECK(report.aggregates_json == again.aggregates_json);
}

TEST_CASE("energy-bounds run: assertions hold and tallies partition") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::energy_bounds;
    cfg.rate = 1.0;
    cfg.density = 1.0;
    cfg.sizes = {60};
    cfg.trials = 25;
    cfg.master_seed = 21;
    cfg.site.shape = "box";
    cfg.site.height = 1.0;
    cfg.site.support_left = 0.5;
    cfg.site.support_right = 0.5;
    cfg.strength_ladder = {1e6};

    const ExperimentReport report = run_experiment(cfg);
    REQUIRE_FALSE(report.tallies.empty());
    for (const auto& [key, t] : report.tallies) {
        CHECK(t.total() == 25);
        if (key.rfind("e1_upper", 0) == 0 || key.rfind("neumann_lower", 0) == 0 ||
            key.rfind("bracket", 0) == 0 || key.rfind("control_levels", 0) == 0) {
            CHECK(t.violated == 0);
            CHECK(t.solver_failed == 0);
        }
    }
    // the zero-strength control rung reproduces the free spectrum
    const json agg = aggregates_of(report);
    CHECK(agg["ladder"][0]["control_max_rel_err"].get<double>() <= 1e-3);
    // strength 0 is prepended to the requested ladder
    CHECK(agg["ladder"][0]["rungs"].size() == 2);
}

TEST_CASE("condensation run (comparator): sane fractions and frozen rho_c") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::condensation;
    cfg.rate = 1.0;
    cfg.density = 0.19242098325169763; // 2x the hard-wall critical density
    cfg.beta = 1.0;
    cfg.sizes = {80, 160};
    cfg.trials = 40;
    cfg.master_seed = 4;
    cfg.site.shape = "luttinger_sy";

    const ExperimentReport report = run_experiment(cfg);
    CHECK(report.rows.size() == 80);
    for (const TrialRow& row : report.rows) {
        CHECK(row.n1_frac >= 0.0);
        CHECK(row.n1_frac <= 1.0);
        CHECK(row.band_frac >= row.n1_frac - 1e-12);
        CHECK(row.band_frac <= 1.0);
        CHECK(row.mu < row.levels[0]);
    }
    const json agg = aggregates_of(report);
    CHECK(agg["rho_c_ref"].get<double>() ==
          doctest::Approx(0.0962104916258488165104).epsilon(1e-6));
    CHECK(agg["comparator"].get<bool>());
    CHECK_FALSE(agg["subcritical"].get<bool>());
    REQUIRE(agg["ladder"].size() == 2);
    for (const auto& entry : agg["ladder"]) {
        CHECK(entry["solver_failures"].get<long>() == 0);
        CHECK(entry["median_n1_frac"].get<double>() > 0.0);
        CHECK(entry["median_n1_frac"].get<double>() < 1.0);
    }
}

TEST_CASE("condensation run (numeric site): event flags and solved pipeline") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::condensation;
    cfg.rate = 1.0;
    cfg.density = 0.5;
    cfg.beta = 1.0;
    cfg.sizes = {60};
    cfg.trials = 10;
    cfg.master_seed = 6;
    cfg.site.shape = "box";
    cfg.site.height = 1.0;
    cfg.site.support_left = 0.5;
    cfg.site.support_right = 0.5;
    cfg.site.strength = 2.0;

    const ExperimentReport report = run_experiment(cfg);
    CHECK(report.rows.size() == 10);
    for (const TrialRow& row : report.rows) {
        CHECK(row.strength == 2.0);
        CHECK(row.flags.find("event2=") != std::string::npos);
        CHECK(row.n1_frac > 0.0);
    }
    const json agg = aggregates_of(report);
    CHECK_FALSE(agg["comparator"].get<bool>());
    CHECK(agg["ladder"][0]["event2"]["freq"].get<double>() >= 0.0);
    CHECK(agg["ladder"][0]["event2"]["freq"].get<double>() <= 1.0);
}

TEST_CASE("ls-compare run: hard-wall limit of point obstacles") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::ls_compare;
    cfg.rate = 1.0;
    cfg.density = 1.0;
    cfg.sizes = {100};
    cfg.trials = 30;
    cfg.master_seed = 12;
    cfg.site.shape = "delta";
    cfg.site.height = 1.0;
    cfg.strength_ladder = {10.0, 100.0, 1000.0};

    const ExperimentReport report = run_experiment(cfg);
    const json agg = aggregates_of(report);

    // per-level deviation from the hard-wall comparator decreases with S
    REQUIRE(agg["ladder"].size() == 3);
    double previous = 1e9;
    for (const auto& entry : agg["ladder"]) {
        const double dev = entry["mean_rel_dev_e1"].get<double>();
        CHECK(dev < previous);
        previous = dev;
        CHECK(entry["solved"].get<long>() == 30);
    }
    CHECK(agg["monotone_mean_dev_e1"].get<bool>());
    CHECK(agg["empty_control_max_rel_err"].get<double>() <= 1e-3);

    // point obstacles sit below the hard-wall spectrum at every strength
    for (const auto& [key, t] : report.tallies) {
        CHECK(t.violated == 0);
        CHECK(t.solver_failed == 0);
    }
}

TEST_CASE("lifshitz run: analytic control fit is tight") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::lifshitz;
    cfg.rate = 1.0;
    cfg.density = 1.0;
    cfg.sizes = {400};
    cfg.trials = 8;
    cfg.master_seed = 17;
    cfg.site.shape = "box";
    cfg.site.height = 1.0;
    cfg.site.support_left = 0.5;
    cfg.site.support_right = 0.5;
    cfg.site.strength = 100.0;

    const ExperimentReport report = run_experiment(cfg);
    const json agg = aggregates_of(report);
    CHECK(agg["analytic"]["rel_err"].get<double>() <= 1e-3);
    CHECK(agg["ensemble"]["trials"].get<long>() == 8);
    const auto values = agg["ids"]["values"].get<std::vector<double>>();
    REQUIRE(values.size() >= 8);
    for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i] >= values[i - 1]);

    // determinism across worker counts, including the aggregate payload
    ExperimentConfig threaded = cfg;
    threaded.threads = 3;
    const ExperimentReport again = run_experiment(threaded);
    CHECK(trials_csv(report) == trials_csv(again));
    json s1 = json::parse(summary_json(report));
    json s2 = json::parse(summary_json(again));
    s1.erase("timestamp");
    s2.erase("timestamp");
    CHECK(s1.dump() == s2.dump());
}

TEST_CASE("run_* entry points verify the config kind") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::gap_law;
    CHECK_THROWS_AS(run_lifshitz(cfg), InvalidParameter);
    CHECK_THROWS_AS(run_condensation(cfg), InvalidParameter);
    cfg.kind = ExperimentKind::condensation;
    CHECK_THROWS_AS(run_gap_law(cfg), InvalidParameter);
}

TEST_CASE("report writing: files, unique directories, echo round-trip") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::gap_law;
    cfg.rate = 1.0;
    cfg.density = 1.0;
    cfg.sizes = {30};
    cfg.trials = 5;
    cfg.iid_samples = 10;
    cfg.master_seed = 31;
    const auto base = std::filesystem::temp_directory_path() / "bosegas_report_test";
    std::filesystem::remove_all(base);
    cfg.out_dir = base.string();

    const ExperimentReport report = run_experiment(cfg);
    const std::filesystem::path dir = write_report(report);
    CHECK(std::filesystem::exists(dir / "trials.csv"));
    CHECK(std::filesystem::exists(dir / "summary.json"));
    CHECK(std::filesystem::exists(dir / "config.echo"));

    // summary parses and carries the pinned top-level fields
    std::ifstream summary_in(dir / "summary.json");
    const json summary = json::parse(summary_in);
    CHECK(summary["kind"] == "gap_law");
    CHECK(summary.contains("timestamp"));
    CHECK(summary["config"]["seed"].get<std::uint64_t>() == 31);
    CHECK_FALSE(summary["config"].contains("threads"));
    CHECK(summary["trial_rows"].get<long>() == 10);

    // the csv header is stable
    std::ifstream csv_in(dir / "trials.csv");
    std::string header;
    std::getline(csv_in, header);
    CHECK(header == "seed,N,L,S,l1,l2,E1,E2,E3,E4,E5,mu,n1_frac,n2_frac,band_frac,flags");

    // the config echo reparses to an equivalent configuration
    std::ifstream echo_in(dir / "config.echo");
    const ExperimentConfig echoed = parse_experiment_config(echo_in);
    CHECK(echoed.kind == cfg.kind);
    CHECK(echoed.sizes == cfg.sizes);
    CHECK(echoed.master_seed == cfg.master_seed);
    CHECK(echoed.trials == cfg.trials);

    // a second write never clobbers the first
    const std::filesystem::path dir2 = write_report(report);
    CHECK(dir2 != dir);
    CHECK(std::filesystem::exists(dir2 / "summary.json"));
    std::filesystem::remove_all(base);
}
