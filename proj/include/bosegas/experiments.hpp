#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bosegas/site_potential.hpp"

namespace bosegas {

enum class ExperimentKind { gap_law, energy_bounds, condensation, lifshitz, ls_compare };

std::string experiment_kind_name(ExperimentKind kind);
ExperimentKind experiment_kind_from_name(const std::string& name);

/// Declarative description of the obstacle profile.  "luttinger_sy" selects
/// the analytic hard-wall comparator instead of a numeric potential.
struct SiteSpec {
    std::string shape = "box"; // box | triangle | tabulated | delta | luttinger_sy
    double height = 1.0;       // box height / triangle peak / delta weight
    double support_left = 0.5;
    double support_right = 0.5;
    std::vector<double> table; // tabulated samples
    double strength = 1.0;     // fixed scale, or ladder multiplier
    bool strength_log_ladder = false; // true: S_N = strength * ln N
};

bool site_is_comparator(const SiteSpec& spec);
double strength_for_size(const SiteSpec& spec, long n);
SingleSitePotential make_site_potential(const SiteSpec& spec, long n);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::gap_law;
    double rate = 1.0;
    double density = 1.0;
    double beta = 1.0;
    SiteSpec site;
    std::vector<long> sizes{250, 500, 1000, 2000};
    long trials = 100;
    double zeta1 = 0.5;
    double zeta2 = 0.25;
    double eps_window = 0.0; // 0: per-trial 1.001 * E2
    std::vector<double> thresholds{0.5, 1.0, 2.0};
    std::vector<int> gap_indices{2, 5, 10};
    std::uint64_t master_seed = 1;
    double grid_resolution = 0.0; // 0: automatic rule
    std::string out_dir = "out";
    int threads = 1;

    // tuning knobs (config-visible, sane defaults)
    long iid_samples = 1000;        // sample size of the iid-exponential surrogate
    double eig_tol = 1e-9;          // bracket tolerance for leading eigenvalues
    double tail_eig_tol = 1e-6;     // bracket tolerance for occupation-tail levels
    double mu_tol = 1e-10;          // chemical-potential residual tolerance
    double prob_slack = 0.01;       // finite-size slack on probability checks
    double eig_slack = 10.0;        // eigenvalue assertions use (1 +- eig_slack*h^2)
    int eigen_count = 5;            // leading levels per realization
    double window_a = 0.0;          // lower-bound test window (0: support_right/2)
    double window_b = 0.0;          // lower-bound test window (0: support_left/2)
    std::vector<double> strength_ladder{10.0, 100.0, 1000.0, 10000.0};
    double fit_floor = 1e-6;        // IDS level that opens the fit window
    double fit_window_lo = 0.0;     // 0: automatic lowest populated decade
    double fit_window_hi = 0.0;
    double ids_grid_lo = 1e-3;
    double ids_grid_hi = 4.0;
    int ids_grid_per_decade = 16;
    double quad_tol = 1e-6;         // dual-quadrature agreement tolerance
};

/// Validate ranges and cross-field constraints; throws InvalidParameter.
void validate_config(const ExperimentConfig& cfg);

/// Parse the flat key = value configuration format ([section] headers are
/// organizational; keys are globally unique).  Unknown or duplicate keys and
/// malformed values raise InvalidParameter naming the line.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Serialize a resolved configuration back to the same format (config.echo).
std::string serialize_config(const ExperimentConfig& cfg);

/// One CSV row per trial; inapplicable numeric fields hold NaN.
struct TrialRow {
    std::uint64_t seed = 0;
    long size = 0;     // N (0 for rows not tied to a box size)
    double length = 0; // L
    double strength = 0;
    double l1 = 0, l2 = 0;
    std::array<double, 5> levels{}; // E1..E5
    double mu = 0, n1_frac = 0, n2_frac = 0, band_frac = 0;
    std::string flags; // semicolon-separated key=value tokens
};

struct AssertionTally {
    long held = 0, vacuous = 0, violated = 0, solver_failed = 0;
    long total() const { return held + vacuous + violated + solver_failed; }
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialRow> rows;
    std::map<std::string, AssertionTally> tallies;
    std::string aggregates_json; // serialized aggregate payload (sorted keys)
    std::string tool_version;
    std::string timestamp;
    double wall_seconds = 0.0;
};

/// Run the experiment described by the config (dispatches on kind).
/// Deterministic: rows and aggregates depend only on (config, master_seed).
ExperimentReport run_experiment(const ExperimentConfig& cfg);

ExperimentReport run_gap_law(const ExperimentConfig& cfg);
ExperimentReport run_energy_bounds(const ExperimentConfig& cfg);
ExperimentReport run_condensation(const ExperimentConfig& cfg);
ExperimentReport run_lifshitz(const ExperimentConfig& cfg);
ExperimentReport run_ls_compare(const ExperimentConfig& cfg);

/// Serialize rows as trials.csv content (stable header, round-trip numbers).
std::string trials_csv(const ExperimentReport& report);

/// Serialize the summary.json content.  The top-level "timestamp" field is
/// the only non-deterministic part.
std::string summary_json(const ExperimentReport& report);

/// Write trials.csv, summary.json and config.echo under
/// <out_dir>/<kind>-<timestamp>[-n]/ and return the directory path.
std::filesystem::path write_report(const ExperimentReport& report);

} // namespace bosegas
