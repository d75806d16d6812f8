#include "bosegas/experiments.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "json.hpp"

#include "bosegas/errors.hpp"
#include "bosegas/format.hpp"
#include "bosegas/version.hpp"

namespace bosegas {

std::string trials_csv(const ExperimentReport& report) {
    std::string out = "seed,N,L,S,l1,l2,E1,E2,E3,E4,E5,mu,n1_frac,n2_frac,band_frac,flags\n";
    for (const TrialRow& r : report.rows) {
        out += format_uint(r.seed);
        out += ',';
        out += format_int(r.size);
        out += ',';
        out += format_double(r.length);
        out += ',';
        out += format_double(r.strength);
        out += ',';
        out += format_double(r.l1);
        out += ',';
        out += format_double(r.l2);
        for (double e : r.levels) {
            out += ',';
            out += format_double(e);
        }
        out += ',';
        out += format_double(r.mu);
        out += ',';
        out += format_double(r.n1_frac);
        out += ',';
        out += format_double(r.n2_frac);
        out += ',';
        out += format_double(r.band_frac);
        out += ',';
        out += r.flags; // semicolon-separated tokens, never contains commas
        out += '\n';
    }
    return out;
}

namespace {

nlohmann::json config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["kind"] = experiment_kind_name(cfg.kind);
    j["rate"] = cfg.rate;
    j["density"] = cfg.density;
    j["beta"] = cfg.beta;
    j["sizes"] = cfg.sizes;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.master_seed;
    // threads and out_dir deliberately omitted: they do not affect results,
    // and the summary must be byte-identical across worker counts.
    j["shape"] = cfg.site.shape;
    j["height"] = cfg.site.height;
    j["support_left"] = cfg.site.support_left;
    j["support_right"] = cfg.site.support_right;
    if (!cfg.site.table.empty()) j["table"] = cfg.site.table;
    j["strength"] = cfg.site.strength;
    j["strength_log_ladder"] = cfg.site.strength_log_ladder;
    j["zeta1"] = cfg.zeta1;
    j["zeta2"] = cfg.zeta2;
    j["eps_window"] = cfg.eps_window;
    j["thresholds"] = cfg.thresholds;
    j["gap_indices"] = cfg.gap_indices;
    j["grid_resolution"] = cfg.grid_resolution;
    j["iid_samples"] = cfg.iid_samples;
    j["eig_tol"] = cfg.eig_tol;
    j["tail_eig_tol"] = cfg.tail_eig_tol;
    j["mu_tol"] = cfg.mu_tol;
    j["prob_slack"] = cfg.prob_slack;
    j["eig_slack"] = cfg.eig_slack;
    j["eigen_count"] = cfg.eigen_count;
    j["window_a"] = cfg.window_a;
    j["window_b"] = cfg.window_b;
    j["strength_ladder"] = cfg.strength_ladder;
    j["fit_floor"] = cfg.fit_floor;
    j["fit_window_lo"] = cfg.fit_window_lo;
    j["fit_window_hi"] = cfg.fit_window_hi;
    j["ids_grid_lo"] = cfg.ids_grid_lo;
    j["ids_grid_hi"] = cfg.ids_grid_hi;
    j["ids_grid_per_decade"] = cfg.ids_grid_per_decade;
    j["quad_tol"] = cfg.quad_tol;
    return j;
}

} // namespace

std::string summary_json(const ExperimentReport& report) {
    nlohmann::json j; // std::map-backed: keys serialize sorted, so output is stable
    j["kind"] = experiment_kind_name(report.config.kind);
    j["tool_version"] = report.tool_version.empty() ? std::string(kVersion) : report.tool_version;
    j["config"] = config_json(report.config);
    j["trial_rows"] = report.rows.size();
    nlohmann::json tallies = nlohmann::json::object();
    for (const auto& [name, t] : report.tallies) {
        tallies[name] = {{"held", t.held},
                         {"vacuous", t.vacuous},
                         {"violated", t.violated},
                         {"solver_failed", t.solver_failed},
                         {"total", t.total()}};
    }
    j["tallies"] = tallies;
    j["aggregates"] = report.aggregates_json.empty()
                          ? nlohmann::json::object()
                          : nlohmann::json::parse(report.aggregates_json);
    // Wall time stays out of the summary so that re-runs differ only here.
    j["timestamp"] = report.timestamp;
    return j.dump(2) + "\n";
}

namespace {

std::string now_stamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d%02d%02dT%02d%02d%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalFailure("cannot open output file: " + path.string());
    out << content;
    if (!out) throw NumericalFailure("failed writing output file: " + path.string());
}

} // namespace

std::filesystem::path write_report(const ExperimentReport& report) {
    const std::string stamp = report.timestamp.empty() ? now_stamp() : report.timestamp;
    const std::filesystem::path base(report.config.out_dir);
    std::filesystem::create_directories(base);
    std::filesystem::path dir =
        base / (experiment_kind_name(report.config.kind) + "-" + stamp);
    for (int suffix = 1; std::filesystem::exists(dir); ++suffix)
        dir = base / (experiment_kind_name(report.config.kind) + "-" + stamp + "-" +
                      std::to_string(suffix));
    std::filesystem::create_directories(dir);
    write_text(dir / "trials.csv", trials_csv(report));
    write_text(dir / "summary.json", summary_json(report));
    write_text(dir / "config.echo", serialize_config(report.config));
    return dir;
}

} // namespace bosegas
