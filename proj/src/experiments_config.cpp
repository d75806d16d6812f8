#include "bosegas/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "bosegas/errors.hpp"
#include "bosegas/format.hpp"

namespace bosegas {

std::string experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::gap_law: return "gap_law";
    case ExperimentKind::energy_bounds: return "energy_bounds";
    case ExperimentKind::condensation: return "condensation";
    case ExperimentKind::lifshitz: return "lifshitz";
    case ExperimentKind::ls_compare: return "ls_compare";
    }
    throw InvalidParameter("unknown experiment kind");
}

ExperimentKind experiment_kind_from_name(const std::string& name) {
    if (name == "gap_law") return ExperimentKind::gap_law;
    if (name == "energy_bounds") return ExperimentKind::energy_bounds;
    if (name == "condensation") return ExperimentKind::condensation;
    if (name == "lifshitz") return ExperimentKind::lifshitz;
    if (name == "ls_compare") return ExperimentKind::ls_compare;
    throw InvalidParameter("unknown experiment kind: " + name);
}

bool site_is_comparator(const SiteSpec& spec) { return spec.shape == "luttinger_sy"; }

double strength_for_size(const SiteSpec& spec, long n) {
    if (!spec.strength_log_ladder) return spec.strength;
    if (n < 2) throw InvalidParameter("log-ladder strength needs size >= 2");
    return spec.strength * std::log(static_cast<double>(n));
}

SingleSitePotential make_site_potential(const SiteSpec& spec, long n) {
    const double scale = strength_for_size(spec, n);
    if (spec.shape == "box")
        return SingleSitePotential::box(spec.height, spec.support_left, spec.support_right, scale);
    if (spec.shape == "triangle")
        return SingleSitePotential::triangle(spec.height, spec.support_left, spec.support_right,
                                             scale);
    if (spec.shape == "tabulated")
        return SingleSitePotential::tabulated(spec.table, spec.support_left, spec.support_right,
                                              scale);
    if (spec.shape == "delta") return SingleSitePotential::delta_spike(spec.height, scale);
    throw InvalidParameter("site shape has no numeric potential: " + spec.shape);
}

void validate_config(const ExperimentConfig& cfg) {
    if (!(cfg.rate > 0) || !std::isfinite(cfg.rate)) throw InvalidParameter("rate must be > 0");
    if (!(cfg.density > 0) || !std::isfinite(cfg.density))
        throw InvalidParameter("density must be > 0");
    if (!(cfg.beta > 0) || !std::isfinite(cfg.beta)) throw InvalidParameter("beta must be > 0");
    if (cfg.sizes.empty()) throw InvalidParameter("sizes must be nonempty");
    for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
        if (cfg.sizes[i] < 2) throw InvalidParameter("sizes entries must be >= 2");
        if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1])
            throw InvalidParameter("sizes must be strictly ascending");
    }
    if (cfg.trials < 1) throw InvalidParameter("trials must be >= 1");
    if (!(cfg.zeta2 > 0 && cfg.zeta2 < cfg.zeta1 && cfg.zeta1 < 1))
        throw InvalidParameter("need 0 < zeta2 < zeta1 < 1");
    if (cfg.eps_window < 0) throw InvalidParameter("eps_window must be >= 0");
    if (cfg.thresholds.empty()) throw InvalidParameter("thresholds must be nonempty");
    for (double c : cfg.thresholds)
        if (!(c >= 0) || !std::isfinite(c)) throw InvalidParameter("thresholds must be >= 0");
    for (int j : cfg.gap_indices)
        if (j < 2) throw InvalidParameter("gap indices must be >= 2");
    if (cfg.grid_resolution < 0) throw InvalidParameter("grid_resolution must be >= 0");
    if (cfg.threads < 1) throw InvalidParameter("threads must be >= 1");
    if (cfg.iid_samples < 1) throw InvalidParameter("iid_samples must be >= 1");
    if (!(cfg.eig_tol > 0) || !(cfg.tail_eig_tol > 0))
        throw InvalidParameter("eigenvalue tolerances must be > 0");
    if (!(cfg.mu_tol > 0)) throw InvalidParameter("mu_tol must be > 0");
    if (cfg.prob_slack < 0 || cfg.eig_slack < 0) throw InvalidParameter("slack must be >= 0");
    if (cfg.eigen_count < 2 || cfg.eigen_count > 5)
        throw InvalidParameter("eigen_count must be in [2, 5]");
    if (cfg.window_a < 0 || cfg.window_b < 0)
        throw InvalidParameter("window half-extents must be >= 0");
    if (cfg.strength_ladder.empty()) throw InvalidParameter("strength_ladder must be nonempty");
    for (double s : cfg.strength_ladder)
        if (!(s > 0)) throw InvalidParameter("strength_ladder entries must be > 0");
    if (!(cfg.fit_floor > 0)) throw InvalidParameter("fit_floor must be > 0");
    if (cfg.fit_window_lo < 0 || cfg.fit_window_hi < 0)
        throw InvalidParameter("fit window bounds must be >= 0");
    if (!(cfg.ids_grid_lo > 0) || !(cfg.ids_grid_hi > cfg.ids_grid_lo))
        throw InvalidParameter("ids grid must satisfy 0 < lo < hi");
    if (cfg.ids_grid_per_decade < 2) throw InvalidParameter("ids_grid_per_decade must be >= 2");
    if (!(cfg.quad_tol > 0)) throw InvalidParameter("quad_tol must be > 0");

    const SiteSpec& s = cfg.site;
    if (s.shape == "luttinger_sy") {
        // analytic comparator: no potential parameters to check
    } else if (s.shape == "delta") {
        if (!(s.height > 0)) throw InvalidParameter("delta weight must be > 0");
    } else if (s.shape == "box" || s.shape == "triangle" || s.shape == "tabulated") {
        if (!(s.support_left > 0) || !(s.support_right > 0))
            throw InvalidParameter("supports must be > 0");
        if (s.shape == "tabulated" && s.table.size() < 2)
            throw InvalidParameter("tabulated profile needs >= 2 samples");
        if (s.shape != "tabulated" && !(s.height > 0))
            throw InvalidParameter("profile height must be > 0");
    } else {
        throw InvalidParameter("unknown site shape: " + s.shape);
    }
    if (!(s.strength >= 0)) throw InvalidParameter("strength must be >= 0");
    if (s.strength_log_ladder && !(s.strength > 0))
        throw InvalidParameter("log-ladder strength multiplier must be > 0");
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidParameter("bad numeric value for key '" + key + "': " + value);
    }
}

long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidParameter("bad integer value for key '" + key + "': " + value);
    }
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw InvalidParameter("bad boolean value for key '" + key + "': " + value);
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trimmed(item);
        if (item.empty()) throw InvalidParameter("empty list entry for key '" + key + "'");
        out.push_back(parse(key, item));
    }
    if (out.empty()) throw InvalidParameter("empty list for key '" + key + "'");
    return out;
}

} // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trimmed(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw InvalidParameter("line " + std::to_string(lineno) + ": unterminated section");
            continue; // sections are purely organizational
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trimmed(t.substr(0, eq));
        std::string value = trimmed(t.substr(eq + 1));
        if (key.empty())
            throw InvalidParameter("line " + std::to_string(lineno) + ": empty key");
        if (!seen.insert(key).second)
            throw InvalidParameter("line " + std::to_string(lineno) + ": duplicate key '" + key +
                                   "'");

        if (key == "kind") cfg.kind = experiment_kind_from_name(value);
        else if (key == "rate") cfg.rate = parse_number(key, value);
        else if (key == "density") cfg.density = parse_number(key, value);
        else if (key == "beta") cfg.beta = parse_number(key, value);
        else if (key == "shape") cfg.site.shape = value;
        else if (key == "height") cfg.site.height = parse_number(key, value);
        else if (key == "support_left") cfg.site.support_left = parse_number(key, value);
        else if (key == "support_right") cfg.site.support_right = parse_number(key, value);
        else if (key == "table") cfg.site.table = parse_list<double>(key, value, parse_number);
        else if (key == "strength") cfg.site.strength = parse_number(key, value);
        else if (key == "strength_log_ladder")
            cfg.site.strength_log_ladder = parse_flag(key, value);
        else if (key == "sizes") cfg.sizes = parse_list<long>(key, value, parse_integer);
        else if (key == "trials") cfg.trials = parse_integer(key, value);
        else if (key == "zeta1") cfg.zeta1 = parse_number(key, value);
        else if (key == "zeta2") cfg.zeta2 = parse_number(key, value);
        else if (key == "eps_window") cfg.eps_window = parse_number(key, value);
        else if (key == "thresholds") cfg.thresholds = parse_list<double>(key, value, parse_number);
        else if (key == "gap_indices") {
            cfg.gap_indices.clear();
            for (long j : parse_list<long>(key, value, parse_integer))
                cfg.gap_indices.push_back(static_cast<int>(j));
        } else if (key == "seed") {
            try {
                cfg.master_seed = std::stoull(value);
            } catch (const std::exception&) {
                throw InvalidParameter("bad seed value: " + value);
            }
        } else if (key == "grid_resolution") cfg.grid_resolution = parse_number(key, value);
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "threads") cfg.threads = static_cast<int>(parse_integer(key, value));
        else if (key == "iid_samples") cfg.iid_samples = parse_integer(key, value);
        else if (key == "eig_tol") cfg.eig_tol = parse_number(key, value);
        else if (key == "tail_eig_tol") cfg.tail_eig_tol = parse_number(key, value);
        else if (key == "mu_tol") cfg.mu_tol = parse_number(key, value);
        else if (key == "prob_slack") cfg.prob_slack = parse_number(key, value);
        else if (key == "eig_slack") cfg.eig_slack = parse_number(key, value);
        else if (key == "eigen_count") cfg.eigen_count = static_cast<int>(parse_integer(key, value));
        else if (key == "window_a") cfg.window_a = parse_number(key, value);
        else if (key == "window_b") cfg.window_b = parse_number(key, value);
        else if (key == "strength_ladder")
            cfg.strength_ladder = parse_list<double>(key, value, parse_number);
        else if (key == "fit_floor") cfg.fit_floor = parse_number(key, value);
        else if (key == "fit_window_lo") cfg.fit_window_lo = parse_number(key, value);
        else if (key == "fit_window_hi") cfg.fit_window_hi = parse_number(key, value);
        else if (key == "ids_grid_lo") cfg.ids_grid_lo = parse_number(key, value);
        else if (key == "ids_grid_hi") cfg.ids_grid_hi = parse_number(key, value);
        else if (key == "ids_grid_per_decade")
            cfg.ids_grid_per_decade = static_cast<int>(parse_integer(key, value));
        else if (key == "quad_tol") cfg.quad_tol = parse_number(key, value);
        else
            throw InvalidParameter("line " + std::to_string(lineno) + ": unknown key '" + key +
                                   "'");
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open config file: " + path.string());
    return parse_experiment_config(in);
}

namespace {

template <typename T, typename Fmt>
std::string join_list(const std::vector<T>& values, Fmt fmt) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt(values[i]);
    }
    return out;
}

} // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string s;
    auto num = [](double v) { return format_double(v); };
    auto integer = [](long v) { return format_int(v); };
    s += "[experiment]\n";
    s += "kind = " + experiment_kind_name(cfg.kind) + "\n";
    s += "rate = " + num(cfg.rate) + "\n";
    s += "density = " + num(cfg.density) + "\n";
    s += "beta = " + num(cfg.beta) + "\n";
    s += "sizes = " + join_list(cfg.sizes, integer) + "\n";
    s += "trials = " + format_int(cfg.trials) + "\n";
    s += "seed = " + format_uint(cfg.master_seed) + "\n";
    s += "threads = " + format_int(cfg.threads) + "\n";
    s += "out_dir = " + cfg.out_dir + "\n";
    s += "\n[site]\n";
    s += "shape = " + cfg.site.shape + "\n";
    s += "height = " + num(cfg.site.height) + "\n";
    s += "support_left = " + num(cfg.site.support_left) + "\n";
    s += "support_right = " + num(cfg.site.support_right) + "\n";
    if (!cfg.site.table.empty()) s += "table = " + join_list(cfg.site.table, num) + "\n";
    s += "strength = " + num(cfg.site.strength) + "\n";
    s += std::string("strength_log_ladder = ") +
         (cfg.site.strength_log_ladder ? "true" : "false") + "\n";
    s += "\n[analysis]\n";
    s += "zeta1 = " + num(cfg.zeta1) + "\n";
    s += "zeta2 = " + num(cfg.zeta2) + "\n";
    s += "eps_window = " + num(cfg.eps_window) + "\n";
    s += "thresholds = " + join_list(cfg.thresholds, num) + "\n";
    {
        std::vector<long> idx(cfg.gap_indices.begin(), cfg.gap_indices.end());
        s += "gap_indices = " + join_list(idx, integer) + "\n";
    }
    s += "grid_resolution = " + num(cfg.grid_resolution) + "\n";
    s += "iid_samples = " + format_int(cfg.iid_samples) + "\n";
    s += "eig_tol = " + num(cfg.eig_tol) + "\n";
    s += "tail_eig_tol = " + num(cfg.tail_eig_tol) + "\n";
    s += "mu_tol = " + num(cfg.mu_tol) + "\n";
    s += "prob_slack = " + num(cfg.prob_slack) + "\n";
    s += "eig_slack = " + num(cfg.eig_slack) + "\n";
    s += "eigen_count = " + format_int(static_cast<long>(cfg.eigen_count)) + "\n";
    s += "window_a = " + num(cfg.window_a) + "\n";
    s += "window_b = " + num(cfg.window_b) + "\n";
    s += "strength_ladder = " + join_list(cfg.strength_ladder, num) + "\n";
    s += "fit_floor = " + num(cfg.fit_floor) + "\n";
    s += "fit_window_lo = " + num(cfg.fit_window_lo) + "\n";
    s += "fit_window_hi = " + num(cfg.fit_window_hi) + "\n";
    s += "ids_grid_lo = " + num(cfg.ids_grid_lo) + "\n";
    s += "ids_grid_hi = " + num(cfg.ids_grid_hi) + "\n";
    s += "ids_grid_per_decade = " + format_int(static_cast<long>(cfg.ids_grid_per_decade)) + "\n";
    s += "quad_tol = " + num(cfg.quad_tol) + "\n";
    return s;
}

} // namespace bosegas
