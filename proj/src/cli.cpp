#include "bosegas/cli.hpp"

#include <cstdlib>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "bosegas/errors.hpp"
#include "bosegas/experiments.hpp"
#include "bosegas/format.hpp"
#include "bosegas/operators.hpp"
#include "bosegas/point_process.hpp"
#include "bosegas/thermo.hpp"
#include "bosegas/version.hpp"

namespace bosegas {

namespace {

struct SingleRealizationArgs {
    double rate = 1.0;
    double box_length = 100.0;
    std::uint64_t seed = 1;
    std::string shape = "box";
    double height = 1.0;
    double support_left = 0.5;
    double support_right = 0.5;
    double strength = 1.0;
    int levels = 5;
    std::string boundary = "dirichlet";
    double grid_resolution = 0.0;
    bool seed_given = false;
};

std::uint64_t parse_seed_value(const std::string& text) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw InvalidParameter("bad seed value: " + text);
    }
}

/// flag > environment > file/default.
std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value, std::uint64_t fallback) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("BOSEGAS_SEED")) return parse_seed_value(env);
    return fallback;
}

SingleSitePotential site_from_args(const SingleRealizationArgs& a) {
    SiteSpec spec;
    spec.shape = a.shape;
    spec.height = a.height;
    spec.support_left = a.support_left;
    spec.support_right = a.support_right;
    spec.strength = a.strength;
    return make_site_potential(spec, 2);
}

BoundaryCondition boundary_from_name(const std::string& name) {
    if (name == "dirichlet") return BoundaryCondition::dirichlet;
    if (name == "neumann") return BoundaryCondition::neumann;
    throw InvalidParameter("boundary must be dirichlet or neumann, got " + name);
}

Spectrum realization_spectrum(const SingleRealizationArgs& a) {
    const std::uint64_t seed = resolve_seed(a.seed_given, a.seed, a.seed);
    const PointConfiguration config = sample_configuration(a.rate, a.box_length, seed);
    const SingleSitePotential site = site_from_args(a);
    const double h = resolve_grid_spacing(site, a.box_length, a.grid_resolution);
    const PotentialField field = assemble_potential(config, site, h);
    const DiscretizedOperator op = discretize(field, boundary_from_name(a.boundary));
    return lowest_eigenvalues(op, a.levels, 1e-9);
}

int run_sample(const SingleRealizationArgs& a, std::ostream& out) {
    const std::uint64_t seed = resolve_seed(a.seed_given, a.seed, a.seed);
    const PointConfiguration config = sample_configuration(a.rate, a.box_length, seed);
    const GapStatistics stats = clipped_gaps(config);
    out << "kind,index,value\n";
    for (std::size_t i = 0; i < config.atoms.size(); ++i)
        out << "atom," << i << ',' << format_double(config.atoms[i]) << '\n';
    for (std::size_t i = 0; i < stats.sorted_desc.size(); ++i)
        out << "gap," << i << ',' << format_double(stats.sorted_desc[i]) << '\n';
    return 0;
}

int run_spectrum(const SingleRealizationArgs& a, std::ostream& out) {
    const Spectrum spectrum = realization_spectrum(a);
    out << "index,eigenvalue\n";
    for (std::size_t j = 0; j < spectrum.size(); ++j)
        out << (j + 1) << ',' << format_double(spectrum.eigenvalues[j]) << '\n';
    return 0;
}

struct OccupancyArgs {
    SingleRealizationArgs base;
    double density = 1.0;
    double beta = 1.0;
    double mu_tol = 1e-10;
    std::vector<double> synthetic_levels;
};

int run_occupancy(const OccupancyArgs& a, std::ostream& out) {
    Spectrum spectrum;
    if (!a.synthetic_levels.empty()) {
        spectrum.eigenvalues = a.synthetic_levels;
        spectrum.grid_spacing = 0.0;
        spectrum.domain_length = a.base.box_length;
    } else {
        spectrum = realization_spectrum(a.base);
    }
    const ThermoState state = solve_thermo_state(spectrum, a.density, a.beta, a.mu_tol);
    out << "quantity,index,value\n";
    out << "mu,0," << format_double(state.chemical_potential) << '\n';
    out << "count,0," << format_int(state.particle_count) << '\n';
    for (std::size_t j = 0; j < state.occupations.size(); ++j) {
        out << "occupation," << (j + 1) << ',' << format_double(state.occupations[j]) << '\n';
    }
    for (std::size_t j = 0; j < state.occupations.size(); ++j) {
        out << "fraction," << (j + 1) << ','
            << format_double(state.occupations[j] / static_cast<double>(state.particle_count))
            << '\n';
    }
    return 0;
}

ExperimentKind kind_from_cli_name(std::string name) {
    for (char& c : name)
        if (c == '-') c = '_';
    return experiment_kind_from_name(name);
}

struct ExperimentArgs {
    std::string kind;
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 0;
    bool threads_given = false;
    std::string out_dir;
    long trials = 0;
};

int run_experiment_command(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    if (!a.config_path.empty()) cfg = load_experiment_config(a.config_path);
    cfg.kind = kind_from_cli_name(a.kind);
    cfg.master_seed = resolve_seed(a.seed_given, a.seed, cfg.master_seed);
    if (a.threads_given) cfg.threads = a.threads;
    else if (cfg.threads <= 1)
        cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
    if (a.trials > 0) cfg.trials = a.trials;
    validate_config(cfg);
    err << "running " << experiment_kind_name(cfg.kind) << ": trials=" << cfg.trials
        << " seed=" << cfg.master_seed << " threads=" << cfg.threads << '\n';
    const ExperimentReport report = run_experiment(cfg);
    const std::filesystem::path dir = write_report(report);
    err << "wall seconds: " << format_double(report.wall_seconds) << '\n';
    out << (dir / "summary.json").string() << '\n';
    return 0;
}

void add_realization_flags(CLI::App* cmd, SingleRealizationArgs& a, bool with_site) {
    cmd->add_option("--rate", a.rate, "Point process intensity");
    cmd->add_option("--box-length", a.box_length, "Box length L");
    cmd->add_option("--seed", a.seed, "Realization seed")
        ->each([&a](const std::string&) { a.seed_given = true; });
    if (with_site) {
        cmd->add_option("--shape", a.shape, "Site shape: box|triangle|tabulated|delta");
        cmd->add_option("--height", a.height, "Profile height / delta weight");
        cmd->add_option("--support-left", a.support_left, "Support extent left of the atom");
        cmd->add_option("--support-right", a.support_right, "Support extent right of the atom");
        cmd->add_option("--strength", a.strength, "Strength scale (0 switches the potential off)");
        cmd->add_option("--levels", a.levels, "Number of eigenvalues")->check(CLI::Range(1, 64));
        cmd->add_option("--boundary", a.boundary, "dirichlet|neumann");
        cmd->add_option("--grid-resolution", a.grid_resolution,
                        "Grid spacing override (0 = automatic)");
    }
}

} // namespace

CliInvocation parse_and_validate(const std::vector<std::string>& args, std::ostream& out,
                                 std::ostream& err) {
    CliInvocation invocation;
    auto app = std::make_shared<CLI::App>("Random-obstacle spectral statistics toolkit");
    app->set_version_flag("--version", std::string(kVersion));
    app->require_subcommand(1);

    auto sample_args = std::make_shared<SingleRealizationArgs>();
    CLI::App* sample = app->add_subcommand("sample", "Draw one point configuration");
    add_realization_flags(sample, *sample_args, false);

    auto spectrum_args = std::make_shared<SingleRealizationArgs>();
    CLI::App* spectrum = app->add_subcommand("spectrum", "Lowest eigenvalues of one realization");
    add_realization_flags(spectrum, *spectrum_args, true);

    auto occupancy_args = std::make_shared<OccupancyArgs>();
    CLI::App* occupancy =
        app->add_subcommand("occupancy", "Chemical potential and occupations of one realization");
    add_realization_flags(occupancy, occupancy_args->base, true);
    occupancy->add_option("--density", occupancy_args->density, "Mean particle density rho");
    occupancy->add_option("--beta", occupancy_args->beta, "Inverse temperature");
    occupancy->add_option("--mu-tol", occupancy_args->mu_tol, "Filling residual tolerance");
    occupancy->add_option("--synthetic-levels", occupancy_args->synthetic_levels,
                          "Comma-separated explicit levels (skips sampling)")
        ->delimiter(',');

    auto experiment_args = std::make_shared<ExperimentArgs>();
    CLI::App* experiment = app->add_subcommand("experiment", "Run a declarative experiment");
    experiment
        ->add_option("kind", experiment_args->kind,
                     "gap-law|energy-bounds|condensation|lifshitz|ls-compare")
        ->required();
    experiment->add_option("--config", experiment_args->config_path, "Configuration file");
    experiment->add_option("--seed", experiment_args->seed, "Master seed override")
        ->each([experiment_args](const std::string&) { experiment_args->seed_given = true; });
    experiment->add_option("--threads", experiment_args->threads, "Worker count")
        ->each([experiment_args](const std::string&) { experiment_args->threads_given = true; });
    experiment->add_option("--out-dir", experiment_args->out_dir, "Report directory root");
    experiment->add_option("--trials", experiment_args->trials, "Trial count override");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app->parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app->help();
        invocation.exit_code = 0;
        return invocation;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        invocation.exit_code = 0;
        return invocation;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        invocation.exit_code = 2;
        return invocation;
    }

    invocation.ready = true;
    if (sample->parsed()) {
        invocation.action = [app, sample_args](std::ostream& o, std::ostream&) {
            return run_sample(*sample_args, o);
        };
    } else if (spectrum->parsed()) {
        invocation.action = [app, spectrum_args](std::ostream& o, std::ostream&) {
            return run_spectrum(*spectrum_args, o);
        };
    } else if (occupancy->parsed()) {
        invocation.action = [app, occupancy_args](std::ostream& o, std::ostream&) {
            return run_occupancy(*occupancy_args, o);
        };
    } else {
        invocation.action = [app, experiment_args](std::ostream& o, std::ostream& e) {
            return run_experiment_command(*experiment_args, o, e);
        };
    }
    return invocation;
}

int execute(const CliInvocation& invocation, std::ostream& out, std::ostream& err) {
    if (!invocation.ready) return invocation.exit_code;
    try {
        return invocation.action(out, err);
    } catch (const InvalidParameter& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const PreconditionError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 1;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return execute(parse_and_validate(args, out, err), out, err);
}

} // namespace bosegas
