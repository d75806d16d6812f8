// Python bindings for the main operations: sampling obstacle configurations,
// solving low spectra, grand-canonical occupancy, the analytic comparator,
// and running full experiment configurations from files.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "bosegas/eigensolve.hpp"
#include "bosegas/experiments.hpp"
#include "bosegas/ids.hpp"
#include "bosegas/operators.hpp"
#include "bosegas/point_process.hpp"
#include "bosegas/quadrature.hpp"
#include "bosegas/site_potential.hpp"
#include "bosegas/spectral_bounds.hpp"
#include "bosegas/thermo.hpp"

namespace py = pybind11;
using namespace bosegas;

namespace {

Spectrum solve_spectrum_impl(const PointConfiguration& config, const SingleSitePotential& site,
                             int k, double tol, double grid_override) {
    const double h = resolve_grid_spacing(site, config.box_length, grid_override);
    const PotentialField field = assemble_potential(config, site, h);
    const DiscretizedOperator op = discretize(field, BoundaryCondition::dirichlet);
    return lowest_eigenvalues(op, k, tol);
}

py::dict occupancy_dict(const Spectrum& spectrum, double density, double beta, double tol,
                        double band_eps) {
    const ThermoState state = solve_thermo_state(spectrum, density, beta, tol);
    const CondensateStats stats =
        condensate_statistics(spectrum, state.occupations, state.particle_count, band_eps);
    py::dict out;
    out["mu"] = state.chemical_potential;
    out["particle_count"] = state.particle_count;
    out["occupations"] = state.occupations;
    out["ground_fraction"] = stats.ground_fraction;
    out["second_fraction"] = stats.second_fraction;
    out["band_fraction"] = stats.band_fraction;
    return out;
}

} // namespace

PYBIND11_MODULE(_bosegas, m) {
    m.doc() = "Spectral statistics of one-dimensional gases with random soft obstacles";

    py::class_<PointConfiguration>(m, "PointConfiguration")
        .def_readonly("rate", &PointConfiguration::rate)
        .def_readonly("box_length", &PointConfiguration::box_length)
        .def_readonly("atoms", &PointConfiguration::atoms)
        .def_readonly("seed", &PointConfiguration::seed);

    py::class_<GapStatistics>(m, "GapStatistics")
        .def_readonly("gaps", &GapStatistics::gaps)
        .def_readonly("sorted_desc", &GapStatistics::sorted_desc);

    m.def("sample_configuration", &sample_configuration, py::arg("rate"), py::arg("box_length"),
          py::arg("seed"));
    m.def("clipped_gaps", &clipped_gaps, py::arg("config"));
    m.def("top_gaps", &top_gaps, py::arg("stats"), py::arg("j"));
    m.def("gap_difference_tail_exact", &gap_difference_tail_exact, py::arg("rate"),
          py::arg("c"));
    m.def("count_concentration_bound", &count_concentration_bound, py::arg("rate"),
          py::arg("box_length"), py::arg("eps"));

    py::class_<SingleSitePotential>(m, "SingleSitePotential")
        .def_static("box", &SingleSitePotential::box, py::arg("height"),
                    py::arg("support_left"), py::arg("support_right"),
                    py::arg("strength_scale") = 1.0)
        .def_static("triangle", &SingleSitePotential::triangle, py::arg("peak"),
                    py::arg("support_left"), py::arg("support_right"),
                    py::arg("strength_scale") = 1.0)
        .def_static("delta_spike", &SingleSitePotential::delta_spike, py::arg("weight"),
                    py::arg("strength_scale") = 1.0)
        .def("with_strength_scale", &SingleSitePotential::with_strength_scale,
             py::arg("strength_scale"))
        .def("strength", &SingleSitePotential::strength);

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("eigenvalues", &Spectrum::eigenvalues)
        .def_readonly("grid_spacing", &Spectrum::grid_spacing)
        .def_readonly("domain_length", &Spectrum::domain_length);

    m.def("solve_spectrum", &solve_spectrum_impl, py::arg("config"), py::arg("site"),
          py::arg("k"), py::arg("tol") = 1e-9, py::arg("grid_override") = 0.0,
          "Lowest k Dirichlet levels of -d^2/dx^2 + sum of site copies at the atoms");
    m.def(
        "luttinger_sy_eigenvalues",
        [](const PointConfiguration& config, int k) {
            return luttinger_sy_eigenvalues(clipped_gaps(config), k);
        },
        py::arg("config"), py::arg("k"),
        "Lowest k levels of the hard-wall comparator built from the clipped gaps");

    m.def(
        "solve_occupancy",
        [](const std::vector<double>& levels, double domain_length, double density, double beta,
           double tol, double band_eps) {
            Spectrum spectrum;
            spectrum.eigenvalues = levels;
            spectrum.domain_length = domain_length;
            return occupancy_dict(spectrum, density, beta, tol, band_eps);
        },
        py::arg("levels"), py::arg("domain_length"), py::arg("density"), py::arg("beta"),
        py::arg("tol") = 1e-10, py::arg("band_eps") = 0.0,
        "Chemical potential, occupations and condensate fractions at fixed density");
    m.def("bose_factor", &bose_factor, py::arg("gap"), py::arg("beta"));

    m.def("analytic_ids_ls", &analytic_ids_ls, py::arg("rate"), py::arg("energy"));
    m.def(
        "critical_density_ls",
        [](double rate, double beta, double tol) {
            const IdsCurve curve = analytic_ids_curve(rate, log_spaced(1e-6, 80.0 / beta, 64));
            return critical_density(curve, beta, tol);
        },
        py::arg("rate"), py::arg("beta"), py::arg("tol") = 1e-8,
        "Critical density of the analytic comparator density of states");

    m.def(
        "run_experiment_files",
        [](const std::string& config_path) {
            const ExperimentConfig cfg = load_experiment_config(config_path);
            const ExperimentReport report = run_experiment(cfg);
            return write_report(report).string();
        },
        py::arg("config_path"),
        "Run the experiment described by a config file; returns the report directory");
}
