#pragma once

#include <vector>

#include "bosegas/eigensolve.hpp"

namespace bosegas {

/// Expected occupation of a level `gap` above the chemical potential:
/// 1 / (e^{beta*gap} - 1).  Requires gap > 0, beta > 0.
double bose_factor(double gap, double beta);

/// -d/dE of the occupation factor at energy E > 0:
/// beta e^{-beta E} / (1 - e^{-beta E})^2 (positive, integrable weight).
double bose_factor_negative_derivative(double energy, double beta);

/// Solve (1/L) sum_j 1/(e^{beta (E_j - mu)} - 1) = density for mu by
/// bisection on the strictly increasing map mu -> filling; L is taken from
/// spectrum.domain_length.  Postcondition: mu < E_1 and the residual is at
/// most tol.
double solve_chemical_potential(const Spectrum& spectrum, double density,
                                double beta, double tol);

/// Occupations n_j = bose_factor(E_j - mu, beta); requires mu < E_1.
std::vector<double> occupation_numbers(const Spectrum& spectrum, double mu,
                                       double beta);

/// Grand-canonical state at fixed mean density.
struct ThermoState {
    double beta = 0.0;
    double density = 0.0;
    long particle_count = 0; // round(density * L)
    double chemical_potential = 0.0;
    std::vector<double> occupations;
};

ThermoState solve_thermo_state(const Spectrum& spectrum, double density,
                               double beta, double tol);

/// Condensate fractions of a solved state: ground = n_1/N, second = n_2/N
/// (0 when only one level), band = sum over levels with E_j <= eps of n_j/N.
/// rho0_reference is carried through for reporting (e.g. max(rho - rho_c, 0)).
struct CondensateStats {
    double ground_fraction = 0.0;
    double second_fraction = 0.0;
    double band_fraction = 0.0;
    double rho0_reference = 0.0;
};

CondensateStats condensate_statistics(const Spectrum& spectrum,
                                      const std::vector<double>& occupations,
                                      long particle_count, double eps,
                                      double rho0_reference = 0.0);

} // namespace bosegas
