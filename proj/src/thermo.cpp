#include "bosegas/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw InvalidParameter("beta must be positive");
}

void check_spectrum(const Spectrum& spectrum) {
    if (spectrum.eigenvalues.empty())
        throw InvalidParameter("spectrum must contain at least one level");
    if (!(spectrum.domain_length > 0.0))
        throw InvalidParameter("spectrum must carry a positive domain length");
    for (std::size_t i = 1; i < spectrum.size(); ++i)
        if (spectrum.eigenvalues[i] < spectrum.eigenvalues[i - 1])
            throw InvalidParameter("spectrum levels must be ascending");
}

} // namespace

double bose_factor(double gap, double beta) {
    check_beta(beta);
    if (!(gap > 0.0))
        throw DomainError("bose_factor: energy gap must be positive");
    const double denom = std::expm1(beta * gap);
    return denom == std::numeric_limits<double>::infinity() ? 0.0 : 1.0 / denom;
}

double bose_factor_negative_derivative(double energy, double beta) {
    check_beta(beta);
    if (!(energy > 0.0))
        throw DomainError("bose_factor_negative_derivative: energy must be positive");
    // beta e^{-bE} / (1 - e^{-bE})^2, stable for both tails
    const double em = std::exp(-beta * energy);
    const double denom = -std::expm1(-beta * energy); // 1 - e^{-bE}
    return beta * em / (denom * denom);
}

double solve_chemical_potential(const Spectrum& spectrum, double density,
                                double beta, double tol) {
    check_beta(beta);
    check_spectrum(spectrum);
    if (!(density > 0.0))
        throw InvalidParameter("solve_chemical_potential: density must be positive");
    if (!(tol > 0.0))
        throw InvalidParameter("solve_chemical_potential: tol must be positive");

    const double length = spectrum.domain_length;
    const double e1 = spectrum.eigenvalues.front();
    const auto& levels = spectrum.eigenvalues;

    auto filling = [&](double mu) {
        double sum = 0.0;
        for (double e : levels) {
            const double x = beta * (e - mu);
            const double denom = std::expm1(x);
            if (denom > 0.0 && std::isfinite(denom))
                sum += 1.0 / denom;
            // levels far above mu overflow expm1 to inf and contribute 0
        }
        return sum / length;
    };

    // upper end: walk mu toward E1 until the filling exceeds the target;
    // the ground-level occupation diverges there, so failure to exceed the
    // target means the spectrum itself is unusable (degenerate saturation)
    const double scale = std::max(1.0, std::abs(e1));
    const double delta_min = 1e-15 * scale;
    double delta = 1e-3 * scale;
    while (filling(e1 - delta) < density) {
        delta *= 0.5;
        if (delta < delta_min)
            throw TruncatedSpectrum(
                "solve_chemical_potential: filling saturates below the target "
                "density; recompute the spectrum with more levels");
    }
    double hi = e1 - delta;

    // lower end: expand geometrically until the filling drops below target
    double span = std::max(1.0, 1.0 / beta);
    double lo = e1 - span;
    int expansions = 0;
    while (filling(lo) > density) {
        span *= 2.0;
        lo = e1 - span;
        if (++expansions > 200)
            throw NumericalFailure("solve_chemical_potential: could not bracket mu from below");
    }

    double mu = 0.5 * (lo + hi);
    for (int iter = 0; iter < 500; ++iter) {
        mu = 0.5 * (lo + hi);
        const double residual = filling(mu) - density;
        const double width = hi - lo;
        if (std::abs(residual) <= tol && width <= 1e-13 * std::max(1.0, std::abs(mu)))
            return mu;
        if (mu <= lo || mu >= hi) {
            // bracket exhausted at rounding resolution
            if (std::abs(residual) <= tol)
                return mu;
            throw NumericalFailure(
                "solve_chemical_potential: bisection stalled at bracket [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "] with residual " +
                std::to_string(residual));
        }
        if (residual < 0.0)
            lo = mu;
        else
            hi = mu;
    }
    const double residual = filling(mu) - density;
    if (std::abs(residual) <= tol)
        return mu;
    throw NumericalFailure("solve_chemical_potential: bisection did not reach the "
                           "residual tolerance; residual " + std::to_string(residual));
}

std::vector<double> occupation_numbers(const Spectrum& spectrum, double mu,
                                       double beta) {
    check_beta(beta);
    check_spectrum(spectrum);
    if (!(mu < spectrum.eigenvalues.front()))
        throw DomainError("occupation_numbers: mu must lie strictly below the ground level");
    std::vector<double> occ;
    occ.reserve(spectrum.size());
    for (double e : spectrum.eigenvalues)
        occ.push_back(bose_factor(e - mu, beta));
    return occ;
}

ThermoState solve_thermo_state(const Spectrum& spectrum, double density,
                               double beta, double tol) {
    ThermoState state;
    state.beta = beta;
    state.density = density;
    state.particle_count = std::llround(density * spectrum.domain_length);
    state.chemical_potential = solve_chemical_potential(spectrum, density, beta, tol);
    state.occupations = occupation_numbers(spectrum, state.chemical_potential, beta);
    return state;
}

CondensateStats condensate_statistics(const Spectrum& spectrum,
                                      const std::vector<double>& occupations,
                                      long particle_count, double eps,
                                      double rho0_reference) {
    check_spectrum(spectrum);
    if (occupations.size() != spectrum.size())
        throw InvalidParameter("condensate_statistics: occupations must match the spectrum");
    if (particle_count < 1)
        throw InvalidParameter("condensate_statistics: particle count must be >= 1");

    const double n = static_cast<double>(particle_count);
    CondensateStats stats;
    stats.rho0_reference = rho0_reference;
    stats.ground_fraction = occupations.front() / n;
    stats.second_fraction = occupations.size() > 1 ? occupations[1] / n : 0.0;
    double band = 0.0;
    for (std::size_t j = 0; j < occupations.size(); ++j) {
        if (spectrum.eigenvalues[j] <= eps)
            band += occupations[j];
        else
            break; // ascending levels
    }
    stats.band_fraction = band / n;
    return stats;
}

} // namespace bosegas
