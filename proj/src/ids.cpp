#include "bosegas/ids.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bosegas/errors.hpp"
#include "bosegas/quadrature.hpp"
#include "bosegas/thermo.hpp"

namespace bosegas {

namespace {

constexpr double kPi = std::numbers::pi;

void check_grid(const std::vector<double>& grid) {
    if (grid.empty())
        throw InvalidParameter("ids: energy grid must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0))
            throw InvalidParameter("ids: grid energies must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw InvalidParameter("ids: grid energies must be strictly ascending");
    }
}

} // namespace

double IdsCurve::value_at(double energy) const {
    if (analytic())
        return analytic_ids_ls(std::get<IdsProvenanceAnalytic>(provenance).rate, energy);
    if (energies.empty())
        return 0.0;
    if (energy < energies.front())
        return 0.0;
    if (energy >= energies.back())
        return values.back();
    const auto it = std::upper_bound(energies.begin(), energies.end(), energy);
    const std::size_t i = static_cast<std::size_t>(it - energies.begin());
    const double x0 = energies[i - 1], x1 = energies[i];
    const double t = (energy - x0) / (x1 - x0);
    return values[i - 1] * (1.0 - t) + values[i] * t;
}

double analytic_ids_ls(double rate, double energy) {
    if (!(rate > 0.0))
        throw InvalidParameter("analytic_ids_ls: rate must be positive");
    if (energy <= 0.0)
        return 0.0;
    const double x = rate * kPi / std::sqrt(energy);
    // rate * e^{-x}/(1-e^{-x}) = rate / (e^x - 1)
    const double denom = std::expm1(x);
    if (!std::isfinite(denom) || denom <= 0.0)
        return 0.0; // x overflow: double-exponentially small tail
    return rate / denom;
}

IdsCurve analytic_ids_curve(double rate, std::vector<double> grid) {
    check_grid(grid);
    IdsCurve curve;
    curve.values.reserve(grid.size());
    for (double e : grid)
        curve.values.push_back(analytic_ids_ls(rate, e));
    curve.energies = std::move(grid);
    curve.provenance = IdsProvenanceAnalytic{rate};
    return curve;
}

IdsCurve empirical_ids(const std::vector<Spectrum>& ensemble, double box_length,
                       std::vector<double> grid) {
    if (ensemble.empty())
        throw InvalidParameter("empirical_ids: ensemble must not be empty");
    if (!(box_length > 0.0))
        throw InvalidParameter("empirical_ids: box length must be positive");
    check_grid(grid);
    std::vector<long> sums(grid.size(), 0);
    for (const Spectrum& spec : ensemble) {
        const auto& ev = spec.eigenvalues;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto it = std::lower_bound(ev.begin(), ev.end(), grid[g]);
            sums[g] += static_cast<long>(it - ev.begin());
        }
    }
    return empirical_ids_from_counts(sums, ensemble.size(), box_length, std::move(grid));
}

IdsCurve empirical_ids_from_counts(const std::vector<long>& count_sums,
                                   std::size_t ensemble_size, double box_length,
                                   std::vector<double> grid) {
    if (ensemble_size == 0)
        throw InvalidParameter("empirical_ids_from_counts: ensemble must not be empty");
    if (!(box_length > 0.0))
        throw InvalidParameter("empirical_ids_from_counts: box length must be positive");
    check_grid(grid);
    if (count_sums.size() != grid.size())
        throw InvalidParameter("empirical_ids_from_counts: counts must match the grid");
    IdsCurve curve;
    curve.values.reserve(grid.size());
    const double norm = 1.0 / (static_cast<double>(ensemble_size) * box_length);
    for (long s : count_sums)
        curve.values.push_back(static_cast<double>(s) * norm);
    curve.energies = std::move(grid);
    curve.provenance = IdsProvenanceEmpirical{ensemble_size, box_length};
    return curve;
}

double critical_density(const IdsCurve& ids, double beta, double tol) {
    if (!(beta > 0.0))
        throw InvalidParameter("critical_density: beta must be positive");
    if (!(tol > 0.0))
        throw InvalidParameter("critical_density: tol must be positive");

    double e_up = 70.0 / beta;
    if (!ids.analytic() && !ids.energies.empty())
        e_up = std::max(e_up, ids.energies.back());

    auto integrand = [&](double e) {
        if (e <= 0.0)
            return 0.0;
        const double v = ids.value_at(e);
        if (v == 0.0)
            return 0.0;
        return v * bose_factor_negative_derivative(e, beta);
    };

    // fixed-panel Gauss-Legendre on log-spaced panels (plus the flat
    // [0, e_lo] stub where the tail is double-exponentially small)
    const double e_lo = 1e-7;
    std::vector<double> edges = log_spaced(e_lo, e_up, 200);
    edges.insert(edges.begin(), 0.0);
    const double fixed = gauss_legendre_panels(integrand, edges);

    const double abs_tol = std::max(std::abs(fixed) * tol * 0.05, 1e-300);
    const double adaptive = adaptive_simpson(integrand, 0.0, e_up, abs_tol);

    const double scale = std::max(std::abs(fixed), std::abs(adaptive));
    if (std::abs(fixed - adaptive) > tol * std::max(scale, 1e-300)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "critical_density: quadratures disagree beyond tolerance "
            << tol << " (adaptive Simpson " << adaptive
            << ", Gauss-Legendre " << fixed << ")";
        throw NumericalFailure(msg.str());
    }
    return adaptive;
}

LinearFit lifshitz_slope_fit(const IdsCurve& ids, double window_lo, double window_hi) {
    if (!(window_lo > 0.0) || !(window_hi > window_lo))
        throw InvalidParameter("lifshitz_slope_fit: requires 0 < window_lo < window_hi");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < ids.energies.size(); ++i) {
        const double e = ids.energies[i];
        const double v = ids.analytic() ? ids.value_at(e) : ids.values[i];
        if (e < window_lo || e > window_hi || !(v > 0.0))
            continue;
        const double x = 1.0 / std::sqrt(e);
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 5)
        throw InvalidParameter("lifshitz_slope_fit: fewer than 5 usable grid points "
                               "in the window");
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0))
        throw NumericalFailure("lifshitz_slope_fit: degenerate abscissas");
    LinearFit fit;
    fit.slope = (dn * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / dn;
    fit.points = n;
    return fit;
}

std::pair<double, double> default_fit_window(const IdsCurve& ids, double floor_value) {
    if (!(floor_value > 0.0))
        throw InvalidParameter("default_fit_window: floor must be positive");
    for (std::size_t i = 0; i < ids.energies.size(); ++i) {
        const double v = ids.analytic() ? ids.value_at(ids.energies[i]) : ids.values[i];
        if (v > floor_value) {
            const double lo = ids.energies[i];
            const double hi = std::min(10.0 * lo, ids.energies.back());
            if (!(hi > lo))
                throw InvalidParameter("default_fit_window: populated decade "
                                       "collapses at the top of the grid");
            return {lo, hi};
        }
    }
    throw InvalidParameter("default_fit_window: curve never exceeds the floor value");
}

} // namespace bosegas
