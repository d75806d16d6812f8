#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "bosegas/eigensolve.hpp"

namespace bosegas {

struct IdsProvenanceEmpirical {
    std::size_t ensemble_size = 0;
    double box_length = 0.0;
};

struct IdsProvenanceAnalytic {
    double rate = 0.0;
};

/// Integrated density of states per unit length, tabulated on an ascending
/// energy grid.  Analytic curves evaluate their closed form everywhere;
/// empirical curves interpolate linearly, are 0 below the grid and clamp to
/// the last value above it.
struct IdsCurve {
    std::vector<double> energies;
    std::vector<double> values;
    std::variant<IdsProvenanceEmpirical, IdsProvenanceAnalytic> provenance =
        IdsProvenanceEmpirical{};

    bool analytic() const {
        return std::holds_alternative<IdsProvenanceAnalytic>(provenance);
    }
    double value_at(double energy) const;
};

/// Limiting hard-wall integrated density of states per unit length:
/// rate * e^{-x} / (1 - e^{-x}) with x = rate*pi/sqrt(E); 0 for E <= 0.
double analytic_ids_ls(double rate, double energy);

/// Analytic curve sampled on a grid (value_at still uses the closed form).
IdsCurve analytic_ids_curve(double rate, std::vector<double> grid);

/// Ensemble-averaged per-length eigenvalue counting function on a grid:
/// value(E) = mean over spectra of |{ j : E_j < E }| / box_length.
/// All spectra must be computed at least up to the top grid energy.
IdsCurve empirical_ids(const std::vector<Spectrum>& ensemble, double box_length,
                       std::vector<double> grid);

/// Same curve built from pre-accumulated level counts (count_sums[g] is the
/// total count at grid[g] over the whole ensemble); exact equivalent of
/// empirical_ids when the counts come from the same operators.
IdsCurve empirical_ids_from_counts(const std::vector<long>& count_sums,
                                   std::size_t ensemble_size, double box_length,
                                   std::vector<double> grid);

/// Critical density integral int_0^inf N(E) * (-dB/dE) dE computed with two
/// independent quadratures (adaptive Simpson and fixed-panel Gauss-Legendre)
/// that must agree to the relative tolerance, else NumericalFailure carrying
/// both values.
double critical_density(const IdsCurve& ids, double beta, double tol);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

/// Least-squares fit of ln(value) against E^{-1/2} over grid points inside
/// [window_lo, window_hi] with positive values (at least 5 required).
/// A vanishing tail makes the slope approach -rate*pi.
LinearFit lifshitz_slope_fit(const IdsCurve& ids, double window_lo, double window_hi);

/// Default fit window: the lowest decade [E0, 10*E0] where the curve first
/// exceeds floor_value (clipped to the grid range).
std::pair<double, double> default_fit_window(const IdsCurve& ids, double floor_value);

} // namespace bosegas
