#pragma once

#include <cstdint>
#include <optional>

#include "bosegas/eigensolve.hpp"
#include "bosegas/point_process.hpp"
#include "bosegas/site_potential.hpp"

namespace bosegas {

/// Hard-wall comparator: decouple the box at every atom and merge the
/// per-gap Dirichlet levels { (pi m / l_i)^2 : m >= 1 }.  Returns the k
/// smallest, ascending.  Zero-length gaps contribute nothing; having no
/// positive gap at all is an error.
Spectrum luttinger_sy_eigenvalues(const GapStatistics& stats, int k);

/// Ground-level upper bound pi^2 / (l1 - C_u)^2 from a test function in the
/// largest gap shrunk by the obstacle support width C_u.  Empty optional
/// when the bound is vacuous (l1 <= C_u).
std::optional<double> dirichlet_ground_upper_bound(double largest_gap,
                                                   double support_width);

/// Neumann ground-level lower bound on a gap of length lj for the scaled
/// site potential:
///   pi^2/(lj-(C_u-a-b))^2 - (4 pi)^2 (8 pi + 1)^2 / (S_ab (lj-C_u)^2 lj),
/// S_ab = strength_scale * min(int_{Cr-a}^{Cr} u, int_{-Cl}^{-Cl+b} u).
/// Requires 0 < a <= Cr, 0 < b <= Cl and the hypothesis lj >= 2 C_u
/// (PreconditionError otherwise).  The value may be negative (vacuous) and
/// is returned as-is.
double neumann_ground_lower_bound(double gap_length, const SingleSitePotential& site,
                                  double a, double b);

/// Reference floors (9/4) (nu pi / ln L)^2 for the second level and
/// (15/9) (nu pi / ln L)^2 for low levels, used as tally thresholds.
double second_level_reference_floor(double rate, double box_length);
double low_level_reference_floor(double rate, double box_length);

/// Parameters of the spectral-gap event: level spacing at least N^(zeta1-1)
/// and ground level at most ((1+zeta2) nu pi / ln L)^2 (both inclusive).
struct GapEventParams {
    double zeta1 = 0.5;   // in (0, 1)
    double zeta2 = 0.25;  // > 0
    double rate = 1.0;    // nu
    long particle_count = 0;
};

/// Indicator of the gap event for level j >= 2 of the spectrum.
bool gap_event_indicator(const Spectrum& spectrum, int j, const GapEventParams& params);

/// Spectrum of the direct sum of Neumann operators obtained by cutting the
/// discretized box at the grid interface nearest each atom.  On the matched
/// grid the full Dirichlet operator dominates this direct sum index by
/// index exactly (removing a coupling subtracts a positive semidefinite
/// block), which is what the bracketing checks rely on.
Spectrum neumann_direct_sum_spectrum(const PotentialField& field,
                                     const PointConfiguration& config,
                                     int k, double tol);

} // namespace bosegas
