#pragma once

#include <functional>
#include <vector>

namespace bosegas {

/// Adaptive Simpson integration of f on [a, b] to the given absolute
/// tolerance.  Throws NumericalFailure when the recursion depth limit is
/// reached without meeting the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 48);

/// Composite 16-point Gauss-Legendre rule over the given panel edges
/// (ascending).  Fixed-panel: no adaptivity, fully deterministic.
double gauss_legendre_panels(const std::function<double(double)>& f,
                             const std::vector<double>& edges);

/// n logarithmically spaced values from lo to hi inclusive (lo, hi > 0).
std::vector<double> log_spaced(double lo, double hi, int n);

} // namespace bosegas
