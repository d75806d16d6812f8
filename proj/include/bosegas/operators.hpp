#pragma once

#include <vector>

#include "bosegas/point_process.hpp"
#include "bosegas/site_potential.hpp"

namespace bosegas {

enum class BoundaryCondition { dirichlet, neumann };

/// Potential sampled at the cell centers of a uniform grid over
/// [origin, origin + length]: x_i = origin + (i + 1/2) * spacing.
struct PotentialField {
    double origin = 0.0;
    double length = 0.0;
    double spacing = 0.0;
    std::vector<double> values;

    double cell_center(std::size_t i) const {
        return origin + (static_cast<double>(i) + 0.5) * spacing;
    }
};

/// Symmetric tridiagonal finite-difference operator -d^2/dx^2 + V on the
/// cell-centered grid.  The off-diagonal is the constant -1/h^2; end-row
/// diagonals encode the boundary condition through ghost cells
/// (sign flip for Dirichlet -> 3/h^2 + V, mirror for Neumann -> 1/h^2 + V),
/// which keeps both variants exactly second-order accurate.
struct DiscretizedOperator {
    double grid_spacing = 0.0;
    double domain_length = 0.0;
    BoundaryCondition boundary = BoundaryCondition::dirichlet;
    std::vector<double> diag;
    double offdiag = 0.0; // constant sub/super-diagonal value

    std::size_t dimension() const { return diag.size(); }
};

/// Grid-spacing rule: fine enough to resolve the obstacle profile
/// (min support / 16 for shapes with positive width), at least 32 cells per
/// unit length, spacing adjusted to tile the box exactly, and the matrix
/// dimension capped at 10^6.  A positive override replaces the profile rule
/// but is still adjusted to tile the box and capped.
double resolve_grid_spacing(const SingleSitePotential& site, double box_length,
                            double override_spacing = 0.0);

/// Superpose the scaled site potential at every atom of the configuration
/// onto the cell-centered grid of the box (-L/2, L/2).  delta_spike sites
/// deposit weight/h at the cell nearest each atom.
PotentialField assemble_potential(const PointConfiguration& config,
                                  const SingleSitePotential& site,
                                  double grid_spacing);

/// Same superposition, restricted to the subinterval [lo, hi] of the box
/// (used for per-gap operators); atoms outside still contribute their tails.
PotentialField assemble_potential_interval(const PointConfiguration& config,
                                           const SingleSitePotential& site,
                                           double lo, double hi,
                                           double grid_spacing);

/// Build the tridiagonal operator for the field under the given boundary
/// condition.  Requires at least 2 cells.
DiscretizedOperator discretize(const PotentialField& field,
                               BoundaryCondition boundary);

} // namespace bosegas
