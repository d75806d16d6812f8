#include "bosegas/operators.hpp"

#include <algorithm>
#include <cmath>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

constexpr long kMaxCells = 1'000'000;

long cell_count_for(double length, double target_spacing) {
    long m = std::llround(length / target_spacing);
    if (m < 2) m = 2;
    if (m > kMaxCells) m = kMaxCells;
    return m;
}

PotentialField assemble_on(const PointConfiguration& config,
                           const SingleSitePotential& site,
                           double origin, double length, double grid_spacing) {
    if (!(grid_spacing > 0.0) || !std::isfinite(grid_spacing))
        throw InvalidParameter("assemble_potential: grid spacing must be positive");
    if (!(length > 0.0))
        throw InvalidParameter("assemble_potential: domain length must be positive");

    const long m = cell_count_for(length, grid_spacing);
    PotentialField field;
    field.origin = origin;
    field.length = length;
    field.spacing = length / static_cast<double>(m); // adjusted to tile exactly
    field.values.assign(static_cast<std::size_t>(m), 0.0);

    const double h = field.spacing;
    const double scale = site.strength_scale();
    if (scale == 0.0)
        return field;

    for (double atom : config.atoms) {
        if (site.shape() == SiteShape::delta_spike) {
            // first-order representation: weight/h at the nearest cell center
            long i = std::llround((atom - origin) / h - 0.5);
            i = std::clamp<long>(i, 0, m - 1);
            field.values[static_cast<std::size_t>(i)] += scale * site.height() / h;
            continue;
        }
        const double lo = atom - site.support_left();
        const double hi = atom + site.support_right();
        if (hi < origin || lo > origin + length)
            continue;
        long i_lo = static_cast<long>(std::ceil((lo - origin) / h - 0.5));
        long i_hi = static_cast<long>(std::floor((hi - origin) / h - 0.5));
        i_lo = std::max<long>(i_lo, 0);
        i_hi = std::min<long>(i_hi, m - 1);
        for (long i = i_lo; i <= i_hi; ++i) {
            const double x = field.cell_center(static_cast<std::size_t>(i));
            field.values[static_cast<std::size_t>(i)] += scale * site.profile_value(x - atom);
        }
    }
    return field;
}

} // namespace

double resolve_grid_spacing(const SingleSitePotential& site, double box_length,
                            double override_spacing) {
    if (!(box_length > 0.0) || !std::isfinite(box_length))
        throw InvalidParameter("resolve_grid_spacing: box length must be positive");
    double target;
    if (override_spacing > 0.0) {
        target = override_spacing;
    } else if (override_spacing != 0.0) {
        throw InvalidParameter("resolve_grid_spacing: spacing override must be positive");
    } else {
        target = 1.0 / 32.0;
        if (site.shape() != SiteShape::delta_spike) {
            const double profile_rule =
                std::min(site.support_left(), site.support_right()) / 16.0;
            target = std::min(target, profile_rule);
        }
    }
    if (!(target > 0.0) || !std::isfinite(target))
        throw InvalidParameter("resolve_grid_spacing: invalid spacing");
    const long m = cell_count_for(box_length, target);
    return box_length / static_cast<double>(m);
}

PotentialField assemble_potential(const PointConfiguration& config,
                                  const SingleSitePotential& site,
                                  double grid_spacing) {
    return assemble_on(config, site, -0.5 * config.box_length, config.box_length,
                       grid_spacing);
}

PotentialField assemble_potential_interval(const PointConfiguration& config,
                                           const SingleSitePotential& site,
                                           double lo, double hi,
                                           double grid_spacing) {
    if (!(hi > lo))
        throw InvalidParameter("assemble_potential_interval: requires hi > lo");
    return assemble_on(config, site, lo, hi - lo, grid_spacing);
}

DiscretizedOperator discretize(const PotentialField& field,
                               BoundaryCondition boundary) {
    const std::size_t m = field.values.size();
    if (m < 2)
        throw InvalidParameter("discretize: need at least 2 grid cells");
    if (!(field.spacing > 0.0))
        throw InvalidParameter("discretize: grid spacing must be positive");
    for (double v : field.values)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidParameter("discretize: potential values must be nonnegative");

    const double inv_h2 = 1.0 / (field.spacing * field.spacing);
    DiscretizedOperator op;
    op.grid_spacing = field.spacing;
    op.domain_length = field.length;
    op.boundary = boundary;
    op.offdiag = -inv_h2;
    op.diag.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        op.diag[i] = 2.0 * inv_h2 + field.values[i];
    const double end_diag =
        (boundary == BoundaryCondition::dirichlet) ? 3.0 * inv_h2 : 1.0 * inv_h2;
    op.diag.front() += end_diag - 2.0 * inv_h2;
    op.diag.back() += end_diag - 2.0 * inv_h2;
    return op;
}

} // namespace bosegas
