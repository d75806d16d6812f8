#include "doctest.h"

#include <cmath>
#include <optional>

#include "bosegas/errors.hpp"
#include "bosegas/operators.hpp"
#include "bosegas/spectral_bounds.hpp"

using namespace bosegas;

namespace {

GapStatistics synthetic_gaps(std::vector<double> gaps) {
    GapStatistics stats;
    stats.gaps = gaps;
    std::sort(gaps.begin(), gaps.end(), std::greater<double>());
    stats.sorted_desc = gaps;
    return stats;
}

Spectrum synthetic_spectrum(std::vector<double> levels, double length) {
    Spectrum s;
    s.eigenvalues = std::move(levels);
    s.domain_length = length;
    return s;
}

} // namespace

TEST_CASE("hard-wall comparator merges per-gap levels in order") {
    const GapStatistics stats = synthetic_gaps({2.0, 1.0, 1.0});
    const Spectrum spec = luttinger_sy_eigenvalues(stats, 5);
    REQUIRE(spec.size() == 5);
    const double pi2 = M_PI * M_PI;
    CHECK(spec.eigenvalues[0] == doctest::Approx(pi2 / 4.0).epsilon(1e-14));
    CHECK(spec.eigenvalues[1] == doctest::Approx(pi2).epsilon(1e-14));
    CHECK(spec.eigenvalues[2] == doctest::Approx(pi2).epsilon(1e-14));
    CHECK(spec.eigenvalues[3] == doctest::Approx(pi2).epsilon(1e-14));
    CHECK(spec.eigenvalues[4] == doctest::Approx(2.25 * pi2).epsilon(1e-14));
    CHECK(spec.grid_spacing == 0.0); // analytic provenance

    // zero-length gaps contribute nothing; no positive gap at all is an error
    const Spectrum padded = luttinger_sy_eigenvalues(synthetic_gaps({0.0, 3.0}), 2);
    CHECK(padded.eigenvalues[0] == doctest::Approx(pi2 / 9.0));
    CHECK_THROWS_AS(luttinger_sy_eigenvalues(synthetic_gaps({0.0}), 1), InvalidParameter);
    CHECK_THROWS_AS(luttinger_sy_eigenvalues(stats, 0), InvalidParameter);
}

TEST_CASE("ground-level upper bound from the largest gap") {
    // frozen: pi^2/81 at l1 = 10, C_u = 1
    const auto bound = dirichlet_ground_upper_bound(10.0, 1.0);
    REQUIRE(bound.has_value());
    CHECK(*bound == doctest::Approx(0.121846967914683439739).epsilon(1e-15));

    CHECK_FALSE(dirichlet_ground_upper_bound(1.0, 1.0).has_value());
    CHECK_FALSE(dirichlet_ground_upper_bound(0.5, 1.0).has_value());
    CHECK_THROWS_AS(dirichlet_ground_upper_bound(-1.0, 0.5), InvalidParameter);
}

TEST_CASE("interval ground-level lower bound") {
    // frozen with 40-digit arithmetic: box profile of height 1 on
    // [-1/2, 1/2], scale 2e6, windows a = b = 1/2 give S_ab = 1e6 and
    // pi^2/100 - (4 pi)^2 (8 pi + 1)^2 / (1e6 * 81 * 10)
    const auto site = SingleSitePotential::box(1.0, 0.5, 0.5, 2e6);
    const double bound = neumann_ground_lower_bound(10.0, site, 0.5, 0.5);
    CHECK(bound == doctest::Approx(0.0985629052087708791767).epsilon(1e-13));

    // weak obstacles make the bound negative; it is reported as-is
    const auto weak = site.with_strength_scale(10.0);
    CHECK(neumann_ground_lower_bound(10.0, weak, 0.5, 0.5) < 0.0);

    // the hypothesis gap >= 2 C_u is enforced
    CHECK_THROWS_AS(neumann_ground_lower_bound(1.9, site, 0.5, 0.5), PreconditionError);
    // window validation
    CHECK_THROWS_AS(neumann_ground_lower_bound(10.0, site, 0.0, 0.5), InvalidParameter);
    CHECK_THROWS_AS(neumann_ground_lower_bound(10.0, site, 0.5, 0.6), InvalidParameter);
}

TEST_CASE("reference floors at L = 10") {
    CHECK(second_level_reference_floor(1.0, 10.0) ==
          doctest::Approx(4.18842637857620429554).epsilon(1e-15));
    CHECK(low_level_reference_floor(1.0, 10.0) ==
          doctest::Approx(3.10253805820459577447).epsilon(1e-15));
    CHECK_THROWS_AS(second_level_reference_floor(1.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(low_level_reference_floor(-1.0, 10.0), InvalidParameter);
}

TEST_CASE("gap event indicator checks spacing and ground level inclusively") {
    GapEventParams params;
    params.zeta1 = 0.5;
    params.zeta2 = 0.25;
    params.rate = 1.0;
    params.particle_count = 64; // spacing threshold 64^{-1/2} = 1/8 exactly

    // frozen ground threshold at L = 100: (1.25 pi / ln 100)^2
    const double ground_max = 0.727157357391702134642;

    // both conditions comfortably met
    CHECK(gap_event_indicator(synthetic_spectrum({0.5, 0.7}, 100.0), 2, params));
    // spacing exactly at threshold (dyadic values, closed under subtraction)
    CHECK(gap_event_indicator(synthetic_spectrum({0.25, 0.375}, 100.0), 2, params));
    // spacing just below
    CHECK_FALSE(gap_event_indicator(synthetic_spectrum({0.25, 0.3749}, 100.0), 2, params));
    // ground level just above its cap
    CHECK_FALSE(gap_event_indicator(
        synthetic_spectrum({ground_max + 1e-9, ground_max + 1e-9 + 0.25}, 100.0), 2, params));
    // ground level just below the cap
    CHECK(gap_event_indicator(
        synthetic_spectrum({ground_max - 1e-9, ground_max - 1e-9 + 0.25}, 100.0), 2, params));

    // j counts from the spacing E^j - E^1
    CHECK(gap_event_indicator(synthetic_spectrum({0.1, 0.11, 0.5}, 100.0), 3, params));
    CHECK_FALSE(gap_event_indicator(synthetic_spectrum({0.1, 0.11, 0.12}, 100.0), 3, params));

    CHECK_THROWS_AS(gap_event_indicator(synthetic_spectrum({0.1, 0.2}, 100.0), 1, params),
                    InvalidParameter);
    CHECK_THROWS_AS(gap_event_indicator(synthetic_spectrum({0.1}, 100.0), 2, params),
                    InvalidParameter);
}

TEST_CASE("Dirichlet spectrum dominates the Neumann direct sum index by index") {
    const auto site = SingleSitePotential::box(1.0, 0.5, 0.5, 10.0);
    for (std::uint64_t seed = 11; seed < 31; ++seed) {
        const PointConfiguration cfg = sample_configuration(1.0, 30.0, seed);
        if (cfg.atoms.empty()) continue;
        const double h = resolve_grid_spacing(site, cfg.box_length);
        const PotentialField field = assemble_potential(cfg, site, h);
        const DiscretizedOperator op = discretize(field, BoundaryCondition::dirichlet);

        const int k = 5;
        const Spectrum dirichlet = lowest_eigenvalues(op, k, 1e-9);
        const Spectrum direct_sum = neumann_direct_sum_spectrum(field, cfg, k, 1e-9);
        REQUIRE(direct_sum.size() >= dirichlet.size());
        for (std::size_t j = 0; j < dirichlet.size(); ++j) {
            const double slack = 2e-9 + 1e-12 * std::abs(direct_sum.eigenvalues[j]);
            CHECK(dirichlet.eigenvalues[j] >= direct_sum.eigenvalues[j] - slack);
        }
    }
}
