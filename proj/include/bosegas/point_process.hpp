#pragma once

#include <cstdint>
#include <vector>

namespace bosegas {

/// One realization of a homogeneous Poisson point process on the centered
/// box (-box_length/2, box_length/2).  Atom positions are strictly
/// increasing and strictly inside the open box.
struct PointConfiguration {
    double rate = 0.0;        // process intensity nu > 0
    double box_length = 0.0;  // L >= 0
    std::vector<double> atoms; // sorted ascending
    std::uint64_t seed = 0;   // realization identifier, replays the draw
};

/// Gaps between consecutive atoms, clipped to the box: for kappa atoms there
/// are kappa+1 entries including the two boundary gaps; an empty
/// configuration yields the single gap {box_length}.
struct GapStatistics {
    std::vector<double> gaps;        // in box order, left to right
    std::vector<double> sorted_desc; // same values, descending, stable ties
};

/// Draw one configuration: kappa ~ Poisson(rate * box_length) by inversion,
/// then kappa iid uniform positions, sorted.  Deterministic per seed.
PointConfiguration sample_configuration(double rate, double box_length,
                                        std::uint64_t seed);

/// Clipped gap lengths of a configuration (box order and descending order).
GapStatistics clipped_gaps(const PointConfiguration& config);

/// The j largest gaps in descending order, zero-padded when fewer than j
/// gaps exist.  j >= 1.
std::vector<double> top_gaps(const GapStatistics& stats, int j);

/// Exact tail P(largest - second largest > c) = exp(-rate*c) for the order
/// statistics of iid exponential gap surrogates (any sample size >= 2).
double gap_difference_tail_exact(double rate, double c);

/// Lower bound max(0, 1 - 2 exp(-(rate/3) * L^(1-2 eps))) for the
/// probability that the atom count lies within (1 ± L^-eps) * rate * L.
/// Requires eps in (0, 1/2).
double count_concentration_bound(double rate, double box_length, double eps);

} // namespace bosegas
