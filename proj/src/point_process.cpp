#include "bosegas/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bosegas/errors.hpp"
#include "bosegas/rng.hpp"

namespace bosegas {

PointConfiguration sample_configuration(double rate, double box_length,
                                        std::uint64_t seed) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw InvalidParameter("sample_configuration: rate must be positive");
    if (!(box_length >= 0.0) || !std::isfinite(box_length))
        throw InvalidParameter("sample_configuration: box_length must be nonnegative");

    RandomStream stream(seed);
    PointConfiguration config;
    config.rate = rate;
    config.box_length = box_length;
    config.seed = seed;
    if (box_length == 0.0)
        return config;

    const double half = 0.5 * box_length;
    // Rejection loop only fires on measure-zero float collisions (duplicate
    // positions or a draw landing exactly on the box edge).
    for (int attempt = 0; attempt < 128; ++attempt) {
        const long kappa = stream.poisson(rate * box_length);
        std::vector<double> atoms(static_cast<std::size_t>(kappa));
        for (double& x : atoms)
            x = (stream.uniform01() - 0.5) * box_length;
        std::sort(atoms.begin(), atoms.end());
        bool ok = true;
        for (std::size_t i = 0; i < atoms.size() && ok; ++i) {
            if (!(atoms[i] > -half) || !(atoms[i] < half)) ok = false;
            if (i > 0 && !(atoms[i] > atoms[i - 1])) ok = false;
        }
        if (ok) {
            config.atoms = std::move(atoms);
            return config;
        }
    }
    throw NumericalFailure("sample_configuration: could not draw a strictly "
                           "increasing interior configuration (seed " +
                           std::to_string(seed) + ")");
}

GapStatistics clipped_gaps(const PointConfiguration& config) {
    const double half = 0.5 * config.box_length;
    GapStatistics stats;
    stats.gaps.reserve(config.atoms.size() + 1);
    if (config.atoms.empty()) {
        stats.gaps.push_back(config.box_length);
    } else {
        stats.gaps.push_back(config.atoms.front() + half);
        for (std::size_t i = 1; i < config.atoms.size(); ++i)
            stats.gaps.push_back(config.atoms[i] - config.atoms[i - 1]);
        stats.gaps.push_back(half - config.atoms.back());
    }
    stats.sorted_desc = stats.gaps;
    // stable sort so equal lengths keep box order: leftmost tie wins
    std::stable_sort(stats.sorted_desc.begin(), stats.sorted_desc.end(),
                     [](double a, double b) { return a > b; });
    return stats;
}

std::vector<double> top_gaps(const GapStatistics& stats, int j) {
    if (j < 1)
        throw InvalidParameter("top_gaps: j must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(j), 0.0);
    const std::size_t n = std::min<std::size_t>(stats.sorted_desc.size(),
                                                static_cast<std::size_t>(j));
    for (std::size_t i = 0; i < n; ++i)
        out[i] = stats.sorted_desc[i];
    return out;
}

double gap_difference_tail_exact(double rate, double c) {
    if (!(rate > 0.0))
        throw InvalidParameter("gap_difference_tail_exact: rate must be positive");
    if (!(c >= 0.0))
        throw InvalidParameter("gap_difference_tail_exact: threshold must be nonnegative");
    return std::exp(-rate * c);
}

double count_concentration_bound(double rate, double box_length, double eps) {
    if (!(rate > 0.0))
        throw InvalidParameter("count_concentration_bound: rate must be positive");
    if (!(box_length > 0.0))
        throw InvalidParameter("count_concentration_bound: box_length must be positive");
    if (!(eps > 0.0) || !(eps < 0.5))
        throw InvalidParameter("count_concentration_bound: eps must lie in (0, 1/2)");
    const double exponent = (rate / 3.0) * std::pow(box_length, 1.0 - 2.0 * eps);
    const double bound = 1.0 - 2.0 * std::exp(-exponent);
    return bound > 0.0 ? bound : 0.0;
}

} // namespace bosegas
