#include "bosegas/spectral_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <vector>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

constexpr double kPi = std::numbers::pi;

double level_floor(double rate, double box_length, double factor) {
    if (!(rate > 0.0))
        throw InvalidParameter("level floor: rate must be positive");
    if (!(box_length > 1.0))
        throw InvalidParameter("level floor: requires box_length > 1");
    const double base = rate * kPi / std::log(box_length);
    return factor * base * base;
}

} // namespace

Spectrum luttinger_sy_eigenvalues(const GapStatistics& stats, int k) {
    if (k < 1)
        throw InvalidParameter("luttinger_sy_eigenvalues: k must be >= 1");
    // (next level value, gap length, mode index)
    struct Entry {
        double value, length;
        long mode;
        bool operator>(const Entry& other) const { return value > other.value; }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    double total_length = 0.0;
    for (double l : stats.gaps) {
        total_length += l;
        if (l > 0.0)
            heap.push({kPi * kPi / (l * l), l, 1});
    }
    if (heap.empty())
        throw InvalidParameter("luttinger_sy_eigenvalues: no positive gap");

    Spectrum spec;
    spec.grid_spacing = 0.0; // analytic
    spec.domain_length = total_length;
    spec.boundary = BoundaryCondition::dirichlet;
    spec.eigenvalues.reserve(static_cast<std::size_t>(k));
    while (static_cast<int>(spec.eigenvalues.size()) < k) {
        Entry e = heap.top();
        heap.pop();
        spec.eigenvalues.push_back(e.value);
        const double m = static_cast<double>(e.mode + 1);
        heap.push({kPi * m / e.length * (kPi * m / e.length), e.length, e.mode + 1});
    }
    return spec;
}

std::optional<double> dirichlet_ground_upper_bound(double largest_gap,
                                                   double support_width) {
    if (!(largest_gap >= 0.0))
        throw InvalidParameter("dirichlet_ground_upper_bound: gap must be nonnegative");
    if (!(support_width > 0.0))
        throw InvalidParameter("dirichlet_ground_upper_bound: support width must be positive");
    if (largest_gap <= support_width)
        return std::nullopt;
    const double room = largest_gap - support_width;
    return kPi * kPi / (room * room);
}

double neumann_ground_lower_bound(double gap_length, const SingleSitePotential& site,
                                  double a, double b) {
    if (site.shape() == SiteShape::delta_spike)
        throw InvalidParameter("neumann_ground_lower_bound: not defined for delta sites");
    const double cl = site.support_left();
    const double cr = site.support_right();
    const double cu = site.support_width();
    if (!(a > 0.0) || !(a <= cr))
        throw InvalidParameter("neumann_ground_lower_bound: a must lie in (0, support_right]");
    if (!(b > 0.0) || !(b <= cl))
        throw InvalidParameter("neumann_ground_lower_bound: b must lie in (0, support_left]");
    if (!(gap_length >= 2.0 * cu))
        throw PreconditionError("neumann_ground_lower_bound: hypothesis gap >= 2*support_width not met");

    const double edge_right = site.profile_integral(cr - a, cr);
    const double edge_left = site.profile_integral(-cl, -cl + b);
    const double s_ab = site.strength_scale() * std::min(edge_right, edge_left);
    if (!(s_ab > 0.0))
        throw InvalidParameter("neumann_ground_lower_bound: edge strength S_ab must be positive");

    const double sharp = gap_length - (cu - a - b);
    const double main = kPi * kPi / (sharp * sharp);
    const double coeff = std::pow(4.0 * kPi, 2) * std::pow(8.0 * kPi + 1.0, 2);
    const double room = gap_length - cu;
    const double correction = coeff / (s_ab * room * room * gap_length);
    return main - correction; // may be negative; reported as-is
}

double second_level_reference_floor(double rate, double box_length) {
    return level_floor(rate, box_length, 9.0 / 4.0);
}

double low_level_reference_floor(double rate, double box_length) {
    return level_floor(rate, box_length, 15.0 / 9.0);
}

bool gap_event_indicator(const Spectrum& spectrum, int j, const GapEventParams& params) {
    if (j < 2)
        throw InvalidParameter("gap_event_indicator: level index must be >= 2");
    if (static_cast<std::size_t>(j) > spectrum.size())
        throw InvalidParameter("gap_event_indicator: level index exceeds computed spectrum");
    if (!(params.zeta1 > 0.0) || !(params.zeta1 < 1.0))
        throw InvalidParameter("gap_event_indicator: zeta1 must lie in (0, 1)");
    if (!(params.zeta2 > 0.0))
        throw InvalidParameter("gap_event_indicator: zeta2 must be positive");
    if (params.particle_count < 1)
        throw InvalidParameter("gap_event_indicator: particle count must be >= 1");
    if (!(spectrum.domain_length > 1.0))
        throw InvalidParameter("gap_event_indicator: requires domain length > 1");

    const double e1 = spectrum.eigenvalues.front();
    const double ej = spectrum.eigenvalues[static_cast<std::size_t>(j - 1)];
    const double spacing_floor =
        std::pow(static_cast<double>(params.particle_count), params.zeta1 - 1.0);
    const double ceiling_root =
        (1.0 + params.zeta2) * params.rate * kPi / std::log(spectrum.domain_length);
    const bool spacing_ok = (ej - e1) >= spacing_floor;
    const bool ground_ok = e1 <= ceiling_root * ceiling_root;
    return spacing_ok && ground_ok;
}

Spectrum neumann_direct_sum_spectrum(const PotentialField& field,
                                     const PointConfiguration& config,
                                     int k, double tol) {
    const long m = static_cast<long>(field.values.size());
    if (m < 2)
        throw InvalidParameter("neumann_direct_sum_spectrum: need at least 2 cells");
    if (k < 1)
        throw InvalidParameter("neumann_direct_sum_spectrum: k must be >= 1");
    const double h = field.spacing;
    const double inv_h2 = 1.0 / (h * h);

    // cut at the grid interface nearest each atom (interface i sits between
    // cells i-1 and i); interfaces 0 and m are no-ops
    std::vector<long> cuts;
    cuts.reserve(config.atoms.size() + 2);
    cuts.push_back(0);
    for (double atom : config.atoms) {
        long i = std::llround((atom - field.origin) / h);
        i = std::clamp<long>(i, 0, m);
        if (i > 0 && i < m)
            cuts.push_back(i);
    }
    cuts.push_back(m);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<double> merged;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const long b0 = cuts[c];
        const long b1 = cuts[c + 1];
        const long len = b1 - b0;
        SymmetricTridiagonal block;
        block.diag.resize(static_cast<std::size_t>(len));
        for (long i = 0; i < len; ++i)
            block.diag[static_cast<std::size_t>(i)] =
                2.0 * inv_h2 + field.values[static_cast<std::size_t>(b0 + i)];
        // Neumann end rows
        block.diag.front() -= inv_h2;
        block.diag.back() -= inv_h2;
        block.offdiag.assign(static_cast<std::size_t>(len > 0 ? len - 1 : 0), -inv_h2);

        if (len == 1) {
            // single-cell block: its sole eigenvalue is the diagonal entry
            merged.push_back(block.diag.front());
            continue;
        }
        SturmSolver solver(block);
        const int kb = static_cast<int>(std::min<long>(k, len));
        auto vals = solver.lowest(kb, tol);
        merged.insert(merged.end(), vals.begin(), vals.end());
    }
    std::sort(merged.begin(), merged.end());
    if (static_cast<std::size_t>(k) > merged.size())
        throw InvalidParameter("neumann_direct_sum_spectrum: fewer levels than requested");
    merged.resize(static_cast<std::size_t>(k));

    Spectrum spec;
    spec.eigenvalues = std::move(merged);
    spec.grid_spacing = h;
    spec.domain_length = field.length;
    spec.boundary = BoundaryCondition::neumann;
    return spec;
}

} // namespace bosegas
