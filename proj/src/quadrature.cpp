#include "bosegas/quadrature.hpp"

#include <array>
#include <cmath>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

struct SimpsonFrame {
    double a, b, fa, fm, fb, whole, eps;
    int depth;
};

double simpson_rule(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, const SimpsonFrame& fr) {
    const double m = 0.5 * (fr.a + fr.b);
    const double lm = 0.5 * (fr.a + m);
    const double rm = 0.5 * (m + fr.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(fr.a, m, fr.fa, flm, fr.fm);
    const double right = simpson_rule(m, fr.b, fr.fm, frm, fr.fb);
    const double delta = left + right - fr.whole;
    if (std::abs(delta) <= 15.0 * fr.eps || lm <= fr.a || rm >= fr.b)
        return left + right + delta / 15.0;
    if (fr.depth <= 0)
        throw NumericalFailure("adaptive_simpson: depth limit reached before "
                               "meeting the tolerance");
    const double half_eps = 0.5 * fr.eps;
    const double l =
        adapt(f, {fr.a, m, fr.fa, flm, fr.fm, left, half_eps, fr.depth - 1});
    const double r =
        adapt(f, {m, fr.b, fr.fm, frm, fr.fb, right, half_eps, fr.depth - 1});
    return l + r;
}

// 16-point Gauss-Legendre abscissas/weights on [-1, 1] (positive half;
// the rule is symmetric).
constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499,
};
constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541,
};

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
    if (!(b >= a))
        throw InvalidParameter("adaptive_simpson: requires b >= a");
    if (!(abs_tol > 0.0))
        throw InvalidParameter("adaptive_simpson: tolerance must be positive");
    if (a == b)
        return 0.0;
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson_rule(a, b, fa, fm, fb);
    return adapt(f, {a, b, fa, fm, fb, whole, abs_tol, max_depth});
}

double gauss_legendre_panels(const std::function<double(double)>& f,
                             const std::vector<double>& edges) {
    if (edges.size() < 2)
        throw InvalidParameter("gauss_legendre_panels: need at least one panel");
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p];
        const double b = edges[p + 1];
        if (!(b >= a))
            throw InvalidParameter("gauss_legendre_panels: edges must be ascending");
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double panel = 0.0;
        for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
            const double dx = half * kGlNodes[i];
            panel += kGlWeights[i] * (f(mid - dx) + f(mid + dx));
        }
        total += half * panel;
    }
    return total;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo))
        throw InvalidParameter("log_spaced: requires 0 < lo < hi");
    if (n < 2)
        throw InvalidParameter("log_spaced: need at least 2 points");
    std::vector<double> out(static_cast<std::size_t>(n));
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        out[static_cast<std::size_t>(i)] = std::exp(llo + t * (lhi - llo));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace bosegas
