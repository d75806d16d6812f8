#include "bosegas/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

// Replacement pivot when an LDL^T pivot hits exactly zero; keeps the sign
// count monotone and avoids 0/0 in the recurrence.
constexpr double kTinyPivot = 1e-300;

struct Bracket {
    double lo, hi;
    long clo, chi; // eigenvalue indices in [clo, chi) lie in [lo, hi)
};

} // namespace

SturmSolver::SturmSolver(const SymmetricTridiagonal& matrix) {
    const std::size_t n = matrix.diag.size();
    if (n == 0)
        throw InvalidParameter("SturmSolver: empty matrix");
    if (matrix.offdiag.size() + 1 != n)
        throw InvalidParameter("SturmSolver: offdiag must have dimension-1 entries");
    for (double d : matrix.diag)
        if (!std::isfinite(d))
            throw InvalidParameter("SturmSolver: nonfinite diagonal entry");
    diag_ = matrix.diag;
    offdiag2_.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double e = matrix.offdiag[i];
        if (!std::isfinite(e))
            throw InvalidParameter("SturmSolver: nonfinite off-diagonal entry");
        offdiag2_[i] = e * e;
    }
}

SturmSolver::SturmSolver(const DiscretizedOperator& op) {
    const std::size_t n = op.diag.size();
    if (n == 0)
        throw InvalidParameter("SturmSolver: empty operator");
    diag_ = op.diag;
    offdiag2_.assign(n - 1, op.offdiag * op.offdiag);
}

long SturmSolver::count_below(double x) const {
    const std::size_t n = diag_.size();
    const double* d = diag_.data();
    const double* e2 = offdiag2_.data();
    long count = 0;
    double piv = d[0] - x;
    if (piv == 0.0) piv = -kTinyPivot;
    if (piv < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        piv = d[i] - x - e2[i - 1] / piv;
        if (piv == 0.0) piv = -kTinyPivot;
        if (piv < 0.0) ++count;
    }
    return count;
}

namespace {

// Four shifts per sweep: the division chains are independent, so the
// divider pipelines them and one pass costs little more than a single
// count.  This is the hot loop of the whole library.
void count_below_batch4(const std::vector<double>& diag,
                        const std::vector<double>& e2,
                        const double* shifts, long* counts) {
    const std::size_t n = diag.size();
    double p0 = diag[0] - shifts[0];
    double p1 = diag[0] - shifts[1];
    double p2 = diag[0] - shifts[2];
    double p3 = diag[0] - shifts[3];
    if (p0 == 0.0) p0 = -kTinyPivot;
    if (p1 == 0.0) p1 = -kTinyPivot;
    if (p2 == 0.0) p2 = -kTinyPivot;
    if (p3 == 0.0) p3 = -kTinyPivot;
    long c0 = p0 < 0.0, c1 = p1 < 0.0, c2 = p2 < 0.0, c3 = p3 < 0.0;
    const double* d = diag.data();
    const double* e = e2.data();
    for (std::size_t i = 1; i < n; ++i) {
        const double di = d[i];
        const double ei = e[i - 1];
        p0 = di - shifts[0] - ei / p0;
        p1 = di - shifts[1] - ei / p1;
        p2 = di - shifts[2] - ei / p2;
        p3 = di - shifts[3] - ei / p3;
        if (p0 == 0.0) p0 = -kTinyPivot;
        if (p1 == 0.0) p1 = -kTinyPivot;
        if (p2 == 0.0) p2 = -kTinyPivot;
        if (p3 == 0.0) p3 = -kTinyPivot;
        c0 += p0 < 0.0;
        c1 += p1 < 0.0;
        c2 += p2 < 0.0;
        c3 += p3 < 0.0;
    }
    counts[0] = c0;
    counts[1] = c1;
    counts[2] = c2;
    counts[3] = c3;
}

} // namespace

std::pair<double, double> SturmSolver::gershgorin_bounds() const {
    const std::size_t n = diag_.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::sqrt(offdiag2_[i - 1]);
        if (i + 1 < n) radius += std::sqrt(offdiag2_[i]);
        lo = std::min(lo, diag_[i] - radius);
        hi = std::max(hi, diag_[i] + radius);
    }
    return {lo, hi};
}

std::vector<double> SturmSolver::extract(double lo, long k, double hi,
                                         double tol) const {
    // Divide and conquer on brackets: each Sturm count splits every pending
    // eigenvalue index at once.  Output order is by eigenvalue index, so the
    // result does not depend on the processing order.
    // caller guarantees count_below(lo) == 0 and count_below(hi) >= k
    std::vector<double> out(static_cast<std::size_t>(k));
    std::deque<Bracket> work;
    work.push_back({lo, hi, 0, k});

    const double eps = std::numeric_limits<double>::epsilon();
    long sweeps = 0;
    const long max_sweeps = 128 * k + 8192;

    double shifts[4];
    long counts[4];
    Bracket pending[4];

    while (!work.empty()) {
        int batch = 0;
        while (!work.empty() && batch < 4) {
            Bracket b = work.front();
            work.pop_front();
            if (b.chi <= b.clo)
                continue;
            const double width = b.hi - b.lo;
            const double tol_eff =
                std::max(tol, 8.0 * eps * std::max(std::abs(b.lo), std::abs(b.hi)));
            const double mid = 0.5 * (b.lo + b.hi);
            if (width <= tol_eff || mid <= b.lo || mid >= b.hi) {
                for (long j = b.clo; j < b.chi; ++j)
                    out[static_cast<std::size_t>(j)] = mid;
                continue;
            }
            pending[batch] = b;
            shifts[batch] = mid;
            ++batch;
        }
        if (batch == 0)
            continue;
        if (++sweeps > max_sweeps)
            throw NumericalFailure(
                "SturmSolver: bisection did not converge; bracket [" +
                std::to_string(pending[0].lo) + ", " + std::to_string(pending[0].hi) +
                "] for eigenvalue index " + std::to_string(pending[0].clo));
        // fill unused lanes with the first shift so the sweep stays uniform
        for (int b = batch; b < 4; ++b)
            shifts[b] = shifts[0];
        count_below_batch4(diag_, offdiag2_, shifts, counts);
        for (int b = 0; b < batch; ++b) {
            const Bracket& br = pending[b];
            const long cm = std::clamp(counts[b], br.clo, br.chi);
            work.push_back({br.lo, shifts[b], br.clo, cm});
            work.push_back({shifts[b], br.hi, cm, br.chi});
        }
    }
    return out;
}

std::vector<double> SturmSolver::lowest(int k, double tol) const {
    const long n = static_cast<long>(dimension());
    if (k < 1 || k > n)
        throw InvalidParameter("SturmSolver::lowest: k must be in [1, dimension]");
    if (!(tol > 0.0))
        throw InvalidParameter("SturmSolver::lowest: tol must be positive");
    auto [glo, ghi] = gershgorin_bounds();
    double hi = ghi + std::max(1e-12, 1e-12 * std::abs(ghi));
    for (int widen = 0; count_below(hi) < k; ++widen) {
        if (widen >= 8)
            throw NumericalFailure("SturmSolver::lowest: could not bracket all "
                                   "requested eigenvalues above the Gershgorin bound");
        hi += std::max(1.0, std::abs(hi));
    }
    return extract(glo, k, hi, tol);
}

std::vector<double> SturmSolver::below(double cutoff, double tol) const {
    if (!(tol > 0.0))
        throw InvalidParameter("SturmSolver::below: tol must be positive");
    const long k = count_below(cutoff);
    if (k == 0)
        return {};
    auto [glo, ghi] = gershgorin_bounds();
    (void)ghi;
    return extract(glo, k, cutoff, tol);
}

Spectrum lowest_eigenvalues(const DiscretizedOperator& op, int k, double tol) {
    SturmSolver solver(op);
    Spectrum spec;
    spec.eigenvalues = solver.lowest(k, tol);
    spec.grid_spacing = op.grid_spacing;
    spec.domain_length = op.domain_length;
    spec.boundary = op.boundary;
    return spec;
}

Spectrum eigenvalues_below(const DiscretizedOperator& op, double cutoff, double tol) {
    SturmSolver solver(op);
    Spectrum spec;
    spec.eigenvalues = solver.below(cutoff, tol);
    spec.grid_spacing = op.grid_spacing;
    spec.domain_length = op.domain_length;
    spec.boundary = op.boundary;
    return spec;
}

long eigenvalue_count_below(const DiscretizedOperator& op, double energy) {
    return SturmSolver(op).count_below(energy);
}

} // namespace bosegas
