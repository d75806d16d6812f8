#pragma once

#include <utility>
#include <vector>

#include "bosegas/operators.hpp"

namespace bosegas {

/// Symmetric tridiagonal matrix: diag has n entries, offdiag n-1.
struct SymmetricTridiagonal {
    std::vector<double> diag;
    std::vector<double> offdiag;
};

/// Ascending eigenvalues with the provenance needed to interpret them.
/// grid_spacing == 0 marks an analytic (grid-free) spectrum.
struct Spectrum {
    std::vector<double> eigenvalues;
    double grid_spacing = 0.0;
    double domain_length = 0.0;
    BoundaryCondition boundary = BoundaryCondition::dirichlet;

    std::size_t size() const { return eigenvalues.size(); }
};

/// Bisection eigensolver driven by Sturm sequence sign counts (LDL^T pivots).
/// Robust on the tridiagonal form; each returned eigenvalue is the midpoint
/// of a bracket of width <= max(tol, a few ulps of the bracket endpoints).
class SturmSolver {
public:
    explicit SturmSolver(const SymmetricTridiagonal& matrix);
    explicit SturmSolver(const DiscretizedOperator& op);

    std::size_t dimension() const { return diag_.size(); }

    /// Number of eigenvalues strictly below x.
    long count_below(double x) const;

    /// Gershgorin disc bounds: every eigenvalue lies in [first, second].
    std::pair<double, double> gershgorin_bounds() const;

    /// The k smallest eigenvalues, ascending.  1 <= k <= dimension.
    std::vector<double> lowest(int k, double tol) const;

    /// All eigenvalues strictly below cutoff, ascending (possibly empty).
    std::vector<double> below(double cutoff, double tol) const;

private:
    std::vector<double> extract(double lo, long k, double hi, double tol) const;

    std::vector<double> diag_;
    std::vector<double> offdiag2_; // squared off-diagonal entries
};

/// k lowest eigenvalues of a discretized operator, with provenance.
Spectrum lowest_eigenvalues(const DiscretizedOperator& op, int k, double tol);

/// All eigenvalues below the cutoff (ascending).
Spectrum eigenvalues_below(const DiscretizedOperator& op, double cutoff, double tol);

/// |{ j : E_j < energy }| without extracting eigenvalues (one Sturm pass).
long eigenvalue_count_below(const DiscretizedOperator& op, double energy);

} // namespace bosegas
