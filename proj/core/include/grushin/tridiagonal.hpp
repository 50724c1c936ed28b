#pragma once

#include <vector>

namespace grushin::tridiag {

// Symmetric tridiagonal matrix: diagonal d (size n), off-diagonal e (size n-1).
struct SymTridiag {
    std::vector<double> d;
    std::vector<double> e;
    int size() const { return static_cast<int>(d.size()); }
};

// Number of eigenvalues strictly below lambda (Sturm sequence).
int sturm_count(const SymTridiag& t, double lambda);

// Lowest `count` eigenvalues, ascending, by bisection on Sturm counts.
std::vector<double> lowest_eigenvalues(const SymTridiag& t, int count);

// Eigenvector of an (accurately known) eigenvalue by twisted factorization,
// returned as sign and log|v_i| with unit Euclidean norm. Exponentially small
// tails keep their relative accuracy.
struct LogVector {
    std::vector<int> sign;
    std::vector<double> log_abs;
};
LogVector eigenvector(const SymTridiag& t, double lambda);

// y = T x
std::vector<double> multiply(const SymTridiag& t, const std::vector<double>& x);

}  // namespace grushin::tridiag
