#pragma once

#include <vector>

namespace crossdiff {

/// General banded matrix with kl sub- and ku super-diagonals, LU-factored in
/// place with partial pivoting (band storage keeps kl extra super-diagonals for
/// pivoting fill-in).
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    void zero();

    /// Entry A(i, j); only positions with -ku <= i - j <= kl are stored.
    double& at(int i, int j) { return ab_[index(i, j)]; }
    double at(int i, int j) const { return ab_[index(i, j)]; }

    /// In-place LU with partial pivoting. Throws solver_error on a zero pivot
    /// (reporting its index). The matrix can no longer be assembled into.
    void factorize();

    /// Solves A x = b using the stored factorization; b is overwritten by x.
    void solve(std::vector<double>& b) const;

    bool factored() const { return factored_; }

private:
    std::size_t index(int i, int j) const;

    int n_, kl_, ku_, rows_;
    std::vector<double> ab_;   // rows_ x n_; A(i,j) at row kl_+ku_+i-j, column j
    std::vector<int> ipiv_;
    bool factored_ = false;
};

}  // namespace crossdiff
