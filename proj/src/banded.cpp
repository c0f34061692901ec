#include "crossdiff/banded.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "crossdiff/errors.hpp"

namespace crossdiff {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), rows_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(rows_) * n, 0.0), ipiv_(n, 0) {
    assert(n > 0 && kl >= 0 && ku >= 0);
}

void BandedMatrix::zero() {
    std::fill(ab_.begin(), ab_.end(), 0.0);
    factored_ = false;
}

std::size_t BandedMatrix::index(int i, int j) const {
    const int r = kl_ + ku_ + i - j;
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    assert(r >= 0 && r < rows_);
    return static_cast<std::size_t>(r) * n_ + j;
}

void BandedMatrix::factorize() {
    const int band_hi = kl_ + ku_;  // fill-in extends the upper bandwidth to kl+ku
    for (int j = 0; j < n_; ++j) {
        const int i_max = std::min(n_ - 1, j + kl_);
        int piv = j;
        double piv_val = std::abs(at(j, j));
        for (int i = j + 1; i <= i_max; ++i) {
            const double v = std::abs(at(i, j));
            if (v > piv_val) {
                piv = i;
                piv_val = v;
            }
        }
        ipiv_[j] = piv;
        if (piv_val == 0.0)
            throw solver_error("banded LU: zero pivot at index " + std::to_string(j));
        const int c_max = std::min(n_ - 1, j + band_hi);
        if (piv != j)
            for (int c = j; c <= c_max; ++c) std::swap(at(j, c), at(piv, c));
        const double d = at(j, j);
        for (int i = j + 1; i <= i_max; ++i) {
            const double l = at(i, j) / d;
            at(i, j) = l;
            if (l != 0.0)
                for (int c = j + 1; c <= c_max; ++c) at(i, c) -= l * at(j, c);
        }
    }
    factored_ = true;
}

void BandedMatrix::solve(std::vector<double>& b) const {
    assert(factored_);
    assert(static_cast<int>(b.size()) == n_);
    const int band_hi = kl_ + ku_;
    for (int j = 0; j < n_; ++j) {
        if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
        const int i_max = std::min(n_ - 1, j + kl_);
        for (int i = j + 1; i <= i_max; ++i) b[i] -= at(i, j) * b[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
        const int c_max = std::min(n_ - 1, j + band_hi);
        double s = b[j];
        for (int c = j + 1; c <= c_max; ++c) s -= at(j, c) * b[c];
        b[j] = s / at(j, j);
    }
}

}  // namespace crossdiff
