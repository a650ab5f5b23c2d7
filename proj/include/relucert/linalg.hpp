#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace relucert {

/// Dense row-major matrix. Sizes stay at desk scale (a few hundred rows),
/// so everything here favors robustness over asymptotics.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    std::span<const double> row(int i) const {
        return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
    }

    static Matrix identity(int n);
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

/// Gram matrix A^T A (cols x cols).
Matrix gram(const Matrix& a);

struct EigenResult {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi iteration for symmetric matrices. Sweeps until the
/// off-diagonal mass is at machine-precision scale relative to the matrix.
EigenResult jacobi_eigen(const Matrix& sym, int max_sweeps = 128);

/// Eigenvalues only (same iteration, no accumulation of rotations).
std::vector<double> jacobi_eigenvalues(const Matrix& sym, int max_sweeps = 128);

/// Relative threshold scale used for numerical rank decisions:
/// tau = scale * max(rows, cols) * sigma_max.
inline constexpr double kRankTolScale = 1e-10;

/// Rank of a via singular values (square roots of Gram eigenvalues).
int numerical_rank(const Matrix& a, double tol_scale = kRankTolScale);

/// Largest singular value of a.
double spectral_norm(const Matrix& a);

/// Cholesky factor L (lower) of a symmetric positive definite matrix.
/// Throws numeric_error if the matrix is not positive definite.
Matrix cholesky(const Matrix& spd);

std::vector<double> cholesky_solve(const Matrix& chol_lower, std::span<const double> rhs);

/// Solve spd * x = rhs via Cholesky.
std::vector<double> spd_solve(const Matrix& spd, std::span<const double> rhs);

/// Thin Householder QR of a (rows >= cols): a = q * r with q orthonormal
/// columns (rows x cols) and r upper triangular (cols x cols).
struct QRResult {
    Matrix q;
    Matrix r;
};
QRResult householder_qr(const Matrix& a);

/// Back substitution for an upper triangular system r * x = rhs.
std::vector<double> upper_solve(const Matrix& r, std::span<const double> rhs);

/// Number of n-subsets of m elements, saturating at cap+1 to keep the
/// comparison against enumeration caps overflow-free.
std::size_t binomial_capped(int m, int n, std::size_t cap);

/// Visits every n-subset of {0..m-1} in lexicographic order.
/// The callback receives the current subset; returning false stops early.
template <typename F>
void for_each_subset(int m, int n, F&& fn) {
    if (n > m || n <= 0) return;
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        if (!fn(idx)) return;
        int k = n - 1;
        while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - n + k) --k;
        if (k < 0) return;
        ++idx[static_cast<std::size_t>(k)];
        for (int j = k + 1; j < n; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace relucert
