#include "relucert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "relucert/errors.hpp"

namespace relucert {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    }
    return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    std::vector<double> y(static_cast<std::size_t>(a.rows), 0.0);
    for (int i = 0; i < a.rows; ++i) y[static_cast<std::size_t>(i)] = dot(a.row(i), x);
    return y;
}

Matrix gram(const Matrix& a) {
    Matrix g(a.cols, a.cols);
    for (int i = 0; i < a.rows; ++i) {
        auto r = a.row(i);
        for (int p = 0; p < a.cols; ++p) {
            double v = r[static_cast<std::size_t>(p)];
            if (v == 0.0) continue;
            for (int q = p; q < a.cols; ++q) g.at(p, q) += v * r[static_cast<std::size_t>(q)];
        }
    }
    for (int p = 0; p < a.cols; ++p)
        for (int q = 0; q < p; ++q) g.at(p, q) = g.at(q, p);
    return g;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i)
        for (int j = i + 1; j < a.cols; ++j) s += a.at(i, j) * a.at(i, j);
    return std::sqrt(2.0 * s);
}

// One cyclic sweep of Jacobi rotations on a; accumulates into v when given.
void jacobi_sweep(Matrix& a, Matrix* v) {
    int n = a.rows;
    for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
            double apq = a.at(p, q);
            if (apq == 0.0) continue;
            double app = a.at(p, p);
            double aqq = a.at(q, q);
            double theta = (aqq - app) / (2.0 * apq);
            double t = (theta >= 0.0 ? 1.0 : -1.0) /
                       (std::abs(theta) + std::sqrt(theta * theta + 1.0));
            double c = 1.0 / std::sqrt(t * t + 1.0);
            double s = t * c;
            for (int k = 0; k < n; ++k) {
                double akp = a.at(k, p);
                double akq = a.at(k, q);
                a.at(k, p) = c * akp - s * akq;
                a.at(k, q) = s * akp + c * akq;
            }
            for (int k = 0; k < n; ++k) {
                double apk = a.at(p, k);
                double aqk = a.at(q, k);
                a.at(p, k) = c * apk - s * aqk;
                a.at(q, k) = s * apk + c * aqk;
            }
            if (v != nullptr) {
                for (int k = 0; k < n; ++k) {
                    double vkp = v->at(k, p);
                    double vkq = v->at(k, q);
                    v->at(k, p) = c * vkp - s * vkq;
                    v->at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
}

void jacobi_run(Matrix& a, Matrix* v, int max_sweeps) {
    int n = a.rows;
    if (n == 0) return;
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(a.at(i, j)));
    if (scale == 0.0) return;
    double tol = scale * n * std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= tol) break;
        jacobi_sweep(a, v);
    }
}

}  // namespace

EigenResult jacobi_eigen(const Matrix& sym, int max_sweeps) {
    Matrix a = sym;
    Matrix v = Matrix::identity(sym.rows);
    jacobi_run(a, &v, max_sweeps);

    int n = sym.rows;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&a](int i, int j) { return a.at(i, i) < a.at(j, j); });

    EigenResult res;
    res.values.resize(static_cast<std::size_t>(n));
    res.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        int src = order[static_cast<std::size_t>(j)];
        res.values[static_cast<std::size_t>(j)] = a.at(src, src);
        for (int i = 0; i < n; ++i) res.vectors.at(i, j) = v.at(i, src);
    }
    return res;
}

std::vector<double> jacobi_eigenvalues(const Matrix& sym, int max_sweeps) {
    Matrix a = sym;
    jacobi_run(a, nullptr, max_sweeps);
    std::vector<double> vals(static_cast<std::size_t>(sym.rows));
    for (int i = 0; i < sym.rows; ++i) vals[static_cast<std::size_t>(i)] = a.at(i, i);
    std::sort(vals.begin(), vals.end());
    return vals;
}

int numerical_rank(const Matrix& a, double tol_scale) {
    if (a.rows == 0 || a.cols == 0) return 0;
    // Work with the smaller Gram matrix; its eigenvalues are sigma^2.
    Matrix g = (a.cols <= a.rows) ? gram(a) : gram(transpose(a));
    std::vector<double> ev = jacobi_eigenvalues(g);
    double sigma_max = std::sqrt(std::max(0.0, ev.empty() ? 0.0 : ev.back()));
    double tau = tol_scale * std::max(a.rows, a.cols) * sigma_max;
    int rank = 0;
    for (double lambda : ev)
        if (lambda > 0.0 && std::sqrt(lambda) > tau) ++rank;
    return rank;
}

double spectral_norm(const Matrix& a) {
    if (a.rows == 0 || a.cols == 0) return 0.0;
    Matrix g = (a.cols <= a.rows) ? gram(a) : gram(transpose(a));
    std::vector<double> ev = jacobi_eigenvalues(g);
    return std::sqrt(std::max(0.0, ev.back()));
}

Matrix cholesky(const Matrix& spd) {
    int n = spd.rows;
    Matrix l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = spd.at(i, j);
            for (int k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (s <= 0.0) throw numeric_error("cholesky: matrix not positive definite");
                l.at(i, i) = std::sqrt(s);
            } else {
                l.at(i, j) = s / l.at(j, j);
            }
        }
    }
    return l;
}

std::vector<double> cholesky_solve(const Matrix& chol_lower, std::span<const double> rhs) {
    int n = chol_lower.rows;
    std::vector<double> y(rhs.begin(), rhs.end());
    for (int i = 0; i < n; ++i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= chol_lower.at(i, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / chol_lower.at(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= chol_lower.at(k, i) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / chol_lower.at(i, i);
    }
    return y;
}

std::vector<double> spd_solve(const Matrix& spd, std::span<const double> rhs) {
    return cholesky_solve(cholesky(spd), rhs);
}

QRResult householder_qr(const Matrix& a) {
    const int m = a.rows;
    const int n = a.cols;
    Matrix work = a;
    std::vector<std::vector<double>> reflectors;
    reflectors.reserve(static_cast<std::size_t>(n));

    for (int k = 0; k < n; ++k) {
        double norm_x = 0.0;
        for (int i = k; i < m; ++i) norm_x += work.at(i, k) * work.at(i, k);
        norm_x = std::sqrt(norm_x);
        std::vector<double> v(static_cast<std::size_t>(m - k), 0.0);
        if (norm_x > 0.0) {
            double alpha = work.at(k, k) >= 0.0 ? -norm_x : norm_x;
            v[0] = work.at(k, k) - alpha;
            for (int i = k + 1; i < m; ++i) v[static_cast<std::size_t>(i - k)] = work.at(i, k);
            double v2 = dot(v, v);
            if (v2 > 0.0) {
                for (int j = k; j < n; ++j) {
                    double tau = 0.0;
                    for (int i = k; i < m; ++i) tau += v[static_cast<std::size_t>(i - k)] * work.at(i, j);
                    tau *= 2.0 / v2;
                    for (int i = k; i < m; ++i) work.at(i, j) -= tau * v[static_cast<std::size_t>(i - k)];
                }
            } else {
                v.assign(v.size(), 0.0);
            }
        }
        reflectors.push_back(std::move(v));
    }

    QRResult out;
    out.r = Matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.r.at(i, j) = work.at(i, j);

    // Thin Q: apply the reflectors in reverse order to the first n columns
    // of the identity.
    out.q = Matrix(m, n);
    for (int j = 0; j < n; ++j) out.q.at(j, j) = 1.0;
    for (int k = n - 1; k >= 0; --k) {
        const std::vector<double>& v = reflectors[static_cast<std::size_t>(k)];
        double v2 = dot(v, v);
        if (v2 <= 0.0) continue;
        for (int j = 0; j < n; ++j) {
            double tau = 0.0;
            for (int i = k; i < m; ++i) tau += v[static_cast<std::size_t>(i - k)] * out.q.at(i, j);
            tau *= 2.0 / v2;
            for (int i = k; i < m; ++i) out.q.at(i, j) -= tau * v[static_cast<std::size_t>(i - k)];
        }
    }
    return out;
}

std::vector<double> upper_solve(const Matrix& r, std::span<const double> rhs) {
    int n = r.rows;
    std::vector<double> x(rhs.begin(), rhs.end());
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= r.at(i, j) * x[static_cast<std::size_t>(j)];
        double diag = r.at(i, i);
        if (diag == 0.0) throw numeric_error("upper_solve: singular triangular factor");
        x[static_cast<std::size_t>(i)] = s / diag;
    }
    return x;
}

std::size_t binomial_capped(int m, int n, std::size_t cap) {
    if (n < 0 || n > m) return 0;
    n = std::min(n, m - n);
    long double acc = 1.0L;
    for (int i = 1; i <= n; ++i) {
        acc = acc * static_cast<long double>(m - n + i) / static_cast<long double>(i);
        if (acc > 2.0L * static_cast<long double>(cap)) return cap + 1;
    }
    if (acc > static_cast<long double>(cap) + 0.5L) return cap + 1;
    std::size_t exact = 1;
    for (int i = 1; i <= n; ++i)
        exact = exact * static_cast<std::size_t>(m - n + i) / static_cast<std::size_t>(i);
    return exact > cap ? cap + 1 : exact;
}

}  // namespace relucert
