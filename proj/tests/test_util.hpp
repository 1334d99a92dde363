#pragma once

// Test-only oracles, kept independent of the library's computation paths.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace testutil {

// Regularized lower incomplete gamma P(a, x), series for x < a+1 and
// continued fraction otherwise (classic gammp).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16)
                return sum * std::exp(-x + a * std::log(x) - lg);
        }
        throw std::runtime_error("gamma_p: series did not converge");
    }
    double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - lg) * h;
}

// Composite Simpson on n (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        if (A[col][col] == 0.0) throw std::runtime_error("dense_solve: singular");
        for (int r = col + 1; r < n; ++r) {
            const double m = A[r][col] / A[col][col];
            if (m == 0.0) continue;
            for (int c = col; c < n; ++c) A[r][c] -= m * A[col][c];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

// Cyclic Jacobi eigen decomposition of a symmetric matrix; returns
// eigenvalues (ascending) and stores eigenvectors as columns of V.
inline std::vector<double> jacobi_eigen(std::vector<std::vector<double>> A,
                                        std::vector<std::vector<double>>* V = nullptr) {
    const int n = static_cast<int>(A.size());
    std::vector<std::vector<double>> vec(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) vec[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A[p][q] * A[p][q];
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(A[p][q]) < 1e-300) continue;
                const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                    const double vkp = vec[k][p], vkq = vec[k][q];
                    vec[k][p] = c * vkp - s * vkq;
                    vec[k][q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = A[i][i];
    // sort ascending, permuting columns of vec alongside
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (ev[j] < ev[i]) {
                std::swap(ev[i], ev[j]);
                for (int k = 0; k < n; ++k) std::swap(vec[k][i], vec[k][j]);
            }
    if (V) *V = vec;
    return ev;
}

}  // namespace testutil
