#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace subdif::quadrature {

// Gauss-Kronrod 7-15 pair (QUADPACK constants), abscissae in [0,1) mirrored.
struct GK15 {
    static constexpr double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

struct Interval {
    double a, b, integral, error;
};

template <typename F>
inline Interval gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = half * GK15::xgk[i];
        const double f1 = f(c - dx);
        const double f2 = (i == 7) ? f1 : f(c + dx);
        const double fsum = (i == 7) ? f1 : f1 + f2;
        resk += GK15::wgk[i] * fsum;
        if (i % 2 == 1) resg += GK15::wg[i / 2] * fsum;
    }
    resk *= half;
    resg *= half;
    return {a, b, resk, std::abs(resk - resg)};
}

// Adaptive bisection on the GK15 error estimate. Throws std::runtime_error
// when the subdivision budget is exhausted before reaching the tolerance.
template <typename F>
inline double integrate(F&& f, double a, double b, double abs_tol = 1e-14,
                        double rel_tol = 1e-12, int max_intervals = 4000) {
    if (a == b) return 0.0;
    std::vector<Interval> stack;
    stack.push_back(gk15(f, a, b));
    double total = stack.back().integral;
    int used = 1;
    while (true) {
        double err = 0.0, sum = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < stack.size(); ++i) {
            err += stack[i].error;
            sum += stack[i].integral;
            if (stack[i].error > stack[worst].error) worst = i;
        }
        total = sum;
        if (err <= abs_tol + rel_tol * std::abs(sum)) return total;
        if (used >= max_intervals)
            throw std::runtime_error("adaptive quadrature budget exhausted");
        Interval w = stack[worst];
        const double m = 0.5 * (w.a + w.b);
        if (m == w.a || m == w.b) return total;  // interval at rounding limit
        stack[worst] = gk15(f, w.a, m);
        stack.push_back(gk15(f, m, w.b));
        ++used;
    }
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
}

// Fixed 64-point Gauss-Legendre on [a,b].
template <typename F>
inline double gauss64(F&& f, double a, double b) {
    static const auto table = [] {
        std::vector<double> x, w;
        gauss_legendre(64, x, w);
        return std::pair{x, w};
    }();
    const double c = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 64; ++i) s += table.second[i] * f(c + half * table.first[i]);
    return s * half;
}

}  // namespace subdif::quadrature
