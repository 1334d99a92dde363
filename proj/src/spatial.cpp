#include "subdif/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace subdif {

Mesh1D::Mesh1D(double L, int Nx) : length(L), cells(Nx) {
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("Mesh1D: length must be positive");
    if (Nx < 3) throw std::invalid_argument("Mesh1D: at least 3 cells required");
}

double Mesh1D::poincare_constant() const { return length / M_PI; }

CoefficientField CoefficientField::constant(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("CoefficientField: constant must be positive");
    return {[a](double, int) { return a; }, a, a};
}

std::vector<double> tridiag_solve(std::span<const double> sub, std::span<const double> diag,
                                  std::span<const double> sup, std::span<const double> rhs) {
    const int n = static_cast<int>(diag.size());
    if (static_cast<int>(sub.size()) != n - 1 || static_cast<int>(sup.size()) != n - 1 ||
        static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("tridiag_solve: inconsistent band sizes");
    std::vector<double> d(diag.begin(), diag.end());
    std::vector<double> e(sup.begin(), sup.end());                                // first super
    std::vector<double> f(n > 1 ? static_cast<std::size_t>(n - 2) : 0, 0.0);      // fill-in super
    std::vector<double> x(rhs.begin(), rhs.end());

    for (int i = 0; i + 1 < n; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        const double below = sub[si];
        if (std::abs(below) > std::abs(d[si])) {
            // swap rows i, i+1; row i+1's old entries move up one column slot
            std::swap(x[si], x[si + 1]);
            const double r0 = d[si], r1 = e[si], r2 = (i + 2 < n) ? f[si] : 0.0;
            d[si] = below;
            e[si] = d[si + 1];
            if (i + 2 < n) f[si] = e[si + 1];
            const double m = r0 / d[si];
            d[si + 1] = r1 - m * e[si];
            if (i + 2 < n) e[si + 1] = r2 - m * f[si];
            x[si + 1] -= m * x[si];
        } else {
            if (d[si] == 0.0) throw std::runtime_error("tridiag_solve: singular system");
            const double m = below / d[si];
            d[si + 1] -= m * e[si];
            if (i + 2 < n) e[si + 1] -= m * f[si];
            x[si + 1] -= m * x[si];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        const std::size_t si = static_cast<std::size_t>(i);
        double s = x[si];
        if (i + 1 < n) s -= e[si] * x[si + 1];
        if (i + 2 < n) s -= f[si] * x[si + 2];
        if (d[si] == 0.0) throw std::runtime_error("tridiag_solve: singular system");
        x[si] = s / d[si];
    }
    return x;
}

std::vector<double> StiffnessMatrix::apply(std::span<const double> v) const {
    const int n = size();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        double s = diag[si] * v[si];
        if (i > 0) s += off[si - 1] * v[si - 1];
        if (i + 1 < n) s += off[si] * v[si + 1];
        out[si] = s;
    }
    return out;
}

std::vector<double> StiffnessMatrix::solve(std::span<const double> rhs) const {
    return tridiag_solve(off, diag, off, rhs);
}

double StiffnessMatrix::quadratic_form(std::span<const double> v) const {
    const std::vector<double> kv = apply(v);
    double s = 0.0;
    for (std::size_t i = 0; i < kv.size(); ++i) s += v[i] * kv[i];
    return s;
}

StiffnessMatrix assemble(const Mesh1D& mesh, const CoefficientField& coeff, double t) {
    const int nx = mesh.cells;
    const double h2 = mesh.h() * mesh.h();
    std::vector<double> a(static_cast<std::size_t>(nx));
    for (int c = 1; c <= nx; ++c) {
        const double v = coeff.value(t, c);
        const double slack = 1e-12 * (1.0 + std::abs(coeff.nu) + std::abs(coeff.a_max));
        if (!std::isfinite(v) || v < coeff.nu - slack || v > coeff.a_max + slack)
            throw std::runtime_error("assemble: coefficient bound violated at t=" + std::to_string(t) +
                                     ", cell=" + std::to_string(c));
        a[static_cast<std::size_t>(c) - 1] = v;
    }
    StiffnessMatrix K;
    K.h = mesh.h();
    K.time = t;
    K.diag.resize(static_cast<std::size_t>(mesh.interior()));
    K.off.resize(static_cast<std::size_t>(mesh.interior() - 1));
    for (int i = 1; i <= mesh.interior(); ++i) {
        K.diag[static_cast<std::size_t>(i) - 1] =
            (a[static_cast<std::size_t>(i) - 1] + a[static_cast<std::size_t>(i)]) / h2;
        if (i < mesh.interior()) K.off[static_cast<std::size_t>(i) - 1] = -a[static_cast<std::size_t>(i)] / h2;
    }
    return K;
}

double hminus1_norm(const Mesh1D& mesh, std::span<const double> w) {
    if (static_cast<int>(w.size()) != mesh.interior())
        throw std::invalid_argument("hminus1_norm: interior vector expected");
    const StiffnessMatrix K1 = assemble(mesh, CoefficientField::constant(1.0), 0.0);
    const std::vector<double> z = K1.solve(w);
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += w[i] * z[i];
    return std::sqrt(std::max(0.0, s) * mesh.h());
}

FieldNorms space_norms(const Mesh1D& mesh, std::span<const double> u) {
    if (static_cast<int>(u.size()) != mesh.interior())
        throw std::invalid_argument("space_norms: interior vector expected");
    const double h = mesh.h();
    FieldNorms n;
    double sq = 0.0, grad_sq = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        n.l1 += std::abs(u[i]);
        sq += u[i] * u[i];
        n.linf = std::max(n.linf, std::abs(u[i]));
        const double d = u[i] - prev;
        grad_sq += d * d;
        prev = u[i];
    }
    grad_sq += prev * prev;  // face into the right boundary node
    n.l1 *= h;
    n.l2 = std::sqrt(h * sq);
    n.grad_l2 = std::sqrt(grad_sq / h);
    return n;
}

TrajectoryNorms space_time_norms(const Mesh1D& mesh, double tau,
                                 const std::vector<std::vector<double>>& u) {
    TrajectoryNorms n;
    double sq = 0.0, grad_sq = 0.0;
    for (std::size_t step = 1; step < u.size(); ++step) {
        const FieldNorms fn = space_norms(mesh, u[step]);
        n.l1 += fn.l1;
        sq += fn.l2 * fn.l2;
        grad_sq += fn.grad_l2 * fn.grad_l2;
        n.linf = std::max(n.linf, fn.linf);
    }
    n.l1 *= tau;
    n.l2 = std::sqrt(tau * sq);
    n.grad_l2 = std::sqrt(tau * grad_sq);
    return n;
}

}  // namespace subdif
