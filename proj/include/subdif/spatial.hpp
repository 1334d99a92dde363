#pragma once

#include <functional>
#include <span>
#include <vector>

namespace subdif {

/// Uniform mesh on (0, L) with Nx cells of width h = L/Nx. Interior nodes
/// x_i = i h, i = 1..Nx-1; homogeneous Dirichlet values at x_0 and x_Nx.
/// Interior node vectors have size Nx-1 throughout.
struct Mesh1D {
    double length = 1.0;  // L
    int cells = 3;        // Nx

    Mesh1D() = default;
    Mesh1D(double L, int Nx);

    double h() const { return length / cells; }
    int interior() const { return cells - 1; }
    double node(int i) const { return h() * i; }
    /// Continuum Poincare constant of the interval, C_P = L / pi.
    double poincare_constant() const;
};

/// Bounded measurable coefficient a(t, x), sampled cellwise: cell c = 1..Nx
/// spans [x_{c-1}, x_c]. Bounds nu <= a <= a_max are checked on every
/// assembly.
struct CoefficientField {
    std::function<double(double t, int cell)> value;
    double nu = 1.0;
    double a_max = 1.0;

    static CoefficientField constant(double a);
};

/// General tridiagonal solve (LU with partial pivoting; fill-in confined to
/// a second superdiagonal). Sizes: sub n-1, diag n, sup n-1.
std::vector<double> tridiag_solve(std::span<const double> sub, std::span<const double> diag,
                                  std::span<const double> sup, std::span<const double> rhs);

/// Finite-volume stiffness of -(a u_x)_x on interior nodes:
/// (K v)_i = [a_i (v_i - v_{i-1}) - a_{i+1} (v_{i+1} - v_i)] / h^2,
/// v_0 = v_Nx = 0. Symmetric M-matrix.
struct StiffnessMatrix {
    std::vector<double> diag;  // size Nx-1
    std::vector<double> off;   // off[i]: coupling (i, i+1), size Nx-2
    double h = 1.0;
    double time = 0.0;

    int size() const { return static_cast<int>(diag.size()); }
    std::vector<double> apply(std::span<const double> v) const;
    std::vector<double> solve(std::span<const double> rhs) const;
    /// v^T K v (the h-unweighted quadratic form).
    double quadratic_form(std::span<const double> v) const;
};

/// Throws std::runtime_error naming (t, cell) when a bound is violated.
StiffnessMatrix assemble(const Mesh1D& mesh, const CoefficientField& coeff, double t);

/// Discrete H^{-1} norm sqrt(w^T K_1^{-1} w * h), K_1 the unit-coefficient
/// stiffness: exact dual norm of the discrete H^1_0 seminorm.
double hminus1_norm(const Mesh1D& mesh, std::span<const double> w);

struct FieldNorms {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double grad_l2 = 0.0;
};

/// Composite norms of an interior node vector; gradient differences include
/// the zero boundary nodes.
FieldNorms space_norms(const Mesh1D& mesh, std::span<const double> u);

struct TrajectoryNorms {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    double grad_l2 = 0.0;
};

/// Space-time norms over (0,T) x Omega: spatial sums weighted by h, time by
/// tau, right-endpoint in time (n = 1..N).
TrajectoryNorms space_time_norms(const Mesh1D& mesh, double tau,
                                 const std::vector<std::vector<double>>& u);

}  // namespace subdif
