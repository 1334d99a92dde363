#pragma once

#include <functional>
#include <span>

#include "subdif/spatial.hpp"

namespace subdif {

/// Monotone C^1 nonlinearity phi with phi(0) = 0, its derivative, and its
/// primitive Phi(r) = int_0^r phi. mu is a lower slope bound valid for
/// |r| >= R; c0/c1 are global slope bounds (c0 > 0 means nondegenerate).
struct Nonlinearity {
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
    std::function<double(double)> primitive;
    double mu = 0.0;
    double R = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;

    bool nondegenerate() const { return c0 > 0.0; }

    static Nonlinearity identity();
    /// phi(r) = |r|^{m-1} r, m > 1 (degenerate at 0).
    static Nonlinearity porous_medium(double m);
};

/// C^1 truncation: phi on [-M, M], affine with matching value and slope
/// outside. The primitive extends quadratically.
Nonlinearity truncate(const Nonlinearity& f, double M);

/// phi + eps * id, eps > 0; lower slope bound becomes c0 + eps.
Nonlinearity regularize(const Nonlinearity& f, double eps);

/// h * sum_i Phi(u_i) over interior nodes.
double primitive_mass(const Nonlinearity& f, const Mesh1D& mesh, std::span<const double> u);

}  // namespace subdif
