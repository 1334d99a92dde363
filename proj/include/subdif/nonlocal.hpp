#pragma once

#include <functional>
#include <span>
#include <vector>

#include "subdif/kernels.hpp"

namespace subdif {

/// Discrete nonlocal time derivative d/dt (k * [v - v0]) built from cell
/// averages of a nonnegative nonincreasing kernel. Integrating the piecewise
/// linear interpolant of v exactly against k gives
///   D[n] = sum_{j=1..n} k(n-j+1) (v[j] - v[j-1]),
/// the classical L1 scheme when k = g_{1-alpha}.
struct NonlocalOperator {
    DiscreteKernel kernel;

    explicit NonlocalOperator(DiscreteKernel k);
};

/// D[n] for n = 1..N (entry 0 is zero). Requires v[0] = v0 within 1e-14.
std::vector<double> apply(const NonlocalOperator& op, std::span<const double> v, double v0);

/// Rearrangement of apply for implicit stepping at step n given v[0..n-1]:
/// D[n] = diag * v[n] - rhs_history with diag = k(1).
struct ImplicitSplit {
    double diag;
    double rhs_history;
};

ImplicitSplit implicit_split(const NonlocalOperator& op, std::span<const double> history);

/// min over n of H'(v[n]) D_v[n] - D_{H(v)}[n]. Nonnegative (to rounding)
/// for convex H and nonincreasing nonnegative weights.
double convexity_margin(const NonlocalOperator& op, const std::function<double(double)>& H,
                        const std::function<double(double)>& H_prime, std::span<const double> v,
                        double v0);

}  // namespace subdif
