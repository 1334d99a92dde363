#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subdif/mittag_leffler.hpp"
#include "subdif/report.hpp"
#include "subdif/solver.hpp"

namespace subdif {

/// Integrability window tying the exponent p of l to the forcing exponents
/// (q1 in time, q2 in space): p'/q1 + d/(2 q2) = 1 - beta with beta in (0,1)
/// for d >= 2 and (0,1/2) for d = 1. Infinite exponents are admitted.
struct DataHypotheses {
    double p = 2.0;
    double q1 = 2.0;
    double q2 = 2.0;
    int d = 1;
    double beta = 0.0;
};

struct ExponentCheck {
    bool ok = false;
    DataHypotheses hypotheses;
    std::string violation;  // names the failed constraint
};

ExponentCheck check_exponents(double p, double q1, double q2, int d);

/// Measured L_inf constant C* = |u|_inf / (1 + max{R, |u0|_inf}) (finiteness
/// asserted); with zero forcing additionally the discrete maximum principle
/// |u|_inf <= |u0|_inf + 1e-10.
std::vector<CheckResult> linfty_check(const ProblemSpec& p, const Solution& s, bool forcing_is_zero);

/// Spread of C* over the last (up to) three continuation entries vs the 5%
/// stability budget. Requires at least two entries.
CheckResult linfty_stability_check(const ProblemSpec& p, const Solution& s);

/// L1 contraction in the proof form
///   |u1-u2|_{L1(O_T)} <= T |u01-u02|_{L1(O)} + |l|_{L1} |f1-f2|_{L1(O_T)};
/// the displayed variant without the forcing factor is noted alongside.
CheckResult l1_contraction_check(const ProblemSpec& p1, const Solution& s1, const ProblemSpec& p2,
                                 const Solution& s2);

/// Gradient energy bound
///   int int |grad v|^2 <= (2/nu) |k|_{L1} int Phi_eps(u0) + (C_P/nu)^2 |f|^2_{L2}.
CheckResult energy_check(const ProblemSpec& p, const Solution& s);

/// Time-translation bound from the compactness argument, at lag = lag_steps
/// cells: |tau_h u - u|_{L2((0,T-h);H^-1)} <= 2m (|tau_h l - l|_{L1} +
/// |chi_(0,h) l|_{L1}), m = |u|_{L2(H1)} + |d/dt k*(u-u0)|_{L2(H^-1)}.
CheckResult translation_modulus_check(const ProblemSpec& p, const Solution& s, int lag_steps);

/// translation_modulus_check over lags {tau, 2tau, 4tau, 8tau} plus RHS
/// monotonicity in the lag and RHS(tau)/RHS(8tau) < 1.
std::vector<CheckResult> translation_modulus_sweep(const ProblemSpec& p, const Solution& s);

/// Randomized convexity inequality margins (H in {y^2, smoothed |y|, exp},
/// trajectories uniform in [-1,1]); lhs is the worst normalized violation.
CheckResult convexity_suite(const NonlocalOperator& op, int trials, std::uint64_t seed);

struct BenchmarkRow {
    int steps = 0;
    int cells = 0;
    double linf_error = 0.0;      // over all nodes of (0,T] x Omega
    double final_l2_error = 0.0;  // at t = T
};

/// Solver error against the separated exact solution
/// u = E_alpha(-(pi/L)^2 t^alpha) sin(pi x / L) of the linear problem.
BenchmarkRow exact_linear_benchmark(double alpha, const Mesh1D& mesh, const TimeGrid& grid);

/// Ladder of time refinements (steps, steps*2, ..., doubling `doublings`
/// times) at fixed cell count.
std::vector<BenchmarkRow> benchmark_ladder(double alpha, double length, int cells, double horizon,
                                           int base_steps, int doublings);

/// Deterministic uniform doubles in [lo, hi) from a splitmix64 stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    double uniform(double lo, double hi);
    std::uint64_t next_u64();

  private:
    std::uint64_t state_;
};

}  // namespace subdif
