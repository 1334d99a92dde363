#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace subdif {

// Slack used for nonnegativity / monotonicity checks of discrete kernels.
// Forward substitution and adaptive quadrature round at this level.
inline constexpr double kTolNonneg = 1e-10;

/// Uniform grid on [0, T] with nodes t_n = n*tau, tau = T/N.
struct TimeGrid {
    double horizon = 1.0;  // T
    int steps = 1;         // N

    TimeGrid() = default;
    TimeGrid(double T, int N);

    double tau() const { return horizon / steps; }
    double node(int n) const { return tau() * n; }
    bool same_as(const TimeGrid& o) const;
};

enum class KernelFamily { Fractional, Tempered, DistributedOrder };
enum class KernelSide { K, L };

/// A PC pair (k, l): k nonnegative nonincreasing with k*l = 1 on (0,inf).
///
/// Families:
///   Fractional(alpha):       k = g_{1-alpha},  l = g_alpha
///   Tempered(alpha, gamma):  k = g_{1-alpha} e^{-gamma t},
///                            l = g_alpha e^{-gamma t} + gamma (1 * [g_alpha e^{-gamma .}])
///   DistributedOrder:        k = int_0^1 g_beta dbeta,  l = e^t E_1(t)
/// where g_beta(t) = t^{beta-1} / Gamma(beta).
struct KernelPair {
    KernelFamily family = KernelFamily::Fractional;
    double alpha = 0.5;      // order, in (0,1); unused for DistributedOrder
    double tempering = 0.0;  // gamma_t > 0, Tempered only

    static KernelPair fractional(double alpha);
    static KernelPair tempered(double alpha, double gamma_t);
    static KernelPair distributed_order();

    /// Pointwise evaluators, t > 0.
    double eval(KernelSide side, double t) const;
};

/// Cell averages of a kernel on a TimeGrid: cell(j) = (1/tau) * int over
/// (t_{j-1}, t_j), j = 1..N.
struct DiscreteKernel {
    TimeGrid grid;
    std::vector<double> weights;  // weights[j-1] = cell(j)

    DiscreteKernel() = default;
    DiscreteKernel(TimeGrid g, std::vector<double> w);

    int size() const { return static_cast<int>(weights.size()); }
    double cell(int j) const { return weights[static_cast<std::size_t>(j) - 1]; }
    double& cell(int j) { return weights[static_cast<std::size_t>(j) - 1]; }

    /// Discrete L1 norm tau * sum_j cell(j)  (= int_0^T w for exact averages).
    double l1_norm() const;
};

/// max(0, -min_j w(j)): how far the kernel dips below zero.
double negativity_defect(const DiscreteKernel& w);
/// max(0, max_j (w(j+1) - w(j))): how far the kernel fails to be nonincreasing.
double monotonicity_defect(const DiscreteKernel& w);

/// Cell averages of k or l. Fractional uses the antiderivative g_{beta+1}
/// exactly; Tempered factors the t^{-alpha} (resp. t^{alpha-1}) singularity
/// out of the first cell and uses adaptive Gauss-Kronrod elsewhere;
/// DistributedOrder integrates over the order with 64-point Gauss-Legendre
/// (k) and uses the antiderivative of e^t E_1(t) (l).
/// Throws std::runtime_error naming the cell if quadrature does not converge.
DiscreteKernel sample_cell_averages(const KernelPair& pair, KernelSide side, const TimeGrid& grid);

/// Lag-cell x right-endpoint rule: c[n] = tau * sum_{j=1..n} a(j) v[n-j+1],
/// c[0] = 0. v is a node trajectory of size N+1 (v[0] is never used).
std::vector<double> convolve(const DiscreteKernel& a, std::span<const double> v);

/// Cell-function x cell-function product rule with the same pairing:
/// c(m) = tau * sum_{j=1..m} a(j) b(m-j+1).
DiscreteKernel kernel_convolve(const DiscreteKernel& a, const DiscreteKernel& b);

/// Solutions of the three scalar Volterra systems driven by l:
///   s_g + g (l * s_g) = 1,  r_g + g (l * r_g) = l,  h_g + g (h_g * l) = g l,
/// discretized with the kernel_convolve rule and solved by forward
/// substitution (pivot 1 + g tau l(1) >= 1).
struct ResolventSet {
    double gamma = 0.0;
    DiscreteKernel h, s, r;
};

ResolventSet resolvent_kernel(const DiscreteKernel& l, double gamma);

/// k_g = k * h_g (discrete product rule).
DiscreteKernel regularized_kernel(const DiscreteKernel& k, const ResolventSet& res);

/// Defect of the discrete PC identity k*l = 1 plus sign/monotonicity defects.
///
/// mean_abs_defect is the time-averaged |(k conv l)(m) - 1| over cells; the
/// first-cell value of the product rule carries an O(1) boundary error for
/// singular pairs (4/pi - 1 for alpha = 1/2), so the worst single cell is
/// reported separately and the pass verdict uses the averaged defect.
struct PcCheck {
    double mean_abs_defect = 0.0;
    double max_abs_defect = 0.0;
    double k_monotonicity_defect = 0.0;
    double l_negativity_defect = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

PcCheck verify_pc_pair(const KernelPair& pair, const TimeGrid& grid, double tol);

/// e(g) = tau * sum_n |(h_g conv f)[n] - f[n]| for each g in gammas
/// (gammas strictly increasing). Caller asserts monotone decrease.
std::vector<double> yosida_convergence(const DiscreteKernel& l, std::span<const double> f,
                                       std::span<const double> gammas);

/// CSV with header "j,weight", one cell per line.
std::string kernel_to_csv(const DiscreteKernel& w);

}  // namespace subdif
