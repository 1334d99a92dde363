#include "subdif/nonlocal.hpp"

#include <cmath>
#include <stdexcept>

namespace subdif {

NonlocalOperator::NonlocalOperator(DiscreteKernel k) : kernel(std::move(k)) {
    double scale = 0.0;
    for (double w : kernel.weights) scale = std::max(scale, std::abs(w));
    const double slack = kTolNonneg * (1.0 + scale);
    if (negativity_defect(kernel) > slack)
        throw std::invalid_argument("NonlocalOperator: kernel weights must be nonnegative");
    if (monotonicity_defect(kernel) > slack)
        throw std::invalid_argument("NonlocalOperator: kernel weights must be nonincreasing");
}

std::vector<double> apply(const NonlocalOperator& op, std::span<const double> v, double v0) {
    const int n = op.kernel.grid.steps;
    if (static_cast<int>(v.size()) != n + 1)
        throw std::invalid_argument("apply: trajectory must have N+1 nodes");
    if (std::abs(v[0] - v0) > 1e-14 * (1.0 + std::abs(v0)))
        throw std::invalid_argument("apply: v[0] must equal v0");
    std::vector<double> d(static_cast<std::size_t>(n) + 1, 0.0);
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int j = 1; j <= m; ++j)
            s += op.kernel.cell(m - j + 1) *
                 (v[static_cast<std::size_t>(j)] - v[static_cast<std::size_t>(j) - 1]);
        d[static_cast<std::size_t>(m)] = s;
    }
    return d;
}

ImplicitSplit implicit_split(const NonlocalOperator& op, std::span<const double> history) {
    const int n = static_cast<int>(history.size());
    if (n < 1) throw std::invalid_argument("implicit_split: history must contain v[0..n-1], n >= 1");
    const double diag = op.kernel.cell(1);
    double acc = 0.0;
    for (int j = 1; j <= n - 1; ++j)
        acc += op.kernel.cell(n - j + 1) *
               (history[static_cast<std::size_t>(j)] - history[static_cast<std::size_t>(j) - 1]);
    return {diag, diag * history[static_cast<std::size_t>(n) - 1] - acc};
}

double convexity_margin(const NonlocalOperator& op, const std::function<double(double)>& H,
                        const std::function<double(double)>& H_prime, std::span<const double> v,
                        double v0) {
    const int n = op.kernel.grid.steps;
    std::vector<double> hv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) hv[i] = H(v[i]);
    const std::vector<double> dv = apply(op, v, v0);
    const std::vector<double> dh = apply(op, hv, H(v0));
    double margin = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= n; ++m) {
        const std::size_t i = static_cast<std::size_t>(m);
        margin = std::min(margin, H_prime(v[i]) * dv[i] - dh[i]);
    }
    return margin;
}

}  // namespace subdif
