#include "subdif/mittag_leffler.hpp"

#include <cmath>
#include <stdexcept>

#include "subdif/quadrature.hpp"

namespace subdif {

namespace {

double series(double alpha, double z) {
    // Neumaier-compensated accumulation of sum_k z^k / Gamma(alpha k + 1).
    double sum = 1.0, comp = 0.0;
    const double lx = std::log(std::abs(z));
    for (int k = 1; k <= 20000; ++k) {
        const double mag = std::exp(k * lx - std::lgamma(alpha * k + 1.0));
        const double term = (k % 2 == 0) ? mag : -mag;
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        if (mag <= 1e-18 * (std::abs(sum) + std::abs(comp)) && k > 4) break;
    }
    return sum + comp;
}

double spectral(double alpha, double x) {
    const double X = std::pow(x, 1.0 / alpha);
    const double c = std::cos(M_PI * alpha);
    const double inv_a = 1.0 / alpha;
    // r in (0,1], r = y^{1/alpha}: weight r^{alpha-1} dr becomes dy/alpha.
    // For large X the mass sits in [0, (40/X)^alpha]; split there so the
    // adaptive rule cannot step over the spike.
    const auto f1 = [&](double y) {
        return std::exp(-X * std::pow(y, inv_a)) / (y * y + 2.0 * c * y + 1.0);
    };
    const double y_cut = std::min(1.0, std::pow(40.0 / X, alpha));
    double I1 = quadrature::integrate(f1, 0.0, y_cut, 1e-300, 1e-13, 20000);
    if (y_cut < 1.0) I1 += quadrature::integrate(f1, y_cut, 1.0, 1e-300, 1e-13, 20000);
    // r in [1,inf), r = y^{-1/alpha}
    const double I2 = quadrature::integrate(
        [&](double y) {
            if (y == 0.0) return 0.0;
            const double e = -X * std::pow(y, -inv_a);
            if (e < -700.0) return 0.0;
            return std::exp(e) / (1.0 + 2.0 * c * y + y * y);
        },
        0.0, 1.0, 1e-300, 1e-13, 20000);
    return std::sin(M_PI * alpha) / (M_PI * alpha) * (I1 + I2);
}

}  // namespace

double mittag_leffler(double alpha, double z) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("mittag_leffler: alpha must lie in (0,1]");
    if (!(z <= 0.0)) throw std::invalid_argument("mittag_leffler: z must be nonpositive");
    if (z < -1e12) throw std::runtime_error("mittag_leffler: z below fallback validity (-1e12)");
    if (z == 0.0) return 1.0;
    if (alpha == 1.0 || 1.0 - alpha < 1e-9) return std::exp(z);
    const double x = -z;
    if (std::pow(x, 1.0 / alpha) <= 5.0) return series(alpha, z);
    return spectral(alpha, x);
}

}  // namespace subdif
