#include "subdif/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "subdif/quadrature.hpp"

namespace subdif {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

double g_kernel(double beta, double t) { return std::pow(t, beta - 1.0) / std::tgamma(beta); }

// Antiderivative of g_beta: int_0^t g_beta = g_{beta+1}(t) = t^beta / Gamma(beta+1).
double g_primitive(double beta, double t) { return std::pow(t, beta) / std::tgamma(beta + 1.0); }

// e^t E_1(t) for t > 0. Series route below ~30, Lentz continued fraction above
// (e^t alone would overflow long before E_1 underflows).
double exp_e1(double t) {
    if (t <= 0.0) throw std::invalid_argument("exp_e1: t must be positive");
    if (t <= 30.0) return std::exp(t) * (-std::expint(-t));
    double b = t + 1.0, c = 1e308, d = 1.0 / b, h = d;
    for (int k = 1; k <= 200; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h;
}

// Antiderivative of e^t E_1(t): A(t) = e^t E_1(t) + ln t + euler_gamma, A(0) = 0.
double exp_e1_primitive(double t) {
    if (t == 0.0) return 0.0;
    return exp_e1(t) + std::log(t) + kEulerGamma;
}

// int over (a,b) of t^{p-1} e^{-gamma t} / Gamma(p). When a == 0 the
// singularity is factored out with t = b y^{1/p}, which turns the weight
// into the exact measure dy/p.
double tempered_g_cell(double p, double gamma, double a, double b) {
    const double norm = std::tgamma(p);
    if (a == 0.0) {
        const double scale = std::pow(b, p) / (p * norm);
        return scale * quadrature::integrate(
                           [&](double y) { return std::exp(-gamma * b * std::pow(y, 1.0 / p)); },
                           0.0, 1.0);
    }
    return quadrature::integrate(
        [&](double t) { return std::pow(t, p - 1.0) * std::exp(-gamma * t) / norm; }, a, b);
}

double distributed_k_pointwise(double t) {
    return quadrature::gauss64([&](double beta) { return g_kernel(beta, t); }, 0.0, 1.0);
}

}  // namespace

TimeGrid::TimeGrid(double T, int N) : horizon(T), steps(N) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (N < 1) throw std::invalid_argument("TimeGrid: step count must be >= 1");
}

bool TimeGrid::same_as(const TimeGrid& o) const {
    return steps == o.steps && std::abs(horizon - o.horizon) <= 1e-14 * horizon;
}

KernelPair KernelPair::fractional(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("KernelPair: alpha must lie in (0,1)");
    return {KernelFamily::Fractional, alpha, 0.0};
}

KernelPair KernelPair::tempered(double alpha, double gamma_t) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("KernelPair: alpha must lie in (0,1)");
    if (!(gamma_t > 0.0)) throw std::invalid_argument("KernelPair: tempering rate must be positive");
    return {KernelFamily::Tempered, alpha, gamma_t};
}

KernelPair KernelPair::distributed_order() { return {KernelFamily::DistributedOrder, 0.5, 0.0}; }

double KernelPair::eval(KernelSide side, double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("KernelPair::eval: t must be positive");
    switch (family) {
        case KernelFamily::Fractional:
            return g_kernel(side == KernelSide::K ? 1.0 - alpha : alpha, t);
        case KernelFamily::Tempered: {
            if (side == KernelSide::K) return g_kernel(1.0 - alpha, t) * std::exp(-tempering * t);
            // l = g_alpha e^{-gt} + g * W(t), W(t) = int_0^t g_alpha e^{-gs} ds,
            // W computed with s = t y^{1/alpha} so the weight integrates exactly.
            const double w = g_kernel(alpha, t) * std::exp(-tempering * t);
            const double W =
                std::pow(t, alpha) / (alpha * std::tgamma(alpha)) *
                quadrature::integrate(
                    [&](double y) { return std::exp(-tempering * t * std::pow(y, 1.0 / alpha)); },
                    0.0, 1.0);
            return w + tempering * W;
        }
        case KernelFamily::DistributedOrder:
            return side == KernelSide::K ? distributed_k_pointwise(t) : exp_e1(t);
    }
    throw std::logic_error("KernelPair::eval: unknown family");
}

DiscreteKernel::DiscreteKernel(TimeGrid g, std::vector<double> w) : grid(g), weights(std::move(w)) {
    if (static_cast<int>(weights.size()) != grid.steps)
        throw std::invalid_argument("DiscreteKernel: weight count must equal step count");
}

double DiscreteKernel::l1_norm() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return grid.tau() * s;
}

double negativity_defect(const DiscreteKernel& w) {
    double m = 0.0;
    for (double x : w.weights) m = std::min(m, x);
    return -m;
}

double monotonicity_defect(const DiscreteKernel& w) {
    double d = 0.0;
    for (std::size_t j = 1; j < w.weights.size(); ++j)
        d = std::max(d, w.weights[j] - w.weights[j - 1]);
    return d;
}

DiscreteKernel sample_cell_averages(const KernelPair& pair, KernelSide side, const TimeGrid& grid) {
    const int n = grid.steps;
    const double tau = grid.tau();
    std::vector<double> w(static_cast<std::size_t>(n));

    auto run = [&](auto&& cell_integral) {
        for (int j = 1; j <= n; ++j) {
            try {
                w[static_cast<std::size_t>(j) - 1] = cell_integral(grid.node(j - 1), grid.node(j)) / tau;
            } catch (const std::exception& e) {
                throw std::runtime_error("sample_cell_averages: cell " + std::to_string(j) + ": " + e.what());
            }
        }
    };

    switch (pair.family) {
        case KernelFamily::Fractional: {
            const double beta = side == KernelSide::K ? 1.0 - pair.alpha : pair.alpha;
            run([&](double a, double b) { return g_primitive(beta, b) - g_primitive(beta, a); });
            break;
        }
        case KernelFamily::Tempered: {
            const double g = pair.tempering;
            if (side == KernelSide::K) {
                run([&](double a, double b) { return tempered_g_cell(1.0 - pair.alpha, g, a, b); });
            } else {
                // l = w_a + g (1 * w_a) with w_a = g_alpha e^{-g .}. The running
                // integral W accumulates the per-cell masses of w_a; the cell
                // integral of W follows by parts:
                //   int_a^b W = b W(b) - a W(a) - int_a^b t w_a(t) dt.
                const double p = pair.alpha;
                double W_left = 0.0;
                for (int j = 1; j <= n; ++j) {
                    const double a = grid.node(j - 1), b = grid.node(j);
                    try {
                        const double mass = tempered_g_cell(p, g, a, b);
                        const double W_right = W_left + mass;
                        const double moment = quadrature::integrate(
                            [&](double t) {
                                return std::pow(t, p) * std::exp(-g * t) / std::tgamma(p);
                            },
                            a, b);
                        const double tail = b * W_right - a * W_left - moment;
                        w[static_cast<std::size_t>(j) - 1] = (mass + g * tail) / tau;
                        W_left = W_right;
                    } catch (const std::exception& e) {
                        throw std::runtime_error("sample_cell_averages: cell " + std::to_string(j) +
                                                 ": " + e.what());
                    }
                }
            }
            break;
        }
        case KernelFamily::DistributedOrder: {
            if (side == KernelSide::K) {
                // Exchange the order integral with the cell integral; the
                // beta-integrand of cell averages is entire.
                run([&](double a, double b) {
                    return quadrature::gauss64(
                        [&](double beta) { return g_primitive(beta, b) - g_primitive(beta, a); }, 0.0,
                        1.0);
                });
            } else {
                run([&](double a, double b) { return exp_e1_primitive(b) - exp_e1_primitive(a); });
            }
            break;
        }
    }
    return DiscreteKernel(grid, std::move(w));
}

std::vector<double> convolve(const DiscreteKernel& a, std::span<const double> v) {
    const int n = a.grid.steps;
    if (static_cast<int>(v.size()) != n + 1)
        throw std::invalid_argument("convolve: trajectory must have N+1 nodes");
    const double tau = a.grid.tau();
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int j = 1; j <= m; ++j) s += a.cell(j) * v[static_cast<std::size_t>(m - j + 1)];
        c[static_cast<std::size_t>(m)] = tau * s;
    }
    return c;
}

DiscreteKernel kernel_convolve(const DiscreteKernel& a, const DiscreteKernel& b) {
    if (!a.grid.same_as(b.grid)) throw std::invalid_argument("kernel_convolve: grid mismatch");
    const int n = a.grid.steps;
    const double tau = a.grid.tau();
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int j = 1; j <= m; ++j) s += a.cell(j) * b.cell(m - j + 1);
        c[static_cast<std::size_t>(m) - 1] = tau * s;
    }
    return DiscreteKernel(a.grid, std::move(c));
}

ResolventSet resolvent_kernel(const DiscreteKernel& l, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("resolvent_kernel: gamma must be nonnegative");
    const int n = l.grid.steps;
    const double tau = l.grid.tau();
    ResolventSet out;
    out.gamma = gamma;
    std::vector<double> h(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n)),
        r(static_cast<std::size_t>(n));
    if (gamma == 0.0) {
        std::fill(h.begin(), h.end(), 0.0);
        std::fill(s.begin(), s.end(), 1.0);
        r = l.weights;
    } else {
        const double pivot = 1.0 + gamma * tau * l.cell(1);
        for (int m = 1; m <= n; ++m) {
            double acc_h = 0.0, acc_s = 0.0, acc_r = 0.0;
            for (int j = 2; j <= m; ++j) {
                const double lj = l.cell(j);
                const std::size_t idx = static_cast<std::size_t>(m - j + 1) - 1;
                acc_h += lj * h[idx];
                acc_s += lj * s[idx];
                acc_r += lj * r[idx];
            }
            const std::size_t im = static_cast<std::size_t>(m) - 1;
            h[im] = (gamma * l.cell(m) - gamma * tau * acc_h) / pivot;
            s[im] = (1.0 - gamma * tau * acc_s) / pivot;
            r[im] = (l.cell(m) - gamma * tau * acc_r) / pivot;
        }
    }
    out.h = DiscreteKernel(l.grid, std::move(h));
    out.s = DiscreteKernel(l.grid, std::move(s));
    out.r = DiscreteKernel(l.grid, std::move(r));
    return out;
}

DiscreteKernel regularized_kernel(const DiscreteKernel& k, const ResolventSet& res) {
    return kernel_convolve(k, res.h);
}

PcCheck verify_pc_pair(const KernelPair& pair, const TimeGrid& grid, double tol) {
    const DiscreteKernel k = sample_cell_averages(pair, KernelSide::K, grid);
    const DiscreteKernel l = sample_cell_averages(pair, KernelSide::L, grid);
    const DiscreteKernel c = kernel_convolve(k, l);
    PcCheck out;
    out.tolerance = tol;
    double sum = 0.0;
    for (double x : c.weights) {
        const double d = std::abs(x - 1.0);
        sum += d;
        out.max_abs_defect = std::max(out.max_abs_defect, d);
    }
    out.mean_abs_defect = sum / grid.steps;
    out.k_monotonicity_defect = monotonicity_defect(k);
    out.l_negativity_defect = negativity_defect(l);
    out.pass = out.mean_abs_defect <= tol && out.k_monotonicity_defect <= tol &&
               out.l_negativity_defect <= tol;
    return out;
}

std::vector<double> yosida_convergence(const DiscreteKernel& l, std::span<const double> f,
                                       std::span<const double> gammas) {
    for (std::size_t i = 1; i < gammas.size(); ++i)
        if (!(gammas[i] > gammas[i - 1]) || !(gammas[i - 1] > 0.0))
            throw std::invalid_argument("yosida_convergence: gammas must be positive and strictly increasing");
    const double tau = l.grid.tau();
    std::vector<double> errs;
    errs.reserve(gammas.size());
    for (double g : gammas) {
        const ResolventSet res = resolvent_kernel(l, g);
        const std::vector<double> conv = convolve(res.h, f);
        double e = 0.0;
        for (int m = 1; m <= l.grid.steps; ++m)
            e += std::abs(conv[static_cast<std::size_t>(m)] - f[static_cast<std::size_t>(m)]);
        errs.push_back(tau * e);
    }
    return errs;
}

std::string kernel_to_csv(const DiscreteKernel& w) {
    std::string out = "j,weight\n";
    char buf[64];
    for (int j = 1; j <= w.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", j, w.cell(j));
        out += buf;
    }
    return out;
}

}  // namespace subdif
