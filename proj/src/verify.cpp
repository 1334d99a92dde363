#include "subdif/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace subdif {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double rel_slack(double lhs, double rhs) { return 1e-8 * (1.0 + std::abs(lhs) + std::abs(rhs)); }

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

// d/dt (k * [u - u0]) applied nodewise to an interior-vector trajectory.
std::vector<std::vector<double>> nonlocal_apply_field(const ProblemSpec& p,
                                                      const std::vector<std::vector<double>>& u) {
    const int N = p.grid.steps;
    const int ni = p.mesh.interior();
    std::vector<std::vector<double>> out(static_cast<std::size_t>(N) + 1,
                                         std::vector<double>(static_cast<std::size_t>(ni), 0.0));
    for (int n = 1; n <= N; ++n)
        for (int i = 0; i < ni; ++i) {
            double s = 0.0;
            for (int j = 1; j <= n; ++j)
                s += p.k.cell(n - j + 1) *
                     (u[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] -
                      u[static_cast<std::size_t>(j) - 1][static_cast<std::size_t>(i)]);
            out[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] = s;
        }
    return out;
}

double sup_norm_traj(const std::vector<std::vector<double>>& u, std::size_t from) {
    double m = 0.0;
    for (std::size_t n = from; n < u.size(); ++n)
        for (double x : u[n]) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

ExponentCheck check_exponents(double p, double q1, double q2, int d) {
    ExponentCheck out;
    if (!(p > 1.0)) {
        out.violation = "p must exceed 1";
        return out;
    }
    if (!(q1 >= 1.0) || !(q2 >= 1.0)) {
        out.violation = "q1 and q2 must lie in [1,inf]";
        return out;
    }
    if (d < 1) {
        out.violation = "dimension must be positive";
        return out;
    }
    const double pp = p / (p - 1.0);
    const double t1 = std::isinf(q1) ? 0.0 : pp / q1;
    const double t2 = std::isinf(q2) ? 0.0 : d / (2.0 * q2);
    const double beta = 1.0 - t1 - t2;
    out.hypotheses = {p, q1, q2, d, beta};
    const double beta_hi = d >= 2 ? 1.0 : 0.5;
    if (!(beta > 0.0 && beta < beta_hi)) {
        out.violation = "beta = " + fmt(beta) + " outside (0," + (d >= 2 ? std::string("1") : std::string("1/2")) + ")";
        return out;
    }
    if (q1 < pp / (1.0 - beta)) {
        out.violation = "q1 below p'/(1-beta)";
        return out;
    }
    if (d >= 2) {
        if (q2 < d / (2.0 * (1.0 - beta))) {
            out.violation = "q2 below d/(2(1-beta))";
            return out;
        }
    } else if (beta < 0.5 && q1 > 2.0 * pp / (1.0 - 2.0 * beta)) {
        out.violation = "q1 above 2p'/(1-2beta)";
        return out;
    }
    out.ok = true;
    return out;
}

std::vector<CheckResult> linfty_check(const ProblemSpec& p, const Solution& s,
                                      bool forcing_is_zero) {
    std::vector<CheckResult> out;
    const double u0_inf = space_norms(p.mesh, p.u0).linf;
    const double sup = sup_norm_traj(s.u, 1);
    const double cstar = sup / (1.0 + std::max(p.phi.R, u0_inf));
    {
        CheckResult c = make_check("linfty_constant_finite", cstar,
                                   std::isfinite(cstar) ? cstar : -kInf, 0.0,
                                   "measured C* = " + fmt(cstar) + " (no closed-form bound exists)");
        out.push_back(c);
    }
    if (forcing_is_zero)
        out.push_back(make_check("maximum_principle", sup, u0_inf, 1e-10));
    return out;
}

CheckResult linfty_stability_check(const ProblemSpec& p, const Solution& s) {
    const double u0_inf = space_norms(p.mesh, p.u0).linf;
    const double denom = 1.0 + std::max(p.phi.R, u0_inf);
    const std::size_t n = s.continuation.size();
    if (n < 2)
        return make_check("linfty_eps_stability", 0.0, 0.05, 0.0, "single-pass run; nothing to compare");
    const std::size_t from = n >= 3 ? n - 3 : 0;
    double lo = kInf, hi = 0.0;
    for (std::size_t i = from; i < n; ++i) {
        const double c = s.continuation[i].sup_norm / denom;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    const double spread = lo > 0.0 ? hi / lo - 1.0 : (hi > 0.0 ? kInf : 0.0);
    return make_check("linfty_eps_stability", spread, 0.05, 0.0);
}

CheckResult l1_contraction_check(const ProblemSpec& p1, const Solution& s1, const ProblemSpec& p2,
                                 const Solution& s2) {
    if (!p1.grid.same_as(p2.grid) || p1.mesh.cells != p2.mesh.cells)
        throw std::invalid_argument("l1_contraction_check: solutions live on different grids");
    if (!p1.l) throw std::invalid_argument("l1_contraction_check: kernel l required");
    const int N = p1.grid.steps;
    const int ni = p1.mesh.interior();
    const double tau = p1.grid.tau();
    const double h = p1.mesh.h();

    double lhs = 0.0;
    for (int n = 1; n <= N; ++n)
        for (int i = 0; i < ni; ++i)
            lhs += std::abs(s1.u[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] -
                            s2.u[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)]);
    lhs *= tau * h;

    double du0 = 0.0;
    for (int i = 0; i < ni; ++i)
        du0 += std::abs(p1.u0[static_cast<std::size_t>(i)] - p2.u0[static_cast<std::size_t>(i)]);
    du0 *= h;

    double df = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double t = p1.grid.node(n);
        for (int i = 1; i <= ni; ++i)
            df += std::abs(p1.forcing(t, p1.mesh.node(i)) - p2.forcing(t, p2.mesh.node(i)));
    }
    df *= tau * h;

    const double l_l1 = p1.l->l1_norm();
    const double T = p1.grid.horizon;
    const double rhs = T * du0 + l_l1 * df;
    const double rhs_displayed = T * du0 + l_l1;
    return make_check("l1_contraction", lhs, rhs, rel_slack(lhs, rhs),
                      "displayed-form rhs (forcing factor dropped): " + fmt(rhs_displayed));
}

CheckResult energy_check(const ProblemSpec& p, const Solution& s) {
    const int N = p.grid.steps;
    const double tau = p.grid.tau();
    double lhs = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double g = space_norms(p.mesh, s.v[static_cast<std::size_t>(n)]).grad_l2;
        lhs += g * g;
    }
    lhs *= tau;

    double f_sq = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double t = p.grid.node(n);
        for (int i = 1; i <= p.mesh.interior(); ++i) {
            const double f = p.forcing(t, p.mesh.node(i));
            f_sq += f * f;
        }
    }
    f_sq *= tau * p.mesh.h();

    const double nu = p.coeff.nu;
    const double cp = p.mesh.poincare_constant();
    const double rhs = 2.0 / nu * p.k.l1_norm() * primitive_mass(s.effective_phi, p.mesh, p.u0) +
                       cp * cp / (nu * nu) * f_sq;
    return make_check("energy_estimate", lhs, rhs, rel_slack(lhs, rhs));
}

CheckResult translation_modulus_check(const ProblemSpec& p, const Solution& s, int lag_steps) {
    if (!p.l) throw std::invalid_argument("translation_modulus_check: kernel l required");
    const int N = p.grid.steps;
    if (lag_steps < 0 || lag_steps > N)
        throw std::invalid_argument("translation_modulus_check: lag must lie on the grid");
    const double tau = p.grid.tau();
    const DiscreteKernel& l = *p.l;

    double lhs = 0.0;
    for (int n = 1; n + lag_steps <= N; ++n) {
        std::vector<double> d(s.u[static_cast<std::size_t>(n)].size());
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = s.u[static_cast<std::size_t>(n + lag_steps)][i] - s.u[static_cast<std::size_t>(n)][i];
        const double hm = hminus1_norm(p.mesh, d);
        lhs += hm * hm;
    }
    lhs = std::sqrt(tau * lhs);

    const std::vector<std::vector<double>> w = nonlocal_apply_field(p, s.u);
    double grad_sq = 0.0, dual_sq = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double g = space_norms(p.mesh, s.u[static_cast<std::size_t>(n)]).grad_l2;
        grad_sq += g * g;
        const double hm = hminus1_norm(p.mesh, w[static_cast<std::size_t>(n)]);
        dual_sq += hm * hm;
    }
    const double m = std::sqrt(tau * grad_sq) + std::sqrt(tau * dual_sq);

    double trans = 0.0;
    for (int j = 1; j + lag_steps <= N; ++j) trans += std::abs(l.cell(j + lag_steps) - l.cell(j));
    double head = 0.0;
    for (int j = 1; j <= lag_steps; ++j) head += l.cell(j);
    const double rhs = 2.0 * m * (tau * trans + tau * head);

    CheckResult c = make_check("translation_modulus_lag" + std::to_string(lag_steps), lhs, rhs,
                               rel_slack(lhs, rhs));
    c.note = "m = " + fmt(m);
    return c;
}

std::vector<CheckResult> translation_modulus_sweep(const ProblemSpec& p, const Solution& s) {
    std::vector<CheckResult> out;
    const int lags[4] = {1, 2, 4, 8};
    double rhs_vals[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        CheckResult c = translation_modulus_check(p, s, lags[i]);
        rhs_vals[i] = c.rhs;
        out.push_back(std::move(c));
    }
    double worst_step = 0.0;
    for (int i = 0; i + 1 < 4; ++i) worst_step = std::max(worst_step, rhs_vals[i] - rhs_vals[i + 1]);
    out.push_back(make_check("translation_rhs_monotone", worst_step, 0.0,
                             1e-12 * (1.0 + std::abs(rhs_vals[3]))));
    out.push_back(make_check("translation_rhs_vanishes", rhs_vals[0] / rhs_vals[3], 1.0, 0.0,
                             "RHS(tau)/RHS(8 tau)"));
    return out;
}

CheckResult convexity_suite(const NonlocalOperator& op, int trials, std::uint64_t seed) {
    Rng rng(seed);
    const int N = op.kernel.grid.steps;
    double worst = -kInf;
    const double eps_h = 0.1;
    for (int t = 0; t < trials; ++t) {
        const int which = static_cast<int>(rng.next_u64() % 3);
        std::function<double(double)> H, Hp;
        switch (which) {
            case 0:
                H = [](double y) { return y * y; };
                Hp = [](double y) { return 2.0 * y; };
                break;
            case 1:
                H = [eps_h](double y) { return std::sqrt(y * y + eps_h * eps_h) - eps_h; };
                Hp = [eps_h](double y) { return y / std::sqrt(y * y + eps_h * eps_h); };
                break;
            default:
                H = [](double y) { return std::exp(y); };
                Hp = [](double y) { return std::exp(y); };
        }
        std::vector<double> v(static_cast<std::size_t>(N) + 1);
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
        double vinf = 0.0;
        for (double x : v) vinf = std::max(vinf, std::abs(x));
        const double margin = convexity_margin(op, H, Hp, v, v[0]);
        worst = std::max(worst, -margin / (1.0 + vinf * vinf));
    }
    return make_check("convexity_margin", worst, 0.0, 1e-10,
                      std::to_string(trials) + " randomized (H, v) trials");
}

BenchmarkRow exact_linear_benchmark(double alpha, const Mesh1D& mesh, const TimeGrid& grid) {
    const double L = mesh.length;
    std::vector<double> u0(static_cast<std::size_t>(mesh.interior()));
    for (int i = 1; i <= mesh.interior(); ++i)
        u0[static_cast<std::size_t>(i) - 1] = std::sin(M_PI * mesh.node(i) / L);
    ProblemSpec p = ProblemSpec::from_pair(mesh, grid, KernelPair::fractional(alpha),
                                           CoefficientField::constant(1.0), Nonlinearity::identity(),
                                           std::move(u0), [](double, double) { return 0.0; });
    const Solution s = solve(p);

    const double lambda = (M_PI / L) * (M_PI / L);
    BenchmarkRow row;
    row.steps = grid.steps;
    row.cells = mesh.cells;
    for (int n = 1; n <= grid.steps; ++n) {
        const double amp = mittag_leffler(alpha, -lambda * std::pow(grid.node(n), alpha));
        for (int i = 1; i <= mesh.interior(); ++i) {
            const double exact = amp * std::sin(M_PI * mesh.node(i) / L);
            const double err = std::abs(
                s.u[static_cast<std::size_t>(n)][static_cast<std::size_t>(i) - 1] - exact);
            row.linf_error = std::max(row.linf_error, err);
            if (n == grid.steps) row.final_l2_error += err * err;
        }
    }
    row.final_l2_error = std::sqrt(mesh.h() * row.final_l2_error);
    return row;
}

std::vector<BenchmarkRow> benchmark_ladder(double alpha, double length, int cells, double horizon,
                                           int base_steps, int doublings) {
    std::vector<BenchmarkRow> rows;
    int n = base_steps;
    for (int k = 0; k <= doublings; ++k, n *= 2)
        rows.push_back(exact_linear_benchmark(alpha, Mesh1D(length, cells), TimeGrid(horizon, n)));
    return rows;
}

std::uint64_t Rng::next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
    const double x = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * x;
}

}  // namespace subdif
