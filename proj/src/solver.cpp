#include "subdif/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace subdif {

namespace {

// Chord slope of phi over [a, b]: the frozen coefficient that makes the fixed
// point of the Picard map satisfy the flux form with phi applied at nodes.
double chord_slope(const Nonlinearity& f, double a, double b) {
    const double d = b - a;
    if (std::abs(d) < 1e-7 * (1.0 + std::abs(a) + std::abs(b))) return f.dphi(0.5 * (a + b));
    return (f.phi(b) - f.phi(a)) / d;
}

std::vector<double> cell_slopes(const Nonlinearity& f, std::span<const double> w) {
    const int ni = static_cast<int>(w.size());
    std::vector<double> s(static_cast<std::size_t>(ni) + 1);
    double left = 0.0;  // boundary node value
    for (int i = 0; i < ni; ++i) {
        s[static_cast<std::size_t>(i)] = chord_slope(f, left, w[static_cast<std::size_t>(i)]);
        left = w[static_cast<std::size_t>(i)];
    }
    s[static_cast<std::size_t>(ni)] = chord_slope(f, left, 0.0);
    return s;
}

// Flux form of the elliptic term with phi already applied at the nodes.
std::vector<double> flux_apply(const ProblemSpec& p, double t, std::span<const double> phi_vals) {
    const int ni = p.mesh.interior();
    const double h2 = p.mesh.h() * p.mesh.h();
    std::vector<double> out(static_cast<std::size_t>(ni));
    for (int i = 1; i <= ni; ++i) {
        const double vm = (i > 1) ? phi_vals[static_cast<std::size_t>(i) - 2] : 0.0;
        const double vi = phi_vals[static_cast<std::size_t>(i) - 1];
        const double vp = (i < ni) ? phi_vals[static_cast<std::size_t>(i)] : 0.0;
        out[static_cast<std::size_t>(i) - 1] =
            (p.coeff.value(t, i) * (vi - vm) - p.coeff.value(t, i + 1) * (vp - vi)) / h2;
    }
    return out;
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> history_rhs(const ProblemSpec& p, int n,
                                const std::vector<std::vector<double>>& u) {
    const int ni = p.mesh.interior();
    std::vector<double> rhs(static_cast<std::size_t>(ni), 0.0);
    for (int i = 0; i < ni; ++i) {
        double acc = 0.0;
        for (int j = 1; j <= n - 1; ++j)
            acc += p.k.cell(n - j + 1) * (u[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] -
                                          u[static_cast<std::size_t>(j) - 1][static_cast<std::size_t>(i)]);
        rhs[static_cast<std::size_t>(i)] =
            p.k.cell(1) * u[static_cast<std::size_t>(n) - 1][static_cast<std::size_t>(i)] - acc;
    }
    return rhs;
}

std::vector<double> newton_iterate(const ProblemSpec& p, const Nonlinearity& f,
                                   const SolverConfig& cfg, int n, std::span<const double> rhs,
                                   std::span<const double> warm, int& iters, double& final_update);

}  // namespace

ProblemSpec ProblemSpec::from_pair(Mesh1D mesh, TimeGrid grid, const KernelPair& pair,
                                   CoefficientField coeff, Nonlinearity phi, std::vector<double> u0,
                                   std::function<double(double, double)> forcing) {
    ProblemSpec p;
    p.mesh = mesh;
    p.grid = grid;
    p.k = sample_cell_averages(pair, KernelSide::K, grid);
    p.l = sample_cell_averages(pair, KernelSide::L, grid);
    p.coeff = std::move(coeff);
    p.phi = std::move(phi);
    p.u0 = std::move(u0);
    p.forcing = std::move(forcing);
    p.validate();
    return p;
}

ProblemSpec ProblemSpec::from_kernel(Mesh1D mesh, TimeGrid grid, DiscreteKernel k,
                                     CoefficientField coeff, Nonlinearity phi,
                                     std::vector<double> u0,
                                     std::function<double(double, double)> forcing) {
    ProblemSpec p;
    p.mesh = mesh;
    p.grid = grid;
    p.k = std::move(k);
    p.coeff = std::move(coeff);
    p.phi = std::move(phi);
    p.u0 = std::move(u0);
    p.forcing = std::move(forcing);
    p.validate();
    return p;
}

void ProblemSpec::validate() const {
    if (mesh.cells < 3) throw std::invalid_argument("ProblemSpec: at least 3 cells required");
    if (grid.steps < 1) throw std::invalid_argument("ProblemSpec: at least 1 time step required");
    if (static_cast<int>(u0.size()) != mesh.interior())
        throw std::invalid_argument("ProblemSpec: u0 must hold the interior nodes");
    for (double x : u0)
        if (!std::isfinite(x)) throw std::invalid_argument("ProblemSpec: u0 must be bounded");
    if (!k.grid.same_as(grid)) throw std::invalid_argument("ProblemSpec: kernel grid mismatch");
    double scale = 0.0;
    for (double w : k.weights) scale = std::max(scale, std::abs(w));
    if (negativity_defect(k) > kTolNonneg * (1.0 + scale) ||
        monotonicity_defect(k) > kTolNonneg * (1.0 + scale))
        throw std::invalid_argument("ProblemSpec: kernel must be nonnegative and nonincreasing");
    if (!forcing) throw std::invalid_argument("ProblemSpec: forcing callable required");
    if (!phi.phi || !phi.dphi || !phi.primitive)
        throw std::invalid_argument("ProblemSpec: nonlinearity callables required");
}

std::vector<double> ProblemSpec::forcing_at(int n) const {
    const double t = grid.node(n);
    std::vector<double> f(static_cast<std::size_t>(mesh.interior()));
    for (int i = 1; i <= mesh.interior(); ++i)
        f[static_cast<std::size_t>(i) - 1] = forcing(t, mesh.node(i));
    return f;
}

std::vector<double> SolverConfig::effective_schedule(bool degenerate) const {
    if (!degenerate) return {0.0};
    if (!eps_schedule.empty()) return eps_schedule;
    std::vector<double> s;
    double e = 1.0;
    while (e > 1e-6) {
        s.push_back(e);
        e *= 0.25;
    }
    s.push_back(1e-6);
    return s;
}

void SolverConfig::validate() const {
    if (!(picard_tol > 0.0)) throw std::invalid_argument("SolverConfig: picard_tol must be positive");
    if (picard_maxit < 1) throw std::invalid_argument("SolverConfig: picard_maxit must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0))
        throw std::invalid_argument("SolverConfig: damping must lie in (0,1]");
    for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
        if (!(eps_schedule[i] > 0.0))
            throw std::invalid_argument("SolverConfig: eps_schedule entries must be positive");
        if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
            throw std::invalid_argument("SolverConfig: eps_schedule must be strictly decreasing");
    }
    if (!truncation.adaptive && !(truncation.fixed_value > 0.0))
        throw std::invalid_argument("SolverConfig: fixed truncation bound must be positive");
    if (truncation.adaptive && !(truncation.safety > 1.0))
        throw std::invalid_argument("SolverConfig: truncation safety factor must exceed 1");
}

std::vector<double> linear_step(const ProblemSpec& p, int n, std::span<const double> slope,
                                std::span<const double> rhs) {
    const int ni = p.mesh.interior();
    if (static_cast<int>(slope.size()) != p.mesh.cells)
        throw std::invalid_argument("linear_step: one slope per cell expected");
    const double t = p.grid.node(n);
    const double h2 = p.mesh.h() * p.mesh.h();
    const double diag0 = p.k.cell(1);
    std::vector<double> ac(static_cast<std::size_t>(p.mesh.cells));
    for (int c = 1; c <= p.mesh.cells; ++c) {
        const double s = slope[static_cast<std::size_t>(c) - 1];
        if (!(s > 0.0)) throw std::invalid_argument("linear_step: frozen slopes must be positive");
        ac[static_cast<std::size_t>(c) - 1] = p.coeff.value(t, c) * s;
    }
    std::vector<double> diag(static_cast<std::size_t>(ni)), off(static_cast<std::size_t>(ni - 1));
    for (int i = 1; i <= ni; ++i) {
        diag[static_cast<std::size_t>(i) - 1] =
            diag0 + (ac[static_cast<std::size_t>(i) - 1] + ac[static_cast<std::size_t>(i)]) / h2;
        if (i < ni) off[static_cast<std::size_t>(i) - 1] = -ac[static_cast<std::size_t>(i)] / h2;
    }
    return tridiag_solve(off, diag, off, rhs);
}

PicardResult picard_step(const ProblemSpec& p, const Nonlinearity& phi_run, const SolverConfig& cfg,
                         int n, const std::vector<std::vector<double>>& history,
                         std::span<const double> warm_start) {
    const int ni = p.mesh.interior();
    const std::vector<double> hist = history_rhs(p, n, history);
    const std::vector<double> fn = p.forcing_at(n);
    std::vector<double> rhs(static_cast<std::size_t>(ni));
    for (int i = 0; i < ni; ++i)
        rhs[static_cast<std::size_t>(i)] = fn[static_cast<std::size_t>(i)] + hist[static_cast<std::size_t>(i)];

    std::vector<double> w(warm_start.begin(), warm_start.end());
    double theta = cfg.damping;
    int iters = 0;
    std::vector<double> update_history;

    if (cfg.linearization == Linearization::Newton) {
        double final_update = 0.0;
        std::vector<double> u = newton_iterate(p, phi_run, cfg, n, rhs, w, iters, final_update);
        PicardResult res;
        res.iterations = iters;
        std::vector<double> pv(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) pv[i] = phi_run.phi(u[i]);
        const std::vector<double> flux = flux_apply(p, p.grid.node(n), pv);
        double rmax = 0.0;
        for (int i = 0; i < ni; ++i)
            rmax = std::max(rmax, std::abs(p.k.cell(1) * u[static_cast<std::size_t>(i)] +
                                           flux[static_cast<std::size_t>(i)] - rhs[static_cast<std::size_t>(i)]));
        res.residual = rmax;
        res.u = std::move(u);
        return res;
    }

    for (int round = 0; round < 2; ++round) {
        for (int it = 0; it < cfg.picard_maxit; ++it) {
            ++iters;
            const std::vector<double> slopes = cell_slopes(phi_run, w);
            std::vector<double> s = linear_step(p, n, slopes, rhs);
            double upd = 0.0, scale = 0.0;
            for (int i = 0; i < ni; ++i) {
                const std::size_t si = static_cast<std::size_t>(i);
                const double next = theta * s[si] + (1.0 - theta) * w[si];
                upd = std::max(upd, std::abs(next - w[si]));
                scale = std::max(scale, std::abs(next));
                w[si] = next;
            }
            update_history.push_back(upd);
            if (upd <= cfg.picard_tol * std::max(scale, 1e-30)) {
                PicardResult res;
                res.u = std::move(w);
                res.iterations = iters;
                std::vector<double> pv(res.u.size());
                for (std::size_t i = 0; i < res.u.size(); ++i) pv[i] = phi_run.phi(res.u[i]);
                const std::vector<double> flux = flux_apply(p, p.grid.node(n), pv);
                double rmax = 0.0;
                for (int i = 0; i < ni; ++i)
                    rmax = std::max(rmax, std::abs(p.k.cell(1) * res.u[static_cast<std::size_t>(i)] +
                                                   flux[static_cast<std::size_t>(i)] -
                                                   rhs[static_cast<std::size_t>(i)]));
                res.residual = rmax;
                return res;
            }
        }
        theta *= 0.5;  // one damped retry before giving up
    }
    std::string msg = "picard_step: no convergence at step " + std::to_string(n) + "; updates:";
    const std::size_t tail = std::min<std::size_t>(update_history.size(), 8);
    for (std::size_t i = update_history.size() - tail; i < update_history.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.3e", update_history[i]);
        msg += buf;
    }
    throw std::runtime_error(msg);
}

namespace {

std::vector<double> newton_iterate(const ProblemSpec& p, const Nonlinearity& f,
                                   const SolverConfig& cfg, int n, std::span<const double> rhs,
                                   std::span<const double> warm, int& iters, double& final_update) {
    const int ni = p.mesh.interior();
    const double t = p.grid.node(n);
    const double h2 = p.mesh.h() * p.mesh.h();
    const double k1 = p.k.cell(1);
    std::vector<double> w(warm.begin(), warm.end());
    std::vector<double> a(static_cast<std::size_t>(p.mesh.cells));
    for (int c = 1; c <= p.mesh.cells; ++c) a[static_cast<std::size_t>(c) - 1] = p.coeff.value(t, c);

    double theta = cfg.damping;
    iters = 0;
    for (int round = 0; round < 2; ++round) {
        for (int it = 0; it < cfg.picard_maxit; ++it) {
            ++iters;
            std::vector<double> pv(static_cast<std::size_t>(ni)), dp(static_cast<std::size_t>(ni));
            for (int i = 0; i < ni; ++i) {
                pv[static_cast<std::size_t>(i)] = f.phi(w[static_cast<std::size_t>(i)]);
                dp[static_cast<std::size_t>(i)] = f.dphi(w[static_cast<std::size_t>(i)]);
            }
            const std::vector<double> flux = flux_apply(p, t, pv);
            std::vector<double> F(static_cast<std::size_t>(ni));
            for (int i = 0; i < ni; ++i)
                F[static_cast<std::size_t>(i)] = k1 * w[static_cast<std::size_t>(i)] +
                                                 flux[static_cast<std::size_t>(i)] -
                                                 rhs[static_cast<std::size_t>(i)];
            // J = k1 I + K_a diag(phi'(w)): tridiagonal, column-scaled
            std::vector<double> diag(static_cast<std::size_t>(ni)), sub(static_cast<std::size_t>(ni - 1)),
                sup(static_cast<std::size_t>(ni - 1));
            for (int i = 1; i <= ni; ++i) {
                const std::size_t si = static_cast<std::size_t>(i) - 1;
                diag[si] = k1 + (a[si] + a[si + 1]) / h2 * dp[si];
                if (i < ni) {
                    sup[si] = -a[si + 1] / h2 * dp[si + 1];
                    sub[si] = -a[si + 1] / h2 * dp[si];
                }
            }
            std::vector<double> negF(F.size());
            for (std::size_t i = 0; i < F.size(); ++i) negF[i] = -F[i];
            const std::vector<double> delta = tridiag_solve(sub, diag, sup, negF);
            double upd = 0.0, scale = 0.0;
            for (int i = 0; i < ni; ++i) {
                const std::size_t si = static_cast<std::size_t>(i);
                w[si] += theta * delta[si];
                upd = std::max(upd, std::abs(theta * delta[si]));
                scale = std::max(scale, std::abs(w[si]));
            }
            final_update = upd;
            if (upd <= cfg.picard_tol * std::max(scale, 1e-30)) return w;
        }
        theta *= 0.5;
    }
    throw std::runtime_error("newton step: no convergence at step " + std::to_string(n));
}

}  // namespace

Solution solve(const ProblemSpec& p, const SolverConfig& cfg) {
    p.validate();
    cfg.validate();
    const int N = p.grid.steps;
    const int ni = p.mesh.interior();
    const double tau = p.grid.tau();
    const double u0_inf = inf_norm(p.u0);

    double M = cfg.truncation.adaptive
                   ? cfg.truncation.safety * (1.0 + std::max(p.phi.R, u0_inf))
                   : cfg.truncation.fixed_value;

    const std::vector<double> schedule = cfg.effective_schedule(!p.phi.nondegenerate());

    for (int escal = 0;; ++escal) {
        const Nonlinearity trunc = truncate(p.phi, M);
        const double blow_limit = M * (1.0 - 1e-6);
        bool blew_up = false;

        Solution sol;
        sol.escalations = escal;
        sol.truncation_bound = M;
        std::vector<std::vector<double>> prev_traj;
        bool have_prev = false;

        for (double eps : schedule) {
            const Nonlinearity phi_run = eps > 0.0 ? regularize(trunc, eps) : trunc;
            std::vector<std::vector<double>> traj(static_cast<std::size_t>(N) + 1);
            traj[0] = p.u0;
            std::vector<StepDiagnostics> diag(static_cast<std::size_t>(N));
            double sup = 0.0;
            for (int n = 1; n <= N && !blew_up; ++n) {
                std::span<const double> warm =
                    have_prev ? std::span<const double>(prev_traj[static_cast<std::size_t>(n)])
                              : std::span<const double>(traj[static_cast<std::size_t>(n) - 1]);
                PicardResult r = picard_step(p, phi_run, cfg, n, traj, warm);
                sup = std::max(sup, inf_norm(r.u));
                diag[static_cast<std::size_t>(n) - 1] = {r.iterations, r.residual, eps};
                traj[static_cast<std::size_t>(n)] = std::move(r.u);
                if (cfg.truncation.adaptive && sup >= blow_limit) blew_up = true;
            }
            if (blew_up) break;

            ContinuationRecord rec;
            rec.eps = eps;
            rec.sup_norm = sup;
            if (have_prev) {
                double acc = 0.0;
                for (int n = 1; n <= N; ++n)
                    for (int i = 0; i < ni; ++i) {
                        const double d = traj[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] -
                                         prev_traj[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
                        acc += d * d;
                    }
                rec.l2_dist_prev = std::sqrt(tau * p.mesh.h() * acc);
            }
            sol.continuation.push_back(rec);
            prev_traj = std::move(traj);
            have_prev = true;
            sol.steps = std::move(diag);
            sol.eps_final = eps;
            sol.effective_phi = phi_run;
        }

        if (!blew_up) {
            sol.u = std::move(prev_traj);
            sol.v.resize(sol.u.size());
            double sup = 0.0;
            for (std::size_t nidx = 0; nidx < sol.u.size(); ++nidx) {
                sol.v[nidx].resize(sol.u[nidx].size());
                for (std::size_t i = 0; i < sol.u[nidx].size(); ++i) {
                    sol.v[nidx][i] = sol.effective_phi.phi(sol.u[nidx][i]);
                    sup = std::max(sup, std::abs(sol.u[nidx][i]));
                }
            }
            sol.truncation_active = sup >= M * (1.0 - 1e-6);
            return sol;
        }
        if (escal >= 5) throw std::runtime_error("solve: truncation escalation budget exhausted");
        M *= cfg.truncation.safety;
    }
}

std::string solution_to_csv(const ProblemSpec& p, const Solution& s) {
    std::string out = "n,t,i,x,u,v\n";
    char buf[160];
    const int ni = p.mesh.interior();
    for (int n = 0; n < static_cast<int>(s.u.size()); ++n) {
        const double t = p.grid.node(n);
        for (int i = 0; i <= p.mesh.cells; ++i) {
            double uv = 0.0, vv = 0.0;
            if (i >= 1 && i <= ni) {
                uv = s.u[static_cast<std::size_t>(n)][static_cast<std::size_t>(i) - 1];
                vv = s.v[static_cast<std::size_t>(n)][static_cast<std::size_t>(i) - 1];
            }
            std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%.17g,%.17g,%.17g\n", n, t, i, p.mesh.node(i),
                          uv, vv);
            out += buf;
        }
    }
    return out;
}

}  // namespace subdif
