#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "subdif/kernels.hpp"
#include "subdif/nonlinearity.hpp"
#include "subdif/nonlocal.hpp"
#include "subdif/spatial.hpp"

namespace subdif {

/// Full problem data: d/dt (k * [u - u0]) - (a(t,x) phi(u)_x)_x = f on (0,L),
/// homogeneous Dirichlet, u(0) = u0. The time kernel is carried as grid data
/// so tabulated kernels plug in alongside the analytic families; l is kept
/// when known (the verification checks need it).
struct ProblemSpec {
    Mesh1D mesh;
    TimeGrid grid;
    DiscreteKernel k;
    std::optional<DiscreteKernel> l;
    CoefficientField coeff;
    Nonlinearity phi;
    std::vector<double> u0;  // interior nodes, size Nx-1
    std::function<double(double t, double x)> forcing;

    static ProblemSpec from_pair(Mesh1D mesh, TimeGrid grid, const KernelPair& pair,
                                 CoefficientField coeff, Nonlinearity phi, std::vector<double> u0,
                                 std::function<double(double, double)> forcing);
    static ProblemSpec from_kernel(Mesh1D mesh, TimeGrid grid, DiscreteKernel k,
                                   CoefficientField coeff, Nonlinearity phi, std::vector<double> u0,
                                   std::function<double(double, double)> forcing);

    void validate() const;
    std::vector<double> forcing_at(int n) const;  // interior samples at t_n
};

struct Truncation {
    bool adaptive = true;
    double fixed_value = 0.0;  // used when !adaptive
    double safety = 1.5;       // used when adaptive

    static Truncation Fixed(double M) { return {false, M, 1.5}; }
    static Truncation Adaptive(double safety = 1.5) { return {true, 0.0, safety}; }
};

enum class Linearization { Picard, Newton };

struct SolverConfig {
    double picard_tol = 1e-10;
    int picard_maxit = 200;
    double damping = 1.0;  // theta in (0,1]
    /// Strictly decreasing perturbation schedule for degenerate phi
    /// (ignored when phi is nondegenerate). Empty means the default
    /// 1, 1/4, 1/16, ..., 1e-6.
    std::vector<double> eps_schedule;
    Truncation truncation = Truncation::Adaptive();
    Linearization linearization = Linearization::Picard;

    std::vector<double> effective_schedule(bool degenerate) const;
    void validate() const;
};

struct StepDiagnostics {
    int iterations = 0;
    double residual = 0.0;
    double eps = 0.0;
};

struct ContinuationRecord {
    double eps = 0.0;
    double sup_norm = 0.0;       // max_n |u^eps_n|_inf
    double l2_dist_prev = -1.0;  // |u^eps - u^eps_prev|_{L2(Omega_T)}, -1 on first entry
};

struct Solution {
    std::vector<std::vector<double>> u;  // u[n][i], n = 0..N, interior nodes
    std::vector<std::vector<double>> v;  // phi_eff applied nodewise
    std::vector<StepDiagnostics> steps;  // final schedule entry, size N
    std::vector<ContinuationRecord> continuation;
    Nonlinearity effective_phi;  // truncated (+ perturbed) nonlinearity of the final pass
    double eps_final = 0.0;
    double truncation_bound = 0.0;
    bool truncation_active = false;
    int escalations = 0;
};

/// One frozen-coefficient linear step: solves
///   k(1) u + K(a * slope, t_n) u = f_n + rhs_history
/// by a single tridiagonal solve. slope holds one positive value per cell.
std::vector<double> linear_step(const ProblemSpec& p, int n, std::span<const double> slope,
                                std::span<const double> rhs);

struct PicardResult {
    std::vector<double> u;
    int iterations = 0;
    double residual = 0.0;
};

/// Fixed-point iteration w <- theta S(w) + (1-theta) w for step n, where S
/// freezes the chord slope of phi on each cell. history = u[0..n-1]. Halves
/// theta once on stagnation; throws std::runtime_error (with the residual
/// history in the message) if still not converged.
PicardResult picard_step(const ProblemSpec& p, const Nonlinearity& phi_run, const SolverConfig& cfg,
                         int n, const std::vector<std::vector<double>>& history,
                         std::span<const double> warm_start);

/// March n = 1..N for every eps in the schedule, warm-starting each pass
/// from the previous trajectory; adaptive truncation escalates M (at most
/// 5 times) if the iterate approaches the truncation bound.
Solution solve(const ProblemSpec& p, const SolverConfig& cfg = {});

/// CSV rows "n,t,i,x,u,v" over all nodes including the boundary.
std::string solution_to_csv(const ProblemSpec& p, const Solution& s);

}  // namespace subdif
