#include "subdif/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "subdif/verify.hpp"

namespace subdif {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw std::runtime_error("config field '" + path + "': " + what);
}

const json* find(const json& j, const std::string& dotted) {
    const json* cur = &j;
    std::size_t pos = 0;
    while (pos <= dotted.size()) {
        const std::size_t dot = dotted.find('.', pos);
        const std::string key = dotted.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &(*cur)[key];
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return cur;
}

double need_num(const json& j, const std::string& path) {
    const json* v = find(j, path);
    if (!v) config_error(path, "missing");
    if (!v->is_number()) config_error(path, "must be a number");
    return v->get<double>();
}

double opt_num(const json& j, const std::string& path, double fallback) {
    const json* v = find(j, path);
    if (!v) return fallback;
    if (!v->is_number()) config_error(path, "must be a number");
    return v->get<double>();
}

std::string opt_str(const json& j, const std::string& path, const std::string& fallback) {
    const json* v = find(j, path);
    if (!v) return fallback;
    if (!v->is_string()) config_error(path, "must be a string");
    return v->get<std::string>();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
}

std::string fmt_num(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

CheckResult timed(CheckResult c, const Timer& t) {
    c.runtime_s = t.seconds();
    return c;
}

// Seeded interior perturbation used by the contraction pairing.
std::vector<double> random_interior(Rng& rng, int n, double amp) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = rng.uniform(-amp, amp);
    return v;
}

void verify_battery(const ExperimentConfig& cfg, Report& rep, bool quiet);

}  // namespace

std::string default_output_dir() {
    if (const char* env = std::getenv("SUBDIF_OUT_DIR"); env && *env) return env;
    return "out";
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }

    ExperimentConfig c;
    const std::string mode = opt_str(j, "mode", "solve");
    if (mode == "solve")
        c.mode = RunMode::Solve;
    else if (mode == "verify_suite")
        c.mode = RunMode::VerifySuite;
    else if (mode == "convergence")
        c.mode = RunMode::Convergence;
    else if (mode == "contraction_pair")
        c.mode = RunMode::ContractionPair;
    else if (mode == "kernel_lab")
        c.mode = RunMode::KernelLab;
    else
        config_error("mode", "unknown mode '" + mode + "'");

    c.seed = static_cast<std::uint64_t>(opt_num(j, "seed", 0));
    c.length = opt_num(j, "problem.length", 1.0);
    c.cells = static_cast<int>(opt_num(j, "problem.cells", 64));
    c.horizon = opt_num(j, "problem.horizon", 1.0);
    c.steps = static_cast<int>(opt_num(j, "problem.steps", 256));

    const std::string fam = opt_str(j, "problem.kernel.family", "fractional");
    if (fam == "fractional")
        c.kernel = KernelPair::fractional(need_num(j, "problem.kernel.alpha"));
    else if (fam == "tempered")
        c.kernel = KernelPair::tempered(need_num(j, "problem.kernel.alpha"),
                                        need_num(j, "problem.kernel.tempering"));
    else if (fam == "distributed_order")
        c.kernel = KernelPair::distributed_order();
    else
        config_error("problem.kernel.family", "unknown family '" + fam + "'");

    c.coeff_preset = opt_str(j, "problem.coefficient.preset", "constant");
    c.coeff_value = opt_num(j, "problem.coefficient.value", 1.0);
    c.coeff_left = opt_num(j, "problem.coefficient.left", 0.1);
    c.coeff_right = opt_num(j, "problem.coefficient.right", 1.0);
    c.coeff_split = opt_num(j, "problem.coefficient.split", 0.5);
    c.coeff_time_amplitude = opt_num(j, "problem.coefficient.time_amplitude", 0.0);
    if (c.coeff_preset != "constant" && c.coeff_preset != "piecewise")
        config_error("problem.coefficient.preset", "unknown preset '" + c.coeff_preset + "'");
    if (!(c.coeff_time_amplitude >= 0.0 && c.coeff_time_amplitude < 1.0))
        config_error("problem.coefficient.time_amplitude", "must lie in [0,1)");

    c.phi_preset = opt_str(j, "problem.nonlinearity.preset", "linear");
    c.phi_exponent = opt_num(j, "problem.nonlinearity.exponent", 3.0);
    if (c.phi_preset != "linear" && c.phi_preset != "pme")
        config_error("problem.nonlinearity.preset", "unknown preset '" + c.phi_preset + "'");

    c.initial_preset = opt_str(j, "problem.initial.preset", "sine");
    c.initial_amplitude = opt_num(j, "problem.initial.amplitude", 1.0);
    c.initial_lo = opt_num(j, "problem.initial.lo", 0.25 * c.length);
    c.initial_hi = opt_num(j, "problem.initial.hi", 0.75 * c.length);
    if (c.initial_preset != "sine" && c.initial_preset != "bump" && c.initial_preset != "constant" &&
        c.initial_preset != "piecewise")
        config_error("problem.initial.preset", "unknown preset '" + c.initial_preset + "'");

    c.forcing_preset = opt_str(j, "problem.forcing.preset", "zero");
    c.forcing_amplitude = opt_num(j, "problem.forcing.amplitude", 0.0);
    c.forcing_time = opt_str(j, "problem.forcing.time", "constant");
    if (c.forcing_preset != "zero" && c.forcing_preset != "constant" && c.forcing_preset != "sine" &&
        c.forcing_preset != "bump")
        config_error("problem.forcing.preset", "unknown preset '" + c.forcing_preset + "'");

    c.doublings = static_cast<int>(opt_num(j, "convergence.doublings", 3));
    if (const json* g = find(j, "kernel_lab.gammas")) {
        if (!g->is_array()) config_error("kernel_lab.gammas", "must be an array");
        c.gammas.clear();
        for (const auto& v : *g) c.gammas.push_back(v.get<double>());
    }

    c.solver.picard_tol = opt_num(j, "solver.picard_tol", 1e-10);
    c.solver.picard_maxit = static_cast<int>(opt_num(j, "solver.picard_maxit", 200));
    c.solver.damping = opt_num(j, "solver.damping", 1.0);
    if (const json* e = find(j, "solver.eps_schedule")) {
        if (!e->is_array()) config_error("solver.eps_schedule", "must be an array");
        for (const auto& v : *e) c.solver.eps_schedule.push_back(v.get<double>());
    }
    const std::string lin = opt_str(j, "solver.linearization", "picard");
    if (lin == "picard")
        c.solver.linearization = Linearization::Picard;
    else if (lin == "newton")
        c.solver.linearization = Linearization::Newton;
    else
        config_error("solver.linearization", "unknown value '" + lin + "'");
    const std::string tmode = opt_str(j, "solver.truncation.mode", "adaptive");
    if (tmode == "adaptive")
        c.solver.truncation = Truncation::Adaptive(opt_num(j, "solver.truncation.safety", 1.5));
    else if (tmode == "fixed")
        c.solver.truncation = Truncation::Fixed(need_num(j, "solver.truncation.value"));
    else
        config_error("solver.truncation.mode", "unknown value '" + tmode + "'");
    c.solver.validate();

    c.output_dir = opt_str(j, "output.directory", "");
    if (const json* f = find(j, "output.formats")) {
        if (!f->is_array()) config_error("output.formats", "must be an array");
        c.formats.clear();
        for (const auto& v : *f) c.formats.push_back(v.get<std::string>());
    }
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_json_text(ss.str());
}

ProblemSpec ExperimentConfig::build_problem() const {
    const Mesh1D mesh(length, cells);
    const TimeGrid grid(horizon, steps);

    CoefficientField coeff;
    const double amp = coeff_time_amplitude;
    const double T = horizon;
    if (coeff_preset == "constant") {
        const double v = coeff_value;
        coeff.value = [v, amp, T](double t, int) {
            return v * (1.0 + amp * std::sin(2.0 * M_PI * t / T));
        };
        coeff.nu = v * (1.0 - amp);
        coeff.a_max = v * (1.0 + amp);
    } else {
        const double lo = coeff_left, hi = coeff_right, split = coeff_split;
        const double h = mesh.h();
        coeff.value = [lo, hi, split, h, amp, T](double t, int cell) {
            const double mid = (cell - 0.5) * h;
            const double base = mid < split ? lo : hi;
            return base * (1.0 + amp * std::sin(2.0 * M_PI * t / T));
        };
        coeff.nu = std::min(lo, hi) * (1.0 - amp);
        coeff.a_max = std::max(lo, hi) * (1.0 + amp);
    }

    Nonlinearity phi =
        phi_preset == "linear" ? Nonlinearity::identity() : Nonlinearity::porous_medium(phi_exponent);

    std::vector<double> u0(static_cast<std::size_t>(mesh.interior()));
    for (int i = 1; i <= mesh.interior(); ++i) {
        const double x = mesh.node(i);
        double v = 0.0;
        if (initial_preset == "sine")
            v = initial_amplitude * std::sin(M_PI * x / length);
        else if (initial_preset == "constant")
            v = initial_amplitude;
        else if (initial_preset == "piecewise")
            v = (x >= initial_lo && x <= initial_hi) ? initial_amplitude : 0.0;
        else {  // bump
            const double xi = (x - 0.5 * length) / (0.25 * length);
            v = std::abs(xi) < 1.0 ? initial_amplitude * (1.0 - xi * xi) * (1.0 - xi * xi) : 0.0;
        }
        u0[static_cast<std::size_t>(i) - 1] = v;
    }

    std::function<double(double, double)> f;
    const double famp = forcing_amplitude;
    const double L = length;
    const bool tsin = forcing_time == "sine";
    if (forcing_preset == "zero" || famp == 0.0)
        f = [](double, double) { return 0.0; };
    else if (forcing_preset == "constant")
        f = [famp, tsin, T](double t, double) {
            return famp * (tsin ? std::sin(2.0 * M_PI * t / T) : 1.0);
        };
    else if (forcing_preset == "sine")
        f = [famp, tsin, T, L](double t, double x) {
            return famp * std::sin(M_PI * x / L) * (tsin ? std::sin(2.0 * M_PI * t / T) : 1.0);
        };
    else  // bump
        f = [famp, tsin, T, L](double t, double x) {
            const double xi = (x - 0.5 * L) / (0.25 * L);
            const double s = std::abs(xi) < 1.0 ? (1.0 - xi * xi) * (1.0 - xi * xi) : 0.0;
            return famp * s * (tsin ? std::sin(2.0 * M_PI * t / T) : 1.0);
        };

    return ProblemSpec::from_pair(mesh, grid, kernel, std::move(coeff), std::move(phi), std::move(u0),
                                  std::move(f));
}

namespace {

void run_solve(const ExperimentConfig& cfg, const fs::path& out, RunResult& res, bool quiet) {
    const ProblemSpec p = cfg.build_problem();
    const Solution s = solve(p, cfg.solver);
    const TrajectoryNorms n = space_time_norms(p.mesh, p.grid.tau(), s.u);

    bool want_csv = false, want_json = false;
    for (const auto& f : cfg.formats) {
        want_csv |= f == "csv";
        want_json |= f == "json";
    }
    if (want_csv) write_file(out / "solution.csv", solution_to_csv(p, s));

    json sum;
    sum["norms"] = {{"l1", n.l1}, {"l2", n.l2}, {"linf", n.linf}};
    double it_total = 0.0, res_max = 0.0;
    for (const auto& d : s.steps) {
        it_total += d.iterations;
        res_max = std::max(res_max, d.residual);
    }
    sum["diagnostics"] = {{"picard_iterations_total", it_total},
                          {"picard_residual_max", res_max},
                          {"eps_final", s.eps_final},
                          {"escalations", s.escalations},
                          {"truncation_bound", s.truncation_bound},
                          {"truncation_active", s.truncation_active}};
    json cont = json::array();
    for (const auto& r : s.continuation)
        cont.push_back({{"eps", r.eps}, {"sup_norm", r.sup_norm}, {"l2_dist_prev", r.l2_dist_prev}});
    sum["continuation"] = cont;
    if (want_json) write_file(out / "summary.json", sum.dump(2) + "\n");

    std::string txt = "solve: steps=" + std::to_string(cfg.steps) + " cells=" + std::to_string(cfg.cells) +
                      "\n  |u|_L2(Omega_T) = " + fmt_num(n.l2) + "\n  |u|_inf = " + fmt_num(n.linf) +
                      "\n  picard iterations total = " + fmt_num(it_total) + "\n";
    write_file(out / "summary.txt", txt);
    if (!quiet) std::fputs(txt.c_str(), stdout);

    res.metrics["sup_norm"] = n.linf;
    res.metrics["l2_norm"] = n.l2;
    res.metrics["picard_iterations_total"] = it_total;
}

void run_verify(const ExperimentConfig& cfg, const fs::path& out, RunResult& res, bool quiet) {
    Report rep;
    verify_battery(cfg, rep, quiet);
    write_file(out / "report.json", rep.to_json());
    write_file(out / "summary.txt", rep.to_text());
    if (!quiet) std::fputs(rep.to_text().c_str(), stdout);
    res.exit_code = rep.failed();
    res.metrics["failed_checks"] = rep.failed();
    res.metrics["total_checks"] = static_cast<double>(rep.checks.size());
}

void run_convergence(const ExperimentConfig& cfg, const fs::path& out, RunResult& res, bool quiet) {
    if (cfg.kernel.family != KernelFamily::Fractional)
        throw std::runtime_error("convergence mode requires the fractional family");
    const std::vector<BenchmarkRow> rows = benchmark_ladder(cfg.kernel.alpha, cfg.length, cfg.cells,
                                                            cfg.horizon, cfg.steps, cfg.doublings);
    std::string csv = "param,value,metric,result\n";
    std::string txt = "convergence (alpha=" + fmt_num(cfg.kernel.alpha) + ", cells=" +
                      std::to_string(cfg.cells) + ")\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        csv += "steps," + std::to_string(r.steps) + ",linf_error," + fmt_num(r.linf_error) + "\n";
        csv += "steps," + std::to_string(r.steps) + ",final_l2_error," + fmt_num(r.final_l2_error) + "\n";
        double ratio = 0.0;
        if (i > 0) {
            ratio = rows[i - 1].linf_error / r.linf_error;
            csv += "steps," + std::to_string(r.steps) + ",linf_ratio," + fmt_num(ratio) + "\n";
        }
        char line[160];
        std::snprintf(line, sizeof line, "  N=%6d  linf=%.6e  l2(T)=%.6e  ratio=%.3f\n", r.steps,
                      r.linf_error, r.final_l2_error, ratio);
        txt += line;
    }
    write_file(out / "aggregate.csv", csv);
    write_file(out / "summary.txt", txt);
    if (!quiet) std::fputs(txt.c_str(), stdout);
    res.metrics["linf_error"] = rows.back().linf_error;
    res.metrics["final_l2_error"] = rows.back().final_l2_error;
}

void run_contraction(const ExperimentConfig& cfg, const fs::path& out, RunResult& res, bool quiet) {
    Rng rng(cfg.seed);
    const ProblemSpec base = cfg.build_problem();
    const int ni = base.mesh.interior();

    std::vector<double> u0_b = base.u0;
    const std::vector<double> du = random_interior(rng, ni, 0.1);
    for (int i = 0; i < ni; ++i) u0_b[static_cast<std::size_t>(i)] += du[static_cast<std::size_t>(i)];
    const double df_amp = rng.uniform(0.0, 0.5);
    const double L = base.mesh.length;
    auto f_base = base.forcing;
    auto f_b = [f_base, df_amp, L](double t, double x) {
        return f_base(t, x) + df_amp * std::sin(2.0 * M_PI * x / L) * std::exp(-t);
    };
    ProblemSpec pb = base;
    pb.u0 = std::move(u0_b);
    pb.forcing = f_b;

    const Solution s1 = solve(base, cfg.solver);
    const Solution s2 = solve(pb, cfg.solver);

    Report rep;
    Timer t;
    rep.add(timed(l1_contraction_check(base, s1, pb, s2), t));
    write_file(out / "report.json", rep.to_json());
    write_file(out / "summary.txt", rep.to_text());
    bool want_csv = false;
    for (const auto& f : cfg.formats) want_csv |= f == "csv";
    if (want_csv) {
        write_file(out / "solution_1.csv", solution_to_csv(base, s1));
        write_file(out / "solution_2.csv", solution_to_csv(pb, s2));
    }
    if (!quiet) std::fputs(rep.to_text().c_str(), stdout);
    res.exit_code = rep.failed();
    res.metrics["failed_checks"] = rep.failed();
    res.metrics["contraction_margin"] = rep.checks.front().margin;
}

void run_kernel_lab(const ExperimentConfig& cfg, const fs::path& out, RunResult& res, bool quiet) {
    const TimeGrid grid(cfg.horizon, cfg.steps);
    const DiscreteKernel k = sample_cell_averages(cfg.kernel, KernelSide::K, grid);
    const DiscreteKernel l = sample_cell_averages(cfg.kernel, KernelSide::L, grid);
    write_file(out / "k.csv", kernel_to_csv(k));
    write_file(out / "l.csv", kernel_to_csv(l));

    Report rep;
    {
        Timer t;
        const PcCheck pc = verify_pc_pair(cfg.kernel, grid, 5e-3);
        CheckResult c = make_check("pc_identity", pc.mean_abs_defect, pc.tolerance, 0.0,
                                   "worst cell defect " + fmt_num(pc.max_abs_defect));
        c.pass = pc.pass;
        rep.add(timed(std::move(c), t));
    }
    for (double g : cfg.gammas) {
        Timer t;
        const ResolventSet r = resolvent_kernel(l, g);
        double hr = 0.0;
        for (int j = 1; j <= grid.steps; ++j)
            hr = std::max(hr, std::abs(r.h.cell(j) - g * r.r.cell(j)) /
                                  (1.0 + std::abs(r.h.cell(j))));
        CheckResult c = make_check("resolvent_h_gamma_r_g" + fmt_num(g), hr, 0.0, 1e-13);
        rep.add(timed(std::move(c), t));
        Timer t2;
        rep.add(timed(make_check("resolvent_nonneg_g" + fmt_num(g),
                                 std::max(negativity_defect(r.h), negativity_defect(r.r)), 0.0,
                                 1e-12),
                      t2));
    }
    write_file(out / "report.json", rep.to_json());
    write_file(out / "summary.txt", rep.to_text());
    if (!quiet) std::fputs(rep.to_text().c_str(), stdout);
    res.exit_code = rep.failed();
    res.metrics["failed_checks"] = rep.failed();
}

void verify_battery(const ExperimentConfig& cfg, Report& rep, bool quiet) {
    (void)quiet;
    const TimeGrid grid(cfg.horizon, cfg.steps);

    {
        // kernel-pair quality is a property of the sampling, not of the solve
        // grid; assess it on at least 1024 cells
        Timer t;
        const TimeGrid pc_grid(cfg.horizon, std::max(cfg.steps, 1024));
        const PcCheck pc = verify_pc_pair(cfg.kernel, pc_grid, 5e-3);
        CheckResult c = make_check("pc_identity", pc.mean_abs_defect, pc.tolerance, 0.0,
                                   "N=" + std::to_string(pc_grid.steps) + ", worst cell defect " +
                                       fmt_num(pc.max_abs_defect));
        c.pass = pc.pass;
        rep.add(timed(std::move(c), t));
    }

    const DiscreteKernel l = sample_cell_averages(cfg.kernel, KernelSide::L, grid);
    {
        Timer t;
        double neg = 0.0, mono = 0.0, hr = 0.0;
        for (double g : {0.1, 1.0, 10.0}) {
            const ResolventSet r = resolvent_kernel(l, g);
            neg = std::max({neg, negativity_defect(r.h), negativity_defect(r.r)});
            mono = std::max(mono, monotonicity_defect(r.s));
            for (int j = 1; j <= grid.steps; ++j)
                hr = std::max(hr, std::abs(r.h.cell(j) - g * r.r.cell(j)) / (1.0 + std::abs(r.h.cell(j))));
        }
        rep.add(timed(make_check("resolvent_nonneg", neg, 0.0, 1e-12), t));
        rep.add(make_check("resolvent_s_monotone", mono, 0.0, 1e-10));
        rep.add(make_check("resolvent_h_gamma_r", hr, 0.0, 1e-13));
    }
    {
        Timer t;
        std::vector<double> f(static_cast<std::size_t>(grid.steps) + 1);
        for (int n = 0; n <= grid.steps; ++n)
            f[static_cast<std::size_t>(n)] = std::sin(2.0 * M_PI * grid.node(n) / grid.horizon);
        const std::vector<double> gam = {1.0, 10.0, 100.0, 1000.0};
        const std::vector<double> e = yosida_convergence(l, f, gam);
        double worst = 0.0;
        for (std::size_t i = 1; i < e.size(); ++i) worst = std::max(worst, e[i] / e[i - 1]);
        rep.add(timed(make_check("yosida_convergence", worst, 1.0, 0.0,
                                 "largest adjacent error ratio; must stay below 1"),
                      t));
    }
    {
        Timer t;
        const DiscreteKernel k = sample_cell_averages(cfg.kernel, KernelSide::K, grid);
        rep.add(timed(convexity_suite(NonlocalOperator(k), 100, cfg.seed + 17), t));
    }
    {
        Timer t;
        const ExponentCheck ec = check_exponents(1.5, 4.0, std::numeric_limits<double>::infinity(), 1);
        rep.add(timed(make_check("exponent_window", ec.ok ? 0.0 : 1.0, 0.0, 0.0,
                                 ec.ok ? "p=1.5 q1=4 q2=inf d=1, beta=" + fmt_num(ec.hypotheses.beta)
                                       : ec.violation),
                      t));
    }

    const ProblemSpec p = cfg.build_problem();
    Timer solve_timer;
    const Solution s = solve(p, cfg.solver);
    const double solve_time = solve_timer.seconds();
    {
        Timer t;
        for (CheckResult c : linfty_check(p, s, cfg.forcing_is_zero())) {
            c.runtime_s = t.seconds() + solve_time;
            rep.add(std::move(c));
        }
        rep.add(linfty_stability_check(p, s));
    }
    {
        Timer t;
        rep.add(timed(energy_check(p, s), t));
    }
    {
        Timer t;
        Rng rng(cfg.seed + 101);
        ProblemSpec pb = p;
        const std::vector<double> du = random_interior(rng, p.mesh.interior(), 0.1);
        for (int i = 0; i < p.mesh.interior(); ++i) pb.u0[static_cast<std::size_t>(i)] += du[static_cast<std::size_t>(i)];
        const double df_amp = rng.uniform(0.0, 0.5);
        auto f_base = p.forcing;
        const double L = p.mesh.length;
        pb.forcing = [f_base, df_amp, L](double tt, double x) {
            return f_base(tt, x) + df_amp * std::sin(2.0 * M_PI * x / L) * std::exp(-tt);
        };
        const Solution sb = solve(pb, cfg.solver);
        rep.add(timed(l1_contraction_check(p, s, pb, sb), t));
    }
    {
        Timer t;
        std::vector<CheckResult> cs = translation_modulus_sweep(p, s);
        for (std::size_t i = 0; i < cs.size(); ++i) rep.add(i == 0 ? timed(cs[i], t) : cs[i]);
    }
    {
        double worst = -1.0;
        const auto& cont = s.continuation;
        std::vector<double> dist;
        for (const auto& r : cont)
            if (r.l2_dist_prev >= 0.0) dist.push_back(r.l2_dist_prev);
        const std::size_t m = dist.size();
        if (m >= 3) {
            for (std::size_t i = m - 2; i < m; ++i) worst = std::max(worst, dist[i] - dist[i - 1]);
            rep.add(make_check("eps_continuation_cauchy", worst, 0.0,
                               1e-12 * (1.0 + dist[m - 3]),
                               "last three continuation distances nonincreasing"));
        } else {
            rep.add(make_check("eps_continuation_cauchy", 0.0, 0.0, 0.0,
                               "schedule too short to measure; skipped"));
        }
    }
}

RunResult do_run(const ExperimentConfig& cfg, const std::string& out_dir, bool quiet) {
    const fs::path out(out_dir.empty() ? default_output_dir() : out_dir);
    fs::create_directories(out);
    RunResult res;
    switch (cfg.mode) {
        case RunMode::Solve: run_solve(cfg, out, res, quiet); break;
        case RunMode::VerifySuite: run_verify(cfg, out, res, quiet); break;
        case RunMode::Convergence: run_convergence(cfg, out, res, quiet); break;
        case RunMode::ContractionPair: run_contraction(cfg, out, res, quiet); break;
        case RunMode::KernelLab: run_kernel_lab(cfg, out, res, quiet); break;
    }
    return res;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool quiet) {
    return do_run(cfg, out_dir, quiet);
}

int run(const std::string& config_path, const std::string& out_override, std::int64_t seed_override,
        bool quiet) {
    try {
        ExperimentConfig cfg = ExperimentConfig::from_file(config_path);
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        const std::string out = !out_override.empty() ? out_override
                                : !cfg.output_dir.empty() ? cfg.output_dir
                                                          : default_output_dir();
        return run_experiment(cfg, out, quiet).exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int sweep(const std::string& config_path, const std::string& parameter,
          const std::vector<double>& values, const std::string& out_override,
          std::int64_t seed_override, bool quiet) {
    try {
        if (values.empty()) throw std::runtime_error("sweep: empty value list");
        std::ifstream f(config_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot read config file " + config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        json base = json::parse(ss.str());

        // the parameter must already be addressable in the config
        {
            json* cur = &base;
            std::size_t pos = 0;
            while (true) {
                const std::size_t dot = parameter.find('.', pos);
                const std::string key =
                    parameter.substr(pos, dot == std::string::npos ? dot : dot - pos);
                if (!cur->is_object() || !cur->contains(key))
                    throw std::runtime_error("sweep: parameter '" + parameter +
                                             "' not present in config");
                cur = &(*cur)[key];
                if (dot == std::string::npos) break;
                pos = dot + 1;
            }
        }

        ExperimentConfig probe = ExperimentConfig::from_json_text(base.dump());
        const std::string out_root = !out_override.empty()  ? out_override
                                     : !probe.output_dir.empty() ? probe.output_dir
                                                                 : default_output_dir();
        fs::create_directories(out_root);

        struct Child {
            double value;
            std::string dir;
            std::future<RunResult> fut;
        };
        std::vector<Child> children;
        for (double v : values) {
            json j = base;
            json* cur = &j;
            std::size_t pos = 0;
            while (true) {
                const std::size_t dot = parameter.find('.', pos);
                const std::string key =
                    parameter.substr(pos, dot == std::string::npos ? dot : dot - pos);
                if (dot == std::string::npos) {
                    if ((*cur)[key].is_number_integer())
                        (*cur)[key] = static_cast<std::int64_t>(std::llround(v));
                    else
                        (*cur)[key] = v;
                    break;
                }
                cur = &(*cur)[key];
                pos = dot + 1;
            }
            std::string leaf = parameter;
            for (auto& ch : leaf)
                if (ch == '.') ch = '_';
            char tag[64];
            std::snprintf(tag, sizeof tag, "%s=%.6g", leaf.c_str(), v);
            const std::string dir = (fs::path(out_root) / tag).string();
            ExperimentConfig cfg = ExperimentConfig::from_json_text(j.dump());
            if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
            children.push_back({v, dir, std::async(std::launch::async, [cfg, dir, quiet] {
                                    return run_experiment(cfg, dir, quiet);
                                })});
        }

        std::string agg = "param,value,metric,result\n";
        int exit_code = 0;
        for (auto& c : children) {
            try {
                const RunResult r = c.fut.get();
                if (r.exit_code != 0) exit_code = 1;
                for (const auto& [k, v] : r.metrics) {
                    char line[192];
                    std::snprintf(line, sizeof line, "%s,%.6g,%s,%.17g\n", parameter.c_str(), c.value,
                                  k.c_str(), v);
                    agg += line;
                }
            } catch (const std::exception& e) {
                std::fprintf(stderr, "sweep value %.6g failed: %s\n", c.value, e.what());
                agg += parameter + "," + fmt_num(c.value) + ",error,1\n";
                exit_code = 1;
            }
        }
        write_file(fs::path(out_root) / "aggregate.csv", agg);
        return exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace subdif
