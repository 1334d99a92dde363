#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "subdif/experiment.hpp"

using namespace subdif;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("subdif_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

const char* kTfpmConfig = R"({
  "mode": "solve",
  "seed": 7,
  "problem": {
    "length": 1.0, "cells": 12, "horizon": 1.0, "steps": 8,
    "kernel": {"family": "fractional", "alpha": 0.5},
    "coefficient": {"preset": "constant", "value": 1.0},
    "nonlinearity": {"preset": "pme", "exponent": 3.0},
    "initial": {"preset": "sine", "amplitude": 1.0},
    "forcing": {"preset": "zero"}
  }
})";

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.json";
    std::ofstream f(p);
    f << text;
    return p;
}

}  // namespace

TEST_CASE("config parsing: defaults, presets, malformed input") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(kTfpmConfig);
    CHECK(cfg.mode == RunMode::Solve);
    CHECK(cfg.cells == 12);
    CHECK(cfg.kernel.alpha == 0.5);
    CHECK(cfg.phi_preset == "pme");

    // missing alpha names the field
    CHECK_THROWS_WITH_AS(
        ExperimentConfig::from_json_text(R"({"problem":{"kernel":{"family":"fractional"}}})"),
        doctest::Contains("problem.kernel.alpha"), std::runtime_error);
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json_text(R"({"mode":"wat"})"),
                         doctest::Contains("mode"), std::runtime_error);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{nope"), std::runtime_error);
}

TEST_CASE("built problems honor presets") {
    ExperimentConfig cfg = ExperimentConfig::from_json_text(kTfpmConfig);
    cfg.coeff_preset = "piecewise";
    cfg.coeff_left = 0.1;
    cfg.coeff_right = 1.0;
    const ProblemSpec p = cfg.build_problem();
    CHECK(p.coeff.nu == doctest::Approx(0.1));
    CHECK(p.coeff.value(0.0, 1) == doctest::Approx(0.1));
    CHECK(p.coeff.value(0.0, 12) == doctest::Approx(1.0));
    CHECK(p.u0[0] > 0.0);
}

TEST_CASE("zero-data solve writes an all-zero csv and exits 0") {
    const fs::path dir = temp_dir("zero");
    ExperimentConfig cfg = ExperimentConfig::from_json_text(kTfpmConfig);
    cfg.initial_amplitude = 0.0;
    const RunResult res = run_experiment(cfg, (dir / "out").string(), true);
    CHECK(res.exit_code == 0);
    const std::string csv = slurp(dir / "out" / "solution.csv");
    std::stringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "n,t,i,x,u,v");
    while (std::getline(ss, line)) {
        const std::size_t p1 = line.rfind(",0,0");
        CHECK(p1 != std::string::npos);
        CHECK(p1 == line.size() - 4);
    }
    fs::remove_all(dir);
}

TEST_CASE("verify suite: all checks pass on the TFPM preset and reruns are byte-identical") {
    const fs::path dir = temp_dir("verify");
    ExperimentConfig cfg = ExperimentConfig::from_json_text(kTfpmConfig);
    cfg.mode = RunMode::VerifySuite;
    cfg.cells = 16;
    cfg.steps = 16;
    const RunResult a = run_experiment(cfg, (dir / "a").string(), true);
    const RunResult b = run_experiment(cfg, (dir / "b").string(), true);
    CHECK(a.exit_code == 0);
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(slurp(dir / "a" / "report.json").find("\"failed\": 0") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("kernel lab writes kernel csvs") {
    const fs::path dir = temp_dir("klab");
    ExperimentConfig cfg = ExperimentConfig::from_json_text(kTfpmConfig);
    cfg.mode = RunMode::KernelLab;
    cfg.steps = 1024;
    const RunResult res = run_experiment(cfg, dir.string(), true);
    CHECK(res.exit_code == 0);
    CHECK(slurp(dir / "k.csv").rfind("j,weight\n", 0) == 0);
    CHECK(slurp(dir / "l.csv").rfind("j,weight\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("contraction pair mode passes") {
    const fs::path dir = temp_dir("contraction");
    ExperimentConfig cfg = ExperimentConfig::from_json_text(kTfpmConfig);
    cfg.mode = RunMode::ContractionPair;
    const RunResult res = run_experiment(cfg, dir.string(), true);
    CHECK(res.exit_code == 0);
    fs::remove_all(dir);
}

TEST_CASE("run(): byte-identical csv for identical config and seed") {
    const fs::path dir = temp_dir("determinism");
    const fs::path cfg_path = write_config(dir, kTfpmConfig);
    CHECK(run(cfg_path.string(), (dir / "r1").string(), -1, true) == 0);
    CHECK(run(cfg_path.string(), (dir / "r2").string(), -1, true) == 0);
    CHECK(slurp(dir / "r1" / "solution.csv") == slurp(dir / "r2" / "solution.csv"));
    CHECK(slurp(dir / "r1" / "summary.json") == slurp(dir / "r2" / "summary.json"));
    fs::remove_all(dir);
}

TEST_CASE("default output directory honors SUBDIF_OUT_DIR") {
    setenv("SUBDIF_OUT_DIR", "/tmp/subdif_envtest", 1);
    CHECK(default_output_dir() == "/tmp/subdif_envtest");
    unsetenv("SUBDIF_OUT_DIR");
    CHECK(default_output_dir() == "out");
}

TEST_CASE("run(): missing config or bad field yields nonzero exit") {
    CHECK(run("/no/such/config.json", "", -1, true) != 0);
    const fs::path dir = temp_dir("badcfg");
    const fs::path cfg_path = write_config(dir, R"({"problem":{"kernel":{"family":"tempered","alpha":0.5}}})");
    CHECK(run(cfg_path.string(), dir.string(), -1, true) != 0);
    fs::remove_all(dir);
}

TEST_CASE("sweep over alpha: subdirectories plus aggregate, empty list rejected") {
    const fs::path dir = temp_dir("sweep");
    const fs::path cfg_path = write_config(dir, kTfpmConfig);
    const int rc = sweep(cfg_path.string(), "problem.kernel.alpha", {0.25, 0.5, 0.75},
                         (dir / "out").string(), -1, true);
    CHECK(rc == 0);
    for (const char* tag :
         {"problem_kernel_alpha=0.25", "problem_kernel_alpha=0.5", "problem_kernel_alpha=0.75"})
        CHECK(fs::exists(dir / "out" / tag / "solution.csv"));
    const std::string agg = slurp(dir / "out" / "aggregate.csv");
    CHECK(agg.rfind("param,value,metric,result\n", 0) == 0);
    CHECK(agg.find("problem.kernel.alpha,0.25,") != std::string::npos);

    CHECK(sweep(cfg_path.string(), "problem.kernel.alpha", {}, (dir / "out2").string(), -1, true) != 0);
    CHECK(sweep(cfg_path.string(), "problem.nope", {1.0}, (dir / "out3").string(), -1, true) != 0);
    fs::remove_all(dir);
}
