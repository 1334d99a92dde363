"""End-to-end smoke tests for the python bindings."""

import math

import pytest

import subdif


def test_kernel_sampling_and_pc_identity():
    grid = subdif.TimeGrid(1.0, 512)
    pair = subdif.KernelPair.fractional(0.5)
    k = subdif.sample_cell_averages(pair, "k", grid)
    l = subdif.sample_cell_averages(pair, "l", grid)
    assert len(k.weights) == 512
    assert all(w >= 0 for w in l.weights)
    assert k.weights == sorted(k.weights, reverse=True)

    pc = subdif.verify_pc_pair(pair, grid, 5e-3)
    assert pc.pass_
    assert pc.mean_abs_defect < 5e-3

    conv = subdif.kernel_convolve(k, l)
    assert abs(conv.weights[-1] - 1.0) < 1e-3


def test_resolvent_structure():
    grid = subdif.TimeGrid(1.0, 256)
    l = subdif.sample_cell_averages(subdif.KernelPair.fractional(0.5), "l", grid)
    res = subdif.resolvent_kernel(l, 2.0)
    for h, r in zip(res.h.weights, res.r.weights):
        assert h == pytest.approx(2.0 * r, rel=1e-12)
    assert min(res.s.weights) >= -1e-10
    assert max(res.s.weights) <= 1.0 + 1e-10


def test_mittag_leffler_values():
    assert subdif.mittag_leffler(0.5, 0.0) == 1.0
    assert subdif.mittag_leffler(1.0, -1.0) == pytest.approx(math.exp(-1.0), rel=1e-12)
    oracle = math.exp(1.0) * math.erfc(1.0)
    assert subdif.mittag_leffler(0.5, -1.0) == pytest.approx(oracle, rel=1e-9)


def test_solve_maximum_principle():
    mesh = subdif.Mesh1D(1.0, 16)
    grid = subdif.TimeGrid(1.0, 16)
    u0 = [math.sin(math.pi * mesh.node(i)) for i in range(1, mesh.interior + 1)]
    problem = subdif.build_problem(
        mesh, grid, subdif.KernelPair.fractional(0.5), 1.0,
        subdif.Nonlinearity.porous_medium(3.0), u0,
    )
    sol = subdif.solve(problem)
    sup = max(abs(x) for row in sol.u for x in row)
    assert sup <= max(u0) + 1e-10
    assert not sol.truncation_active
    assert sol.eps_final == pytest.approx(1e-6)

    energy = subdif.energy_check(problem, sol)
    assert energy.pass_


def test_convexity_margin_nonnegative():
    grid = subdif.TimeGrid(1.0, 64)
    k = subdif.sample_cell_averages(subdif.KernelPair.fractional(0.5), "k", grid)
    op = subdif.NonlocalOperator(k)
    check = subdif.convexity_suite(op, 25, 3)
    assert check.pass_


def test_run_experiment_roundtrip(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(
        """{
        "mode": "solve",
        "seed": 5,
        "problem": {
          "length": 1.0, "cells": 8, "horizon": 1.0, "steps": 4,
          "kernel": {"family": "fractional", "alpha": 0.5},
          "nonlinearity": {"preset": "linear"},
          "initial": {"preset": "sine", "amplitude": 0.5},
          "forcing": {"preset": "zero"}
        }
      }"""
    )
    rc = subdif.run_experiment(str(cfg), str(tmp_path / "out"), -1, True)
    assert rc == 0
    csv = (tmp_path / "out" / "solution.csv").read_text()
    assert csv.startswith("n,t,i,x,u,v\n")
