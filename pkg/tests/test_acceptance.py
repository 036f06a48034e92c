"""End-to-end acceptance checks, one test per numbered criterion.

Each test prints a single PASS/FAIL line with its measured figure and
wall time, then asserts.  Tolerances and budgets are the package's
published accuracy contract; loosening them is changing the contract.
"""

import json
import math
import time

import numpy as np

from hardymap._threads import ENV_THREADS
from hardymap.cli import run
from hardymap.criteria import (
    _STANCE,
    AlphaGrid,
    change_of_variables_check,
    green_angular,
    hardy_norm_direct,
    hardy_number_estimate,
    hyp_criterion,
    levelset_decay_profile,
    membership_verdict,
    yamashita_integral,
)
from hardymap.hmeasure import WoSConfig, beurling_check
from hardymap.hypgeo import bound_constant, green_disk, green_via_distance, hyp_dist
from hardymap.levelset import dist_to_levelset
from hardymap.maps import catalog_get, parse_map_spec


def _report(capsys, number, name, ok, detail, t0):
    status = "PASS" if ok else "FAIL"
    with capsys.disabled():
        print(f"[criterion {number}] {name}: {status} ({detail}, {time.time() - t0:.1f}s)")


def test_c1_green_identity(capsys):
    t0 = time.time()
    rng = np.random.Generator(np.random.Philox(key=2025))
    u = rng.random((4, 10_000))
    z = 0.95 * np.sqrt(u[0]) * np.exp(2j * math.pi * u[1])
    w = 0.95 * np.sqrt(u[2]) * np.exp(2j * math.pi * u[3])
    w = np.where(z == w, 0.5 * w + 0.1, w)
    direct = green_disk(z, w)
    max_rel = float(np.max(np.abs(direct - green_via_distance(hyp_dist(z, w))) / direct))
    ok = max_rel <= 1e-12 and time.time() - t0 < 1.0
    _report(capsys, 1, "Green identity", ok, f"max_rel={max_rel:.3e}", t0)
    assert ok


def test_c2_halfplane_distance_law(capsys):
    t0 = time.time()
    hp = catalog_get("halfplane")
    worst = 0.0
    for alpha in (2.0, 5.0, 10.0, 100.0, 1e4):
        got = math.exp(-dist_to_levelset(hp, alpha))
        worst = max(worst, abs(got * alpha - 1.0))
    ok = worst <= 1e-6 and time.time() - t0 < 5.0
    _report(capsys, 2, "half-plane distance law", ok, f"max_rel={worst:.3e}", t0)
    assert ok


def test_c3_hardy_numbers(capsys):
    t0 = time.time()
    errs = []
    for beta in (0.5, 1.0, 2.0):
        got = hardy_number_estimate(catalog_get("sector", (beta,)))
        errs.append(abs(got * beta - 1.0))  # relative to 1/beta
    sector_ok = max(errs) <= 0.05
    koebe = hardy_number_estimate(catalog_get("koebe"))
    koebe_ok = abs(koebe - 0.5) / 0.5 <= 0.10
    strip_ok = hardy_number_estimate(catalog_get("strip")) == math.inf
    ok = sector_ok and koebe_ok and strip_ok and time.time() - t0 < 120.0
    _report(capsys, 3,
        "sector/koebe/strip Hardy numbers",
        ok,
        f"sector_rel={max(errs):.3f} koebe={koebe:.4f} strip_inf={strip_ok}",
        t0,
    )
    assert ok


def test_c4_iff_consistency(capsys):
    t0 = time.time()
    cases = {"halfplane": 1.0, "sector:0.5": 2.0, "sector:2": 0.5, "koebe": 0.5}
    grid = AlphaGrid()
    n_decisive = n_contra = 0
    for spec, h in cases.items():
        m = parse_map_spec(spec)
        profile = levelset_decay_profile(m, grid)
        for factor in (0.5, 0.9, 1.1, 1.5):
            p = factor * h
            stances = [
                hyp_criterion(m, p, grid, profile=profile).verdict,
                _STANCE.get(yamashita_integral(m, p).classification, "inconclusive"),
                _STANCE.get(hardy_norm_direct(m, p).classification, "inconclusive"),
            ]
            firm = [s for s in stances if s != "inconclusive"]
            n_contra += len(set(firm)) > 1
            n_decisive += len(firm) == 3
    ok = n_decisive >= 12 and n_contra == 0 and time.time() - t0 < 600.0
    _report(capsys, 4,
        "iff-consistency on 16 cases",
        ok,
        f"decisive={n_decisive}/16 contradictions={n_contra}",
        t0,
    )
    assert ok


def test_c5_beurling_grid(capsys):
    t0 = time.time()
    cfg = WoSConfig(n_walkers=100_000, seed=0)
    min_ratio, failures = math.inf, 0
    for spec in ("halfplane", "sector:0.5", "sector:2", "koebe"):
        m = parse_map_spec(spec)
        for alpha in (2.0, 5.0, 10.0, 50.0, 100.0):
            rep = beurling_check(m, alpha, cfg)
            min_ratio = min(min_ratio, rep.ratio)
            failures += not rep.passed
    ok = failures == 0 and time.time() - t0 < 600.0
    _report(capsys, 5,
        "projection bound on 20 cases",
        ok,
        f"failures={failures} min_ratio={min_ratio:.2f}",
        t0,
    )
    assert ok


def test_c6_change_of_variables(capsys):
    t0 = time.time()
    d_hp = change_of_variables_check(catalog_get("halfplane"), 0.5)
    d_sec = change_of_variables_check(parse_map_spec("sector:2"), 0.25)
    ok = d_hp <= 0.02 and d_sec <= 0.02 and time.time() - t0 < 120.0
    _report(capsys, 6,
        "change of variables",
        ok,
        f"halfplane={d_hp:.2e} sector2={d_sec:.2e}",
        t0,
    )
    assert ok


def test_c7_envelope_constant(capsys):
    t0 = time.time()
    # dense-grid oracle for the tightest multiple of exp(-d) covering
    # the distance form of the Green function beyond x0 = 1
    d = 1.0 + np.linspace(0.0, 29.0, 200_001)
    oracle = float(np.max(green_via_distance(d) * np.exp(d)))
    c = bound_constant(1.0)
    const_ok = abs(c - oracle) <= 1e-3 and abs(oracle - 2.0983) <= 1e-3

    hp = catalog_get("halfplane")
    slack = 0.0
    n_checked = 0
    for alpha in AlphaGrid().values:
        dist = dist_to_levelset(hp, float(alpha))
        if dist < 1.0:
            continue
        n_checked += 1
        slack = max(slack, green_angular(hp, float(alpha)) / (2.0 * math.pi * c * math.exp(-dist)))
    bound_ok = n_checked > 0 and slack <= 1.01
    ok = const_ok and bound_ok and time.time() - t0 < 60.0
    _report(capsys, 7,
        "Green envelope",
        ok,
        f"C={c:.6f} oracle={oracle:.6f} worst_ratio={slack:.4f} on {n_checked} levels",
        t0,
    )
    assert ok


def test_c8_small_p_membership(capsys):
    t0 = time.time()
    specs = ("halfplane", "sector:0.5", "sector:1", "sector:2", "koebe", "strip")
    outcomes = {
        spec: membership_verdict(parse_map_spec(spec), 0.4).conclusion
        for spec in specs
    }
    ok = all(v == "member" for v in outcomes.values()) and time.time() - t0 < 300.0
    _report(capsys, 8, "membership at p = 0.4", ok, f"outcomes={sorted(set(outcomes.values()))}", t0)
    assert ok


def test_c9_reproducibility(capsys, monkeypatch):
    t0 = time.time()
    verify_argv = [
        "verify", "--map", "halfplane", "--p", "0.5", "--include-harm",
        "--alpha-min", "10", "--alpha-max", "1e4", "--per-decade", "4",
        "--walkers", "20000", "--seed", "7",
    ]
    criteria_argv = ["criteria", "--map", "sector:2", "--walkers", "20000", "--seed", "9"]

    def capture(argv):
        code = run(argv)
        out = capsys.readouterr().out
        return code, out

    outputs = {}
    for name, argv in (("verify", verify_argv), ("criteria", criteria_argv)):
        monkeypatch.setenv(ENV_THREADS, "1")
        c1, o1 = capture(argv)
        monkeypatch.setenv(ENV_THREADS, "6")
        c2, o2 = capture(argv)
        c3, o3 = capture(argv)
        outputs[name] = (
            c1 == c2 == c3 == 0 and o1 == o2 == o3 and len(o1) > 0
        )
    ok = all(outputs.values()) and time.time() - t0 < 300.0
    _report(capsys, 9, "byte-identical reruns", ok, f"stable={outputs}", t0)
    assert ok
