"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ctxfrac.contextual import contextual_fraction
from ctxfrac.entanglement import (
    cf_of_theta,
    diagonal_sweep,
    distinguished_cf,
    equatorial_sweep,
    local_maxima,
    monotonicity_check,
    phase_rotation_equivalence,
    theta_curve,
)
from ctxfrac.scenario import fixture_model, marginalize
from ctxfrac.states import (
    BASIS_ALIASES,
    BellScenario,
    PureState,
    bloch_ket,
    born_model,
    diag_entropy,
    diag_state,
    entanglement_entropy,
    ghz_state,
    product_state,
    random_bell_scenario,
    random_state,
    random_unitary,
    schmidt_decompose,
    separable_witness,
)
from ctxfrac.entanglement import threshold_entropy

ROOT2M1 = math.sqrt(2) - 1
GRID = 64


def report(n: int, ok: bool, detail: str) -> None:
    line = f"AC{n} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def equatorial_grid():
    return equatorial_sweep(grid_n=GRID)


@pytest.fixture(scope="module")
def diagonal_grid():
    return diagonal_sweep(grid_n=GRID)


def test_ac1_table1_fractions():
    got = {name: contextual_fraction(fixture_model(name)).cf for name in ("table1a", "table1b", "table1c")}
    want = {"table1a": 0.0, "table1b": 1.0, "table1c": 0.5}
    ok = all(abs(got[k] - want[k]) <= 1e-6 for k in want)
    report(1, ok, ", ".join(f"{k}={got[k]:.9f}" for k in want))


def test_ac2_ghz_pi8():
    sc = BellScenario.uniform(BASIS_ALIASES["pi8"], BASIS_ALIASES["5pi8"], 2)
    cf = contextual_fraction(born_model(ghz_state(2), sc)).cf
    report(2, abs(cf - ROOT2M1) <= 1e-6, f"CF={cf:.12f}, target={ROOT2M1:.12f}")


def test_ac3_equatorial_sweep(equatorial_grid):
    cf = equatorial_grid.layers["cf"]
    maxima = local_maxima(cf)
    peak = float(cf.max())
    step = equatorial_grid.axes[0].values()[1]
    ti, tj = round(math.pi / 8 / step), round(5 * math.pi / 8 / step)

    def near(i, j):
        di = min(abs(i - ti), GRID - abs(i - ti))
        dj = min(abs(j - tj), GRID - abs(j - tj))
        return di <= 1 and dj <= 1

    diag = float(np.max(np.abs(np.diag(cf))))
    ok = (len(maxima) == 4 and abs(peak - ROOT2M1) <= 1e-3
          and any(near(i, j) for i, j in maxima) and diag <= 1e-6)
    report(3, ok, f"maxima={len(maxima)} at {maxima}, max={peak:.9f}, diagonal max={diag:.2e}")


def test_ac4_entropy():
    s_ghz = entanglement_entropy(ghz_state(2))
    s_th = threshold_entropy()
    r2 = math.sqrt(2)
    closed = (6 + r2 * math.log2(3 - 2 * r2)) / 4
    s_diag = entanglement_entropy(diag_state(math.pi / 4, 0))
    ok = abs(s_ghz - 1) <= 1e-9 and abs(s_th - closed) <= 1e-9 and abs(s_th - s_diag) <= 1e-9
    report(4, ok, f"S(GHZ2)={s_ghz:.12f}, S_th={s_th:.6f}, S(diag pi/4)={s_diag:.12f}")


def test_ac5_product_states():
    rng = np.random.default_rng(5)
    worst_cf = worst_dev = 0.0
    for k in range(200):
        n = 2 if k % 2 == 0 else 3
        factors = [bloch_ket(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)) for _ in range(n)]
        sc = random_bell_scenario(rng, n)
        e = born_model(product_state(factors), sc)
        worst_cf = max(worst_cf, contextual_fraction(e).cf)
        d = separable_witness(factors, sc)
        for c, row in enumerate(e.rows):
            worst_dev = max(worst_dev, float(np.max(np.abs(marginalize(d, c) - row))))
    ok = worst_cf <= 1e-6 and worst_dev < 1e-12
    report(5, ok, f"200 product states, max CF={worst_cf:.2e}, max witness deviation={worst_dev:.2e}")


def test_ac6_phase_rotation():
    rng = np.random.default_rng(6)
    cases = [(math.pi / 2, math.pi / 8)] + [
        (rng.uniform(0, math.pi), rng.uniform(0, math.pi)) for _ in range(50)
    ]
    devs = [phase_rotation_equivalence(t, v) for t, v in cases]
    worst = max(devs)
    report(6, worst < 1e-9,
           f"51 cases, max deviation={worst:.3e}, (pi/2, pi/8) deviation={devs[0]:.3e}")


def test_ac7_schmidt_suite():
    rng = np.random.default_rng(7)
    recon = ent = dist = 0.0
    for _ in range(500):
        psi = random_state(rng)
        form = schmidt_decompose(psi)
        recon = max(recon, float(np.max(np.abs(form.state().amplitudes - psi.amplitudes))))
        moved = PureState(np.kron(random_unitary(rng), random_unitary(rng)) @ psi.amplitudes)
        ent = max(ent, abs(entanglement_entropy(moved) - entanglement_entropy(psi)))
        dist = max(dist, abs(distinguished_cf(moved).cf - distinguished_cf(psi).cf))
    ok = recon < 1e-9 and ent < 1e-9 and dist < 1e-9
    report(7, ok, f"500 states, reconstruction={recon:.2e}, entropy gap={ent:.2e}, distinguished CF gap={dist:.2e}")


def test_ac8_theta_monotonicity():
    curve = theta_curve(201)
    cfs = np.array([p.cf for p in curve])
    drop = float(max(0.0, np.max(cfs[:-1] - cfs[1:])))
    mono = monotonicity_check(1000, seed=42)
    at_quarter = cf_of_theta(math.pi / 4)
    beyond = [cf_of_theta(t) for t in np.linspace(math.pi / 4 + 0.05 + 1e-9, math.pi / 2, 20)]
    ok = drop <= 1e-6 and mono.violations == 0 and abs(at_quarter) <= 1e-9 and min(beyond) > 0
    report(8, ok, f"largest drop={drop:.2e}, violations={mono.violations}, "
                  f"cf(pi/4)={at_quarter:.2e}, min cf beyond pi/4+0.05={min(beyond):.6f}")


def test_ac9_no_strong_contextuality(diagonal_grid):
    peak = float(diagonal_grid.layers["cf"].max())
    report(9, peak <= 1 - 1e-3, f"max CF over diagonal sweep={peak:.9f}")


DETERMINISM_COMMANDS = [
    ["fixtures", "--out", "{d}"],
    ["cf", "--model", "{d}/table1c.json", "--out", "{d}/cf.json", "--witness", "{d}/witness.json"],
    ["born", "--state", "ghz:2", "--scenario", "bell:pi8,5pi8", "--out", "{d}/born.json"],
    ["schmidt", "--state", "amps:0.3,0.1;0.2,-0.4;0.5,0;0.1,0.6", "--out", "{d}/schmidt.json"],
    ["entropy", "--state", "diag:pi/3,0"],
    ["distinguished-cf", "--state", "amps:0.3,0.1;0.2,-0.4;0.5,0;0.1,0.6"],
    ["sweep-equatorial", "--grid", "8", "--out", "{d}/eq.csv"],
    ["sweep-equatorial", "--grid", "8", "--workers", "2", "--out", "{d}/eq2.csv"],
    ["sweep-diagonal", "--grid", "6", "--out", "{d}/diag.csv"],
    ["curve-theta", "--points", "11", "--out", "{d}/curve.csv"],
    ["threshold"],
    ["monotonicity", "--samples", "20", "--seed", "3", "--out", "{d}/mono.csv"],
]


def _run_all(d, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    outs = []
    for cmd in DETERMINISM_COMMANDS:
        argv = [a.replace("{d}", str(d)) for a in cmd]
        proc = subprocess.run([sys.executable, "-m", "ctxfrac", *argv], capture_output=True, env=env)
        outs.append((proc.returncode, proc.stdout.replace(str(d).encode(), b"{d}")))
    files = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
    return outs, files


def test_ac10_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    outs_a, files_a = _run_all(a, "1")
    outs_b, files_b = _run_all(b, "2")
    codes = {code for code, _ in outs_a}
    same = outs_a == outs_b and files_a == files_b
    report(10, same and codes == {0},
           f"{len(DETERMINISM_COMMANDS)} subcommand runs twice, exit codes={sorted(codes)}, "
           f"{len(files_a)} files byte-identical={files_a == files_b}, stdout identical={outs_a == outs_b}")
