"""Acceptance criteria, one test (or parametrised family) per criterion.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed at the end of the session.
"""
import csv
import io
import math
import time

import numpy as np
import pytest
import shapely

from su2control.cli import main
from su2control.extremal import (
    DriftControlLaw,
    FreeControlLaw,
    drift_disk_traj,
    drift_propagator,
    free_propagator,
)
from su2control.mintime import boundary_min_time, min_time_drift, omega_bounds
from su2control.oracle import integrate_drift, integrate_free, verify_plan, waveform_of
from su2control.reachable import (
    contains,
    critical_gammas,
    critical_time,
    critical_trajectory,
    frontline,
    frontline_extension,
    jacobian_det,
    signed_margins,
)
from su2control.su2 import SU2Element, distance, phase_element, swap_like
from su2control.sync import SyncProblem, common_scan_step, feasible_at, synchronize

from conftest import element_with_point, random_su2


def test_criterion_1_closed_form_matches_oracle():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        gamma = rng.uniform(0.2, 5.0)
        omega = rng.uniform(-10.0, 10.0)
        phi = rng.uniform(-math.pi, math.pi)
        t = rng.uniform(0.0, math.pi / gamma)
        drift = DriftControlLaw(gamma, omega, phi, t)
        free = FreeControlLaw(gamma, omega, phi, t)
        d1 = distance(drift_propagator(t, omega, phi, gamma), integrate_drift(waveform_of(drift), t, 1e-4))
        d2 = distance(free_propagator(t, omega, phi, gamma), integrate_free(waveform_of(free), t, 1e-4))
        worst = max(worst, d1, d2)
    elapsed = time.perf_counter() - start
    assert worst <= 1e-8, worst
    assert elapsed < 30.0, elapsed


@pytest.mark.parametrize("gamma", [0.3, 0.5, 1.0])
def test_criterion_2_swap_golden_value(gamma):
    res = min_time_drift(swap_like(0.4), gamma)
    assert abs(res.t_star - math.pi / (2 * gamma)) <= 1e-6
    assert res.convention == "drift"
    assert abs(res.omega_star - 1.0) <= 1e-6


@pytest.mark.parametrize("gamma", [0.4, 0.7, 1.0])
@pytest.mark.parametrize("psi", [0.5, 1.5, math.pi, 5.0])
def test_criterion_3_boundary_formula(gamma, psi):
    res = min_time_drift(phase_element(psi), gamma)
    q = psi * (2 * math.pi - psi)
    expected = q / (math.pi - psi + math.sqrt(math.pi**2 + gamma**2 * q))
    assert abs(expected - boundary_min_time(psi, gamma)) < 1e-15
    assert abs(res.t_star - expected) <= 1e-5


@pytest.mark.parametrize("gamma", [0.3, 0.7, 1.0, 2.5])
def test_criterion_4_reachable_set_collapse(gamma):
    T = math.pi / gamma
    fl = frontline(T, gamma, 512)
    assert np.all(np.hypot(fl.x + 1.0, fl.y) <= 1e-9)
    assert not contains((-1.0, 0.0), T - 0.01, gamma)
    assert contains((-1.0, 0.0), T, gamma)


def test_criterion_5_frontline_structure():
    rng = np.random.default_rng(5)
    n = 4096
    violations = []
    for k in range(50):
        gamma = rng.uniform(0.2, 2.0)
        t1, t2 = np.sort(rng.uniform(0.02, 0.98, 2) * math.pi / gamma)
        f1, f2 = frontline(t1, gamma, n), frontline(t2, gamma, n)
        l1, l2 = shapely.LineString(f1.points), shapely.LineString(f2.points)
        if l1.intersects(l2) or l1.distance(l2) <= 0:
            violations.append((k, "F_t1 meets F_t2"))
        if not (l1.is_simple and l2.is_simple):
            violations.append((k, "self-intersection"))
        if not np.all(signed_margins(f1.x, f1.y, t2, gamma) > 0):
            violations.append((k, "F_t1 not inside region of t2"))
        for t in (t1, t2):
            _, sx, sy = frontline_extension(t, gamma, n, factor=20.0)
            if not np.all(signed_margins(sx, sy, t, gamma) > 0):
                violations.append((k, "extension not strictly inside"))
    assert violations == []


def test_criterion_6_monotonicity():
    rng = np.random.default_rng(6)
    m = 1000
    r = np.sqrt(rng.uniform(0, 1, m))
    th = rng.uniform(-math.pi, math.pi, m)
    px, py = r * np.cos(th), r * np.sin(th)
    g1 = rng.uniform(0.2, 2.0, m)
    g2 = g1 + rng.uniform(0.0, 1.0, m)
    T1 = rng.uniform(0.0, 1.0, m) * math.pi / g1
    T2 = T1 + rng.uniform(0.0, 1.0, m) * (math.pi / g1 - T1)
    tol = -1e-9
    in_T1 = signed_margins(px, py, T1, g1) >= tol
    in_T2 = signed_margins(px, py, T2, g1) >= tol
    in_g2 = signed_margins(px, py, T1, g2) >= tol
    assert not np.any(in_T1 & ~in_T2)
    assert not np.any(in_T1 & ~in_g2)
    assert in_T1.any() and (~in_T1).any()

    grid = np.linspace(0.4, 2.0, 50)
    for _ in range(5):
        rad = rng.uniform(0.1, 0.95)
        ang = rng.uniform(-math.pi, math.pi)
        X = element_with_point(rad * complex(math.cos(ang), math.sin(ang)), rng.uniform(-3, 3))
        times = np.array([min_time_drift(X, g).t_star for g in grid])
        assert np.all(np.diff(times) <= 1e-8), np.diff(times).max()


@pytest.mark.parametrize("gamma0,s", [(0.7, 0.6), (1.2, 0.45)])
def test_criterion_7_discontinuity_reproduced(gamma0, s, capsys):
    ct = critical_trajectory(gamma0)
    P = drift_disk_traj(s * ct.T_c, ct.omega_c, gamma0)
    found = critical_gammas(P, gamma0 - 0.3, gamma0 + 0.3)
    g_bar = min(found, key=lambda g: abs(g - gamma0))
    assert abs(g_bar - gamma0) < 1e-8

    lo, hi, n = gamma0 - 0.2, gamma0 + 0.2, 41
    rc = main(
        ["sweep", "--point", repr(P.x), repr(P.y), "--gamma-range", repr(lo), repr(hi),
         "--n", str(n), "--with-gamma", repr(g_bar)]
    )
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    gammas = np.array([float(r["gamma"]) for r in rows])
    times = np.array([float(r["t_star"]) for r in rows])
    jumps = np.array([r["jump"] == "1" for r in rows])
    cell = (hi - lo) / (n - 1)
    flagged = np.flatnonzero(jumps & (np.abs(gammas - g_bar) <= cell + 1e-12))
    assert flagged.size >= 1
    k = int(flagged[0])
    left, right = times[k - 1], times[k]
    assert left >= critical_time(g_bar) - 1e-3
    X = SU2Element.normalized(P.complex, math.sqrt(1 - P.radius**2))
    assert abs(right - min_time_drift(X, gammas[k]).t_star) <= 1e-5
    # right-continuity: the value at g_bar is where the critical trajectory passes P
    k_bar = int(np.argmin(np.abs(gammas - g_bar)))
    assert abs(times[k_bar] - s * critical_time(g_bar)) <= 1e-5


def test_criterion_8_omega_bounds():
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(60):
        X = random_su2(rng)
        if abs(X.alpha) > 0.999:
            continue
        gamma = rng.uniform(0.2, 3.0)
        res = min_time_drift(X, gamma)
        lo, hi = omega_bounds(X.alpha, gamma)
        assert lo - 1e-9 <= res.omega_star <= hi + 1e-9
        checked += 1
    for gamma in (0.3, 1.0, 2.0):
        res = min_time_drift(swap_like(), gamma)
        assert abs(res.omega_star - 1.0) <= 1e-9
    assert checked >= 50


def test_criterion_9_end_to_end_sync():
    plan = synchronize(SyncProblem((swap_like(0.0), swap_like(0.9)), (1.0, 0.5)))
    assert abs(plan.T_common - math.pi) <= 1e-6
    assert np.allclose(plan.gamma_eff, (0.5, 0.5), atol=1e-6)
    rep = verify_plan(plan)
    assert rep.passed and rep.max_distance <= 1e-6

    rng = np.random.default_rng(9)
    targets = tuple(random_su2(rng) for _ in range(3))
    gammas = tuple(rng.uniform(0.4, 1.5, 3))
    problem = SyncProblem(targets, gammas)
    plan = synchronize(problem)
    rep = verify_plan(plan)
    assert all(d <= 1e-6 for d in rep.distances), rep.distances
    assert all(law.t_final == plan.T_common for law in plan.laws)
    assert plan.T_common >= max(plan.individual_times)
    step = common_scan_step(problem)
    for T in np.arange(max(plan.individual_times), plan.T_common - 1e-9, step):
        assert not all(feasible_at(X, g, T) for X, g in zip(targets, gammas))


def test_criterion_10_jacobian_diagnostic():
    rng = np.random.default_rng(10)
    h = 1e-5
    done = 0
    while done < 100:
        gamma = rng.uniform(0.2, 3.0)
        omega = rng.uniform(-5.0, 5.0)
        t = rng.uniform(0.05, 5.0)
        det = jacobian_det(t, omega, gamma)
        if abs(det) < 1e-3:
            continue

        def xy(tt, ww):
            p = drift_disk_traj(tt, ww, gamma)
            return np.array([p.x, p.y])

        d_t = (xy(t + h, omega) - xy(t - h, omega)) / (2 * h)
        d_w = (xy(t, omega + h) - xy(t, omega - h)) / (2 * h)
        fd = d_t[0] * d_w[1] - d_t[1] * d_w[0]
        assert abs(det - fd) <= 1e-6 * abs(fd), (t, omega, gamma, det, fd)
        done += 1
    for gamma in (0.3, 1.0, 4.0):
        assert abs(jacobian_det(0.0, rng.uniform(-3, 3), gamma)) < 1e-10
        assert abs(jacobian_det(rng.uniform(0, 5), 1 + gamma**2, gamma)) < 1e-10


def _read_curve(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return header, data


def test_criterion_curves_export_smoke(tmp_path, capsys):
    g = 1.0
    assert main(["curves", "frontline", "--gamma", "1", "--T", "1,1.1,2,3", "--out", str(tmp_path), "--svg"]) == 0
    for T in ("1", "1.1", "2", "3"):
        header, data = _read_curve(tmp_path / f"frontline_T{T}.csv")
        assert header == ["omega", "t", "x", "y"]
        ends = data[[0, -1]]
        assert np.all(np.abs(np.hypot(ends[:, 2], ends[:, 3]) - 1.0) <= 1e-9)
        assert np.allclose(ends[:, 2], -math.cos(math.sqrt(math.pi**2 - (g * float(T)) ** 2)), atol=1e-9)
    assert (tmp_path / "frontline.svg").read_text().startswith("<svg")

    g = 1 / math.sqrt(2)
    assert main(["curves", "critical", "--gamma", repr(g), "--out", str(tmp_path)]) == 0
    assert "omega_c         1.500000000" in capsys.readouterr().out
    header, data = _read_curve(tmp_path / "critical.csv")
    assert np.allclose(data[:, 0], 1.5) and np.allclose(data[0, 2:], (1.0, 0.0))

    assert main(["curves", "separatrix", "--gamma", repr(g), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "center_x        0.333333333" in out and "radius          0.666666667" in out
    header, data = _read_curve(tmp_path / "separatrix.csv")
    assert np.all(np.abs(np.hypot(data[:, 2] - 1 / 3, data[:, 3]) - 2 / 3) <= 2e-9)
