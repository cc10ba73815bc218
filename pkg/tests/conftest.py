import time

import numpy as np
import pytest
from scipy.optimize import linprog

from rangesmf.zonotope import make_zonotope


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_zonotope(rng, n, n_g, n_c=0, one_sided=False):
    """Random nonempty set; constraints pass through a random interior xi."""
    G = rng.normal(size=(n, n_g))
    c = rng.normal(size=n)
    if one_sided:
        lo = np.zeros(n_g)
        hi = rng.uniform(0.2, 2.0, n_g)
    else:
        half = rng.uniform(0.2, 1.5, n_g)
        shift = rng.uniform(-0.5, 0.5, n_g)
        lo, hi = shift - half, shift + half
    A = rng.normal(size=(n_c, n_g))
    xi0 = lo + rng.uniform(0.2, 0.8, n_g) * (hi - lo)
    return make_zonotope(G, c, A, A @ xi0, (lo, hi))


def highs_feasible_xi(Z, extra_eq=None, extra_rhs=None):
    """Independent LP check with scipy's HiGHS: is {xi : A xi = b, box, extra} nonempty?"""
    rows = [Z.A] + ([extra_eq] if extra_eq is not None else [])
    rhs = [Z.b] + ([extra_rhs] if extra_rhs is not None else [])
    Aeq = np.vstack(rows)
    beq = np.concatenate(rhs)
    res = linprog(np.zeros(Z.n_gen), A_eq=Aeq if Aeq.size else None, b_eq=beq if Aeq.size else None,
                  bounds=list(zip(Z.lo, Z.hi)), method="highs")
    return res.status == 0


def highs_contains(Z, x):
    return highs_feasible_xi(Z, Z.G, np.asarray(x) - Z.c)


def sample_members(Z, count, rng, n_vertices=24):
    """Members of Z: direct for unconstrained sets, else convex mixes of HiGHS vertices."""
    if Z.n_con == 0:
        xi = rng.uniform(Z.lo, Z.hi, size=(count, Z.n_gen))
        return xi @ Z.G.T + Z.c
    verts = []
    for _ in range(n_vertices):
        res = linprog(rng.normal(size=Z.n_gen), A_eq=Z.A, b_eq=Z.b, bounds=list(zip(Z.lo, Z.hi)), method="highs")
        assert res.status == 0
        verts.append(res.x)
    V = np.array(verts)
    w = rng.dirichlet(np.ones(len(V)), size=count)
    xi = w @ V
    return xi @ Z.G.T + Z.c


def sample_annulus_sector(rng, anchor, R_lo, R_hi, th_lo, th_hi, count):
    r = np.sqrt(rng.uniform(R_lo ** 2, R_hi ** 2, count))
    th = rng.uniform(th_lo, th_hi, count)
    pts = np.column_stack([r * np.cos(th), r * np.sin(th)]) + anchor
    # exact boundary samples too
    m = count // 10
    pts[:m, 0] = anchor[0] + R_lo * np.cos(th[:m])
    pts[:m, 1] = anchor[1] + R_lo * np.sin(th[:m])
    pts[m:2 * m, 0] = anchor[0] + R_hi * np.cos(th[m:2 * m])
    pts[m:2 * m, 1] = anchor[1] + R_hi * np.sin(th[m:2 * m])
    return pts


@pytest.fixture(scope="session")
def reference_campaign():
    """The shipped 50-run preset, run once per session: (cfg, summary, logs, seconds)."""
    from rangesmf.config import load_config
    from rangesmf.sim import run_monte_carlo

    cfg = load_config("paper_sec4")
    t0 = time.perf_counter()
    summary, logs = run_monte_carlo(cfg, keep_logs=True)
    return cfg, summary, logs, time.perf_counter() - t0


# criterion number -> PASS/FAIL line, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
