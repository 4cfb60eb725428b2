import math

import numpy as np
import pytest

from accelib import oracles, prox_outer as po
from accelib.errors import (
    ContractViolation,
    InconsistentCertificate,
    InnerSolveError,
    InvalidArgument,
)


def test_ppa_state_A_frozen(quad_2):
    # mu=1, lam=1: A' = A(1+lam*mu) + lam doubles-plus-one each step; A_5 = 31
    tr = po.ppa(quad_2, [1.0] * 5, np.array([2.0, 2.0]))
    assert tr.final.state["A"] == pytest.approx(31.0, abs=1e-12)


def test_ppa_bound_holds(quad_2):
    x0 = np.array([3.0, -2.0])
    lambdas = [0.5] * 12
    tr = po.ppa(quad_2, lambdas, x0)
    R = np.linalg.norm(x0 - quad_2.x_star)
    assert tr.final.f_gap <= po.ppa_bound(R, lambdas, mu=1.0) + 1e-12


def test_check_relative_error_accepts_and_rejects(quad_2):
    y = np.array([1.0, 1.0])
    solve = po.exact_prox_solver(quad_2)
    from accelib.trace import Counters
    x_next, g, e = solve(y, 1.0, Counters())
    cert = po.InexactProxCertificate(e=e, x_next=x_next, y=y, lam=1.0, g=g, delta=0.0)
    po.check_relative_error(cert)  # exact: passes at delta = 0
    bad = po.InexactProxCertificate(
        e=e + 1.0, x_next=x_next, y=y, lam=1.0, g=g, delta=0.0
    )
    with pytest.raises(InconsistentCertificate):
        po.check_relative_error(bad)


def test_ahpe_bound_frozen():
    # constant lam: 2 R^2 / (N^2 lam)
    assert po.ahpe_bound(2.0, [0.5] * 10) == pytest.approx(
        2 * 4.0 / (10 * math.sqrt(0.5)) ** 2
    )


def test_accel_inexact_ppa_exact_inner(quad_2):
    x0 = np.array([3.0, 1.0])
    solver = po.exact_prox_solver(quad_2)
    lambdas = [0.5] * 15
    tr = po.accel_inexact_ppa(solver, lambdas, 0.0, x0, oracle=quad_2)
    R = np.linalg.norm(x0 - quad_2.x_star)
    assert tr.final.f_gap <= po.ahpe_bound(R, lambdas) + 1e-12


def test_accel_inexact_ppa_rejects_bad_delta(quad_2):
    solver = po.exact_prox_solver(quad_2)
    with pytest.raises(InvalidArgument):
        po.accel_inexact_ppa(solver, [1.0] * 3, 1.5, np.ones(2), oracle=quad_2)


def test_accel_inexact_ppa_flags_broken_certificate(quad_2):
    exact = po.exact_prox_solver(quad_2)

    def sloppy(y, lam, counters):
        x_next, g, _ = exact(y, lam, counters)
        err = np.array([0.4, 0.0]) * np.linalg.norm(x_next - y)
        return x_next + err, g, err

    with pytest.raises(InnerSolveError):
        po.accel_inexact_ppa(sloppy, [1.0] * 5, 0.1, np.array([3.0, 1.0]),
                             oracle=quad_2)


def test_inner_constants_frozen():
    # gd inner: C = 1, tau = 1/(1 + lam L)
    C, tau = po.inner_constants("gd", 1.0, 1.0)
    assert C == 1.0 and tau == pytest.approx(0.5)
    # burden for lam L = 1 with gd: log(1*(1+2))/log(1/(1-1/2)) + 1
    want = math.log(3.0) / math.log(2.0) + 1
    assert po.catalyst_burden("gd", 1.0, 1.0) == pytest.approx(want, rel=1e-12)


def test_lambda_tunings_frozen():
    assert po.lambda_gd_tuning(1.0, 10.0) == pytest.approx(1.0 / 8.0)
    assert po.lambda_optimal_tuning(1.0, 10.0) == pytest.approx(2.0 / 7.0)


@pytest.mark.parametrize("inner", ["gd", "gd_linesearch", "const_momentum"])
def test_catalyst_accounting(quad_6, inner):
    x0 = np.full(6, 2.0)
    lam = 1.0
    tr = po.catalyst(quad_6, inner, lam, budget_total=400, x0=x0)
    B = tr.meta["burden"]
    counts = tr.meta["inner_counts"]
    assert all(c <= math.ceil(B) for c in counts)
    assert tr.meta["n_total"] < (tr.meta["n_outer"] + 1) * B
    R = np.linalg.norm(x0 - quad_6.x_star)
    assert tr.final.f_gap <= 2 * R**2 / (lam * tr.meta["n_outer"] ** 2) + 1e-12


def test_catalyst_counts_useless_tail(quad_6):
    x0 = np.full(6, 2.0)
    tr = po.catalyst(quad_6, "gd", 1.0, budget_total=11, x0=x0)
    # budget too small for clean outer steps: either all used or a tail is wasted
    assert tr.meta["n_total"] <= 11
    assert tr.meta["n_useless"] >= 0
    assert tr.meta["n_total"] - tr.meta["n_useless"] == sum(tr.meta["inner_counts"])


def test_catalyst_unknown_inner(quad_6):
    with pytest.raises(InvalidArgument):
        po.catalyst(quad_6, "bogus", 1.0, budget_total=50, x0=np.zeros(6))
