"""Restart schemes: fixed epoch length for strongly convex problems,
geometric schedules under a Holderian error bound, and the log-grid search
that adapts to unknown error-bound parameters."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .momentum import fgm
from .poly_methods import gradient_descent
from .trace import Counters, Recorder

SCHED_C = 4.0 * np.exp(2.0 / np.e)  # the constant c in the schedule theory


@dataclass(frozen=True)
class HebParams:
    """f - f* >= (mu_heb / r) dist(x, X*)^r locally; r=2 is strong convexity."""

    r: float
    mu_heb: float
    L: float

    def __post_init__(self):
        if self.r < 2 or self.mu_heb <= 0 or self.L <= 0:
            raise InvalidArgument("need r >= 2, mu_heb > 0, L > 0")

    @property
    def tau(self):
        return 1.0 - 2.0 / self.r

    @property
    def kappa(self):
        return self.L / self.mu_heb ** (2.0 / self.r)


def _run_inner(inner, oracle, x0, k, gamma=None, L=None):
    if inner == "gd":
        return gradient_descent(oracle, gamma, x0, k)
    if inner == "fgm":
        return fgm(oracle, x0, k, form="I", mu=0.0, L=L)
    raise InvalidArgument(f"unknown inner method {inner!r}")


def fixed_restart(oracle, inner, k, x0, epochs, gamma=None, L=None):
    """Restart `inner` from its own output every k iterations."""
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    counters = Counters()
    rec = Recorder(f"restart({inner})", oracle, counters,
                   meta={"k": k, "epochs": epochs, "inner": inner})
    x = np.array(x0, dtype=float)
    rec.record(0, x, state={"epoch": 0})
    it = 0
    for e in range(epochs):
        sub = _run_inner(inner, oracle, x, k, gamma=gamma, L=L)
        counters.grad_calls += sub.records[-1].grad_calls
        for r in sub.records[1:]:
            it += 1
            rec.record(it, r.x, state={"epoch": e + 1})
        x = sub.records[-1].x
    return rec.trace


def schedule_lengths(heb, f0_gap, budget):
    """k_i = ceil(C* e^(tau i)) with C* = e^(1-tau) sqrt(c kappa) f0_gap^(-tau/2),
    truncated once the cumulative length reaches the budget."""
    tau = heb.tau
    C_star = np.exp(1.0 - tau) * np.sqrt(SCHED_C * heb.kappa) * f0_gap ** (-tau / 2.0)
    ks = []
    total = 0
    i = 0
    while total < budget:
        k = int(np.ceil(C_star * np.exp(tau * i)))
        ks.append(k)
        total += k
        i += 1
    return ks, C_star


def scheduled_bound(heb, f0_gap, N):
    """Worst-case gap after N total inner iterations under the schedule."""
    tau = heb.tau
    ck = SCHED_C * heb.kappa
    if tau == 0:
        return np.exp(-2.0 * np.exp(-1.0) * ck ** (-0.5) * N) * f0_gap
    denom = (tau * np.exp(-1.0) * f0_gap ** (tau / 2.0) * ck ** (-0.5) * N + 1.0)
    return f0_gap / denom ** (2.0 / tau)


def scheduled_restart(oracle, heb, x0, f0_gap, budget):
    """Geometric restart schedule driven by known error-bound parameters."""
    if f0_gap is None or f0_gap <= 0:
        raise InvalidArgument("scheduled_restart needs f0_gap > 0")
    ks, C_star = schedule_lengths(heb, f0_gap, budget)
    counters = Counters()
    rec = Recorder("scheduled_restart", oracle, counters,
                   meta={"budget": budget, "r": heb.r, "tau": heb.tau,
                         "C_star": C_star, "ks": ks})
    x = np.array(x0, dtype=float)
    rec.record(0, x, state={"epoch": 0})
    it = 0
    for e, k in enumerate(ks):
        k = min(k, budget - it)
        if k <= 0:
            break
        sub = fgm(oracle, x, k, form="I", mu=0.0, L=heb.L)
        counters.grad_calls += sub.records[-1].grad_calls
        for r in sub.records[1:]:
            it += 1
            rec.record(it, r.x, state={"epoch": e + 1})
        x = sub.records[-1].x
    return rec.trace


def grid_cells(N):
    ps = range(1, int(np.floor(np.log2(N))) + 1)
    qs = range(0, int(np.ceil(np.log2(N))) + 1)
    return [(p, q) for p in ps for q in qs]


def grid_restart(oracle, L, x0, budget):
    """Run every (p, q) schedule — constant length 2^p when q = 0, geometric
    with rate 2^(-q) otherwise — for at most `budget` inner iterations each,
    and return the schedule reaching the lowest objective."""
    if budget < 4:
        raise InvalidArgument("budget must be >= 4")
    x0 = np.array(x0, dtype=float)
    table = []
    best = None
    for p, q in grid_cells(budget):
        C_p = 2.0**p
        tau_q = 0.0 if q == 0 else 2.0 ** (-q)
        x = x0.copy()
        it = 0
        i = 0
        while it < budget:
            k = int(np.ceil(C_p * np.exp(tau_q * i)))
            k = min(k, budget - it)
            sub = fgm(oracle, x, k, form="I", mu=0.0, L=L)
            x = sub.records[-1].x
            it += k
            i += 1
        f_final = oracle.value(x)
        table.append({"p": p, "q": q, "f_final": f_final, "iterations": it})
        if best is None or f_final < best[0]:
            best = (f_final, p, q, x)
    counters = Counters()
    rec = Recorder("grid_restart", oracle, counters,
                   meta={"budget": budget, "best_p": best[1], "best_q": best[2],
                         "table_json": json.dumps(table)})
    rec.record(0, x0, state={})
    rec.record(1, best[3], state={"p": best[1], "q": best[2]})
    return rec.trace
