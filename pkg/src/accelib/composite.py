"""Proximal-gradient acceleration with backtracked smoothness estimates.

Two drivers share one engine: `fista` takes the proximal step from y_k and
needs f smooth on all of R^d; `prox_agm` proxes the z-sequence and keeps every
iterate inside dom h. Backtracking modes:

  - "monotone":  L_{k+1} starts at L_k and never decreases (A_k accounting);
  - "reset":     L_{k+1} starts back at L_0 each iteration (B_k accounting);
  - "decrease":  L_{k+1} starts at max(beta * L_k, L_0), default beta = 1/alpha.

An accepted step always satisfies the descent condition
f(x_{k+1}) <= f(y_k) + <grad f(y_k); x_{k+1}-y_k> + (L_{k+1}/2)||x_{k+1}-y_k||^2.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument, RunawayLError
from .oracles import CompositeProblem
from .tolerances import tol_for
from .trace import CountingOracle, Counters, Recorder, check_finite

MAX_BACKTRACKS = 200

MODES = ("monotone", "reset", "decrease")


def ell_constant(L, L0, alpha):
    """The effective smoothness constant in the convergence corollary."""
    return max(alpha * L, L0)


def fista_bound(L, L0, alpha, R, N, mu=0.0):
    ell = ell_constant(L, L0, alpha)
    if N == 0:
        return ell * R * R
    if mu == 0:
        return 2.0 / N**2 * ell * R * R
    return min(2.0 / N**2, (1.0 - np.sqrt(mu / ell)) ** N) * ell * R * R


def _next_B(B, L1, mu):
    return (2.0 * L1 * B + 1.0 + np.sqrt(4.0 * L1 * B + 4.0 * mu * L1 * B * B + 1.0)) / (
        2.0 * (L1 - mu))


def _composite_factory(method, problem, co_f, counters, x0, mu, L_init, alpha,
                       mode, L0=None, beta=None):
    """Shared stepper for fista / prox_agm. State keys: x, z, L, and A (monotone
    mode) or B (non-monotone modes); each step also reports y and wasted count."""
    if mode not in MODES:
        raise InvalidArgument(f"unknown backtracking mode {mode!r}")
    if alpha <= 1:
        raise InvalidArgument("alpha must be > 1")
    if L0 is None:
        L0 = L_init
    if L0 <= mu:
        raise InvalidArgument("L0 must exceed mu")
    if beta is None:
        beta = 1.0 / alpha
    if not (0 < beta < 1):
        raise InvalidArgument("beta must be in (0,1)")
    co_h = CountingOracle(problem.nonsmooth, counters)
    f_val = problem.smooth.value  # objective evaluations are not oracle calls

    monotone = mode == "monotone"
    state = {"k": 0, "x": np.array(x0, dtype=float), "z": np.array(x0, dtype=float),
             "L": float(L0), "wasted": 0}
    if monotone:
        state["A"] = 0.0
    else:
        state["B"] = 0.0

    # next_A with the iteration-dependent q, written out to keep one engine
    def next_A(A, q):
        return (2.0 * A + 1.0 + np.sqrt(4.0 * A + 4.0 * q * A * A + 1.0)) / (2.0 * (1.0 - q))

    def step(s):
        x, z = s["x"], s["z"]
        if monotone:
            L1 = s["L"]
        elif mode == "reset":
            L1 = L0
        else:
            L1 = max(beta * s["L"], L0)
        wasted = s["wasted"]
        for attempt in range(MAX_BACKTRACKS + 1):
            q1 = mu / L1
            if monotone:
                A = s["A"]
                A1 = next_A(A, q1)
                tau = (A1 - A) * (1.0 + q1 * A) / (A1 + 2.0 * q1 * A * A1 - q1 * A * A)
                delta = (A1 - A) / (1.0 + q1 * A1)
            else:
                B = s["B"]
                B1 = _next_B(B, L1, mu)
                tau = (B1 - B) * (1.0 + mu * B) / (B1 + 2.0 * mu * B * B1 - mu * B * B)
                delta = L1 * (B1 - B) / (1.0 + mu * B1)
            y = x + tau * (z - x)
            g = co_f.gradient(y)
            if method == "fista":
                x1 = co_h.prox(y - g / L1, 1.0 / L1)
                z1 = (1.0 - q1 * delta) * z + q1 * delta * y + delta * (x1 - y)
            else:  # prox_agm: prox on the z-sequence
                z1 = co_h.prox((1.0 - q1 * delta) * z + q1 * delta * y - (delta / L1) * g,
                               delta / L1)
                ratio = A / A1 if monotone else B / B1
                x1 = ratio * x + (1.0 - ratio) * z1
            lhs = f_val(x1)
            rhs = f_val(y) + np.dot(g, x1 - y) + 0.5 * L1 * np.dot(x1 - y, x1 - y)
            if lhs <= rhs + tol_for(abs(rhs)):
                break
            wasted += 1
            L1 *= alpha
        else:
            raise RunawayLError("backtracking exceeded 200 increases; "
                                "is f really smooth, or is alpha too small?")
        out = {"k": s["k"] + 1, "x": x1, "z": z1, "L": L1, "y": y, "wasted": wasted}
        if monotone:
            out["A"] = A1
        else:
            out["B"] = B1
        return out

    return state, step


def _run(method, problem, x0, N, mu, L0, alpha, mode, beta):
    if not isinstance(problem, CompositeProblem):
        raise InvalidArgument(f"{method} expects a CompositeProblem")
    counters = Counters()
    co_f = CountingOracle(problem.smooth, counters)
    state, step = _composite_factory(method, problem, co_f, counters, x0, mu, L0,
                                     alpha, mode, L0=L0, beta=beta)
    rec = Recorder(method, problem.smooth, counters,
                   meta={"N": N, "mu": mu, "L0": L0, "alpha": alpha, "mode": mode},
                   objective=problem.objective,
                   x_star=problem.x_star, f_star=problem.F_star)

    def snapshot(s):
        snap = {"z": s["z"].copy(), "L": s["L"], "wasted": s["wasted"]}
        if "A" in s:
            snap["A"] = s["A"]
        else:
            snap["B"] = s["B"]
        return snap

    rec.record(0, state["x"], grad=problem.smooth.gradient(state["x"]),
               state=snapshot(state))
    for k in range(N):
        state = step(state)
        check_finite(state["x"], rec.trace)
        rec.record(k + 1, state["x"], grad=problem.smooth.gradient(state["x"]),
                   state=snapshot(state))
    rec.trace.meta["wasted"] = state["wasted"]
    rec.trace.meta["L_final"] = state["L"]
    return rec.trace


def fista(problem, x0, N, mu=0.0, L0=None, alpha=2.0, mode="monotone", beta=None):
    """Accelerated proximal gradient taking the prox step from y_k."""
    if L0 is None:
        L0 = problem.smooth.params.L
    return _run("fista", problem, x0, N, mu, L0, alpha, mode, beta)


def prox_agm(problem, x0, N, mu=0.0, L0=None, alpha=2.0, mode="monotone", beta=None):
    """Accelerated proximal gradient proxing the z-sequence; keeps all
    iterates in dom h, so f need only be smooth there."""
    if L0 is None:
        L0 = problem.smooth.params.L
    return _run("prox_agm", problem, x0, N, mu, L0, alpha, mode, beta)
