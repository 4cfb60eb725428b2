"""Accelerated first-order methods on smooth (possibly strongly) convex
problems: the fast gradient method family in its three algebraic forms, the
optimized gradient method, constant-momentum variants, ITEM, TMM, a monotone
wrapper, and the Bregman accelerated scheme."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument
from .oracles import CompositeProblem
from .trace import CountingOracle, Counters, Recorder, check_finite


# ---------------------------------------------------------------------------
# coefficient sequences

def theta_schedule(N):
    """theta_{0,N}=1; 4-rule up to k=N-1; 8-rule for the final theta_{N,N}."""
    if N < 1:
        raise InvalidArgument("N must be >= 1")
    thetas = [1.0]
    for k in range(1, N + 1):
        prev = thetas[-1]
        if k < N:
            thetas.append((1.0 + np.sqrt(4.0 * prev**2 + 1.0)) / 2.0)
        else:
            thetas.append((1.0 + np.sqrt(8.0 * prev**2 + 1.0)) / 2.0)
    return thetas


def next_A(A, q):
    """Larger root of (A - A')^2 - A' - q A'^2 = 0; reduces to A + (1+sqrt(4A+1))/2
    at q=0."""
    return (2.0 * A + 1.0 + np.sqrt(4.0 * A + 4.0 * q * A * A + 1.0)) / (2.0 * (1.0 - q))


def _tau_delta(A, A1, q):
    tau = (A1 - A) * (1.0 + q * A) / (A1 + 2.0 * q * A * A1 - q * A * A)
    delta = (A1 - A) / (1.0 + q * A1)
    return tau, delta


def ogm_bound(L, R, N):
    th = theta_schedule(N)
    return L * R * R / (2.0 * th[N] ** 2)


def fgm_bound(L, R, N, mu=0.0):
    base = L * R * R
    if N == 0:
        return base / 2.0
    if mu == 0:
        return 2.0 * base / N**2
    q = mu / L
    return min(2.0 / N**2, (1.0 - np.sqrt(q)) ** N) * base


# ---------------------------------------------------------------------------
# optimized gradient method

def ogm(oracle, x0, N, form="I", L=None):
    """Optimized gradient method with the fixed-horizon theta schedule.

    Form I carries (x, z); form II is the two-sequence rewriting. Both output
    y_N, recorded as the final trace entry.
    """
    if form not in ("I", "II"):
        raise InvalidArgument(f"unknown OGM form {form!r}")
    if L is None:
        L = oracle.params.L
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("ogm", oracle, counters, meta={"N": N, "L": L, "form": form})
    x = np.array(x0, dtype=float)
    if N == 0:
        rec.record(0, x, state={"z": x.copy(), "theta_prev": 0.0})
        return rec.trace
    thetas = theta_schedule(N)

    if form == "I":
        z = x.copy()
        y_prev = None
        g_prev = None
        rec.record(0, x, state={"z": z.copy(), "theta_prev": 0.0})
        for k in range(N):
            th = thetas[k]
            y = (1.0 - 1.0 / th) * x + (1.0 / th) * z
            g = co.gradient(y)
            x = y - g / L
            z = z - (2.0 * th / L) * g
            check_finite(x, rec.trace)
            y_prev, g_prev = y, g
            state = {"z": z.copy(), "theta_prev": th, "y_prev": y.copy(), "g_prev": g.copy()}
            if k + 1 == N:
                th_f = thetas[N]
                y_out = (1.0 - 1.0 / th_f) * x + (1.0 / th_f) * z
                state["theta_final"] = th_f
                state["y_final"] = y_out.copy()
                state["g_final"] = oracle.gradient(y_out)  # reporting only
                rec.record(N, y_out, state=state)
            else:
                rec.record(k + 1, x, state=state)
        return rec.trace

    # form II
    y = x.copy()
    rec.record(0, x, state={"y": y.copy()})
    for k in range(N):
        g = co.gradient(y)
        x_new = y - g / L
        th, th1 = thetas[k], thetas[k + 1]
        y = x_new + ((th - 1.0) / th1) * (x_new - x) + (th / th1) * (x_new - y)
        check_finite(y, rec.trace)
        x = x_new
        if k + 1 == N:
            rec.record(N, y, state={"y": y.copy()})
        else:
            rec.record(k + 1, x, state={"y": y.copy()})
    return rec.trace


# ---------------------------------------------------------------------------
# fast gradient methods (forms I/II/III, mu >= 0 in one A-parameterization)

def _fgm_factory(co, x0, mu, L, form_three=False):
    q = mu / L
    state = {"k": 0, "A": 0.0, "x": np.array(x0, dtype=float),
             "z": np.array(x0, dtype=float)}

    def step(s):
        A = s["A"]
        A1 = next_A(A, q)
        tau, delta = _tau_delta(A, A1, q)
        y = s["x"] + tau * (s["z"] - s["x"])
        g = co.gradient(y)
        z1 = (1.0 - q * delta) * s["z"] + q * delta * y - (delta / L) * g
        if form_three:
            x1 = (A / A1) * s["x"] + (1.0 - A / A1) * z1
        else:
            x1 = y - g / L
        return {"k": s["k"] + 1, "A": A1, "x": x1, "z": z1, "y": y}

    return state, step


def fgm(oracle, x0, N, form="I", mu=None, L=None):
    """Fast gradient method; handles mu = 0 and mu > 0 through one
    A-sequence, with the three equivalent algebraic forms."""
    if form not in ("I", "II", "III"):
        raise InvalidArgument(f"unknown FGM form {form!r}")
    if mu is None:
        mu = oracle.params.mu
    if L is None:
        L = oracle.params.L
    q = mu / L
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("fgm", oracle, counters,
                   meta={"N": N, "mu": mu, "L": L, "form": form})
    x = np.array(x0, dtype=float)

    if form in ("I", "III"):
        state, step = _fgm_factory(co, x, mu, L, form_three=(form == "III"))
        rec.record(0, x, state={"A": 0.0, "z": state["z"].copy()})
        for k in range(N):
            state = step(state)
            check_finite(state["x"], rec.trace)
            rec.record(k + 1, state["x"],
                       state={"A": state["A"], "z": state["z"].copy()})
        return rec.trace

    # form II: momentum coefficient beta_k = tau_{k+1} (delta_k - 1), derived
    # from the same A-sequence.
    A = 0.0
    A1 = next_A(A, q)
    y = x.copy()
    rec.record(0, x, state={"A": 0.0})
    for k in range(N):
        g = co.gradient(y)
        x_new = y - g / L
        check_finite(x_new, rec.trace)
        A2 = next_A(A1, q)
        _, delta = _tau_delta(A, A1, q)
        tau_next, _ = _tau_delta(A1, A2, q)
        beta = tau_next * (delta - 1.0)
        y = x_new + beta * (x_new - x)
        x = x_new
        A, A1 = A1, A2
        rec.record(k + 1, x, state={"A": A})
    return rec.trace


# ---------------------------------------------------------------------------
# constant momentum (mu > 0)

def _constant_momentum_factory(co, x0, mu, L):
    q = mu / L
    sq = np.sqrt(q)
    state = {"k": 0, "x": np.array(x0, dtype=float), "z": np.array(x0, dtype=float)}

    def step(s):
        y = s["x"] + (sq / (1.0 + sq)) * (s["z"] - s["x"])
        g = co.gradient(y)
        x1 = y - g / L
        z1 = (1.0 - sq) * s["z"] + sq * (y - g / mu)
        return {"k": s["k"] + 1, "x": x1, "z": z1, "y": y}

    return state, step


def constant_momentum(oracle, x0, N, form="I", mu=None, L=None):
    """Accelerated method with constant coefficients; requires mu > 0."""
    if form not in ("I", "II"):
        raise InvalidArgument(f"unknown form {form!r}")
    if mu is None:
        mu = oracle.params.mu
    if L is None:
        L = oracle.params.L
    if mu <= 0:
        raise InvalidArgument("constant_momentum requires mu > 0")
    q = mu / L
    sq = np.sqrt(q)
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("constant_momentum", oracle, counters,
                   meta={"N": N, "mu": mu, "L": L, "form": form})
    x = np.array(x0, dtype=float)

    if form == "I":
        state, step = _constant_momentum_factory(co, x, mu, L)
        rec.record(0, x, state={"z": state["z"].copy()})
        for k in range(N):
            state = step(state)
            check_finite(state["x"], rec.trace)
            rec.record(k + 1, state["x"], state={"z": state["z"].copy()})
        return rec.trace

    beta = (1.0 - sq) / (1.0 + sq)
    y = x.copy()
    rec.record(0, x, state={})
    for k in range(N):
        g = co.gradient(y)
        x_new = y - g / L
        check_finite(x_new, rec.trace)
        y = x_new + beta * (x_new - x)
        x = x_new
        rec.record(k + 1, x, state={})
    return rec.trace


# ---------------------------------------------------------------------------
# information-theoretic exact method (ITEM)

def item_next_A(A, q):
    return ((1.0 + q) * A + 2.0 * (1.0 + np.sqrt((1.0 + A) * (1.0 + q * A)))) / (1.0 - q) ** 2


def item(oracle, x0, N, mu=None, L=None):
    """ITEM; record k >= 1 holds y_{k-1} (the point where the gradient was
    taken) with z_k in the state."""
    if mu is None:
        mu = oracle.params.mu
    if L is None:
        L = oracle.params.L
    if not (0 <= mu < L):
        raise InvalidArgument("item requires 0 <= mu < L")
    q = mu / L
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("item", oracle, counters, meta={"N": N, "mu": mu, "L": L})
    x = np.array(x0, dtype=float)
    z = x.copy()
    A = 0.0
    rec.record(0, x, state={"A": 0.0, "z": z.copy()})
    for k in range(N):
        A1 = item_next_A(A, q)
        delta = 0.5 * ((1.0 - q) ** 2 * A1 - (1.0 + q) * A) / (1.0 + q + q * A)
        if A == 0.0:
            y = z.copy()  # tau_0 = 1, so y_0 = z_0; avoids 0/0 at A_0 = 0
        else:
            tau = 1.0 - A / ((1.0 - q) * A1)
            y = x + tau * (z - x)
        g = co.gradient(y)
        x = y - g / L
        z = (1.0 - q * delta) * z + q * delta * y - (delta / L) * g
        check_finite(x, rec.trace)
        A = A1
        rec.record(k + 1, y, grad=g,
                   state={"A": A, "z": z.copy(), "y": y.copy(), "g": g.copy()})
    return rec.trace


# ---------------------------------------------------------------------------
# triple momentum method (TMM)

def tmm(oracle, x0, N, mu=None, L=None):
    """Triple momentum; requires mu > 0. Record k >= 1 holds y_{k-1} with
    z_k in the state."""
    if mu is None:
        mu = oracle.params.mu
    if L is None:
        L = oracle.params.L
    if mu <= 0:
        raise InvalidArgument("tmm requires mu > 0")
    q = mu / L
    sq = np.sqrt(q)
    beta = (1.0 - sq) / (1.0 + sq)
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("tmm", oracle, counters, meta={"N": N, "mu": mu, "L": L})
    x0 = np.array(x0, dtype=float)
    y_prev = x0.copy()
    z = x0.copy()
    rec.record(0, x0, state={"z": z.copy(), "y": y_prev.copy(),
                             "g": oracle.gradient(x0)})
    for k in range(N):
        g_prev = co.gradient(y_prev)
        y = beta * (y_prev - g_prev / L) + (1.0 - beta) * z
        g = co.gradient(y)
        z = sq * (y - g / mu) + (1.0 - sq) * z
        check_finite(y, rec.trace)
        y_prev = y
        rec.record(k + 1, y, grad=g,
                   state={"z": z.copy(), "y": y.copy(), "g": g.copy()})
    return rec.trace


# ---------------------------------------------------------------------------
# Bregman accelerated gradient

def _bregman_factory(problem, co_f, x0, L, dgf):
    state = {"k": 0, "A": 0.0, "x": np.array(x0, dtype=float),
             "z": np.array(x0, dtype=float)}

    def step(s):
        A = s["A"]
        a = (1.0 + np.sqrt(4.0 * A + 1.0)) / 2.0
        A1 = A + a
        y = (A / A1) * s["x"] + (1.0 - A / A1) * s["z"]
        g = co_f.gradient(y)
        if dgf == "euclidean":
            z1 = problem.nonsmooth.prox(s["z"] - (a / L) * g, a / L)
        else:  # entropy on the simplex
            with np.errstate(divide="ignore"):  # log(0) = -inf is the limit we want
                logits = np.log(s["z"]) - (a / L) * g
            logits -= np.max(logits)
            w = np.exp(logits)
            z1 = w / np.sum(w)
        x1 = (A / A1) * s["x"] + (1.0 - A / A1) * z1
        return {"k": s["k"] + 1, "A": A1, "x": x1, "z": z1, "y": y}

    return state, step


def bregman_agm(problem, x0, N, dgf="euclidean", L=None):
    """Accelerated gradient with a Bregman divergence.

    dgf="euclidean" recovers the fast gradient method in its averaged form
    through the prox of h; dgf="entropy" requires h to be the unit-simplex
    indicator and a strictly positive feasible x0 (multiplicative closed-form
    z-update, every z_k strictly positive on the simplex).
    """
    if dgf not in ("euclidean", "entropy"):
        raise InvalidArgument(f"unknown dgf {dgf!r}")
    if not isinstance(problem, CompositeProblem):
        raise InvalidArgument("bregman_agm expects a CompositeProblem")
    x0 = np.array(x0, dtype=float)
    if dgf == "entropy":
        if problem.nonsmooth.name != "simplex":
            raise InvalidArgument("entropy mode requires the simplex indicator")
        if np.min(x0) <= 0 or abs(np.sum(x0) - 1.0) > 1e-9:
            raise InvalidArgument("entropy mode needs strictly positive x0 on the simplex")
    if L is None:
        L = problem.smooth.params.L
    counters = Counters()
    co_f = CountingOracle(problem.smooth, counters)
    co_h = CountingOracle(problem.nonsmooth, counters)
    rec = Recorder("bregman_agm", problem.smooth, counters,
                   meta={"N": N, "L": L, "dgf": dgf},
                   objective=problem.objective,
                   x_star=problem.x_star, f_star=problem.F_star)
    prob = CompositeProblem(problem.smooth, co_h if dgf == "euclidean" else problem.nonsmooth,
                            x_star=problem.x_star, F_star=problem.F_star)
    state, step = _bregman_factory(prob, co_f, x0, L, dgf)
    rec.record(0, x0, grad=problem.smooth.gradient(x0),
               state={"A": 0.0, "z": state["z"].copy()})
    for k in range(N):
        state = step(state)
        check_finite(state["x"], rec.trace)
        rec.record(k + 1, state["x"], grad=problem.smooth.gradient(state["x"]),
                   state={"A": state["A"], "z": state["z"].copy()})
    return rec.trace


def bregman_divergence(dgf, a, b):
    """D_w(a; b) for the supported distance-generating functions."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if dgf == "euclidean":
        return 0.5 * float(np.dot(a - b, a - b))
    if dgf == "entropy":
        mask = a > 0
        return float(np.sum(a[mask] * np.log(a[mask] / b[mask])) + np.sum(b - a))
    raise InvalidArgument(f"unknown dgf {dgf!r}")


# ---------------------------------------------------------------------------
# monotone wrapper

_WRAPPABLE = ("fgm", "constant_momentum", "fista", "prox_agm", "bregman_agm")


def monotone_wrap(method, problem, x0, N, mu=None, L=None, **kwargs):
    """Enforce monotonicity: before each inner step, replace the inner x_k by
    the incumbent best point, then keep the better of the step's output and
    the incumbent. The wrapped method's worst-case bound is preserved.

    Not applicable to ogm/item/tmm, whose potentials track y-sequences.
    """
    if method not in _WRAPPABLE:
        raise InvalidArgument(f"monotone_wrap does not support {method!r}")
    counters = Counters()
    x0 = np.array(x0, dtype=float)

    if isinstance(problem, CompositeProblem):
        objective = problem.objective
        smooth = problem.smooth
        x_star, f_star = problem.x_star, problem.F_star
    else:
        objective = problem.value
        smooth = problem
        x_star, f_star = problem.x_star, problem.f_star

    co = CountingOracle(smooth, counters)
    if mu is None:
        mu = smooth.params.mu
    if L is None:
        L = smooth.params.L

    if method == "fgm":
        state, step = _fgm_factory(co, x0, mu, L,
                                   form_three=(kwargs.get("form") == "III"))
    elif method == "constant_momentum":
        state, step = _constant_momentum_factory(co, x0, mu, L)
    elif method == "bregman_agm":
        co_h = CountingOracle(problem.nonsmooth, counters)
        prob = CompositeProblem(problem.smooth, co_h,
                                x_star=problem.x_star, F_star=problem.F_star)
        state, step = _bregman_factory(prob, co, x0, L, kwargs.get("dgf", "euclidean"))
    else:  # fista / prox_agm
        from .composite import _composite_factory

        state, step = _composite_factory(method, problem, co, counters, x0, mu, L,
                                         kwargs.get("alpha", 2.0),
                                         kwargs.get("mode", "monotone"),
                                         L0=kwargs.get("L0"))

    rec = Recorder(f"monotone({method})", smooth, counters,
                   meta={"N": N, "inner": method, "mu": mu, "L": L},
                   objective=objective, x_star=x_star, f_star=f_star)
    x_best = x0.copy()
    f_best = objective(x_best)
    grad0 = smooth.gradient(x0)
    rec.record(0, x_best, grad=grad0, state={"A": state.get("A", 0.0)})
    for k in range(N):
        state["x"] = x_best.copy()
        state = step(state)
        check_finite(state["x"], rec.trace)
        f_cand = objective(state["x"])
        if f_cand < f_best:
            x_best, f_best = state["x"].copy(), f_cand
        rec.record(k + 1, x_best, grad=smooth.gradient(x_best),
                   state={"A": state.get("A", 0.0)})
    return rec.trace
