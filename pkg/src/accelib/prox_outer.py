"""Proximal point algorithm, its accelerated inexact variant with a
relative-error acceptance rule, and the Catalyst outer loop with pluggable
linearly convergent inner solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (ContractViolation, InconsistentCertificate, InnerSolveError,
                     InvalidArgument, UnsupportedOracle)
from .oracles import ClassParams, ProblemOracle
from .tolerances import tol_for
from .trace import CountingOracle, Counters, Recorder, check_finite


@dataclass
class InexactProxCertificate:
    """Residual e = x_next - y + lambda*g and the acceptance tolerance delta."""

    e: np.ndarray
    x_next: np.ndarray
    y: np.ndarray
    lam: float
    g: np.ndarray
    delta: float


def check_relative_error(cert):
    """Accept iff ||e|| <= delta ||x_next - y|| (non-strict; 0 <= 0 accepts).

    The stored residual is recomputed from (x_next, y, lam, g) and must match
    to 1e-10, otherwise the certificate is inconsistent.
    """
    recomputed = cert.x_next - cert.y + cert.lam * cert.g
    if np.linalg.norm(recomputed - cert.e) > 1e-10 * (1.0 + np.linalg.norm(cert.e)):
        raise InconsistentCertificate("stored residual does not match (x, y, lambda, g)")
    lhs = float(np.linalg.norm(cert.e))
    rhs = cert.delta * float(np.linalg.norm(cert.x_next - cert.y))
    return lhs <= rhs + tol_for(rhs)


def ppa(oracle, lambdas, x0, N=None):
    """Exact proximal point algorithm x_{k+1} = prox_{lambda_k f}(x_k)."""
    if not oracle.has_prox:
        raise UnsupportedOracle("ppa needs an exact prox")
    lambdas = [float(l) for l in lambdas]
    if N is None:
        N = len(lambdas)
    if len(lambdas) < N:
        raise InvalidArgument("need one lambda per iteration")
    if any(l < 0 for l in lambdas):
        raise InvalidArgument("lambdas must be >= 0")
    mu = oracle.params.mu if oracle.params is not None else 0.0
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("ppa", oracle, counters, meta={"N": N, "lambdas": lambdas[:N], "mu": mu})
    x = np.array(x0, dtype=float)
    A = 0.0
    rec.record(0, x, state={"A": A})
    for k in range(N):
        lam = lambdas[k]
        x = co.prox(x, lam)
        check_finite(x, rec.trace)
        A = A * (1.0 + lam * mu) + lam
        rec.record(k + 1, x, state={"A": A})
    return rec.trace


def ppa_bound(R, lambdas, mu=0.0):
    lambdas = np.asarray(lambdas, dtype=float)
    if mu == 0:
        return R * R / (2.0 * np.sum(lambdas))
    return mu * R * R / (2.0 * (np.prod(1.0 + lambdas * mu) - 1.0))


def exact_prox_solver(oracle):
    """Wrap an oracle with exact prox as an inexact-prox inner solver; the
    returned residual is exactly zero by the prox optimality condition."""
    if not oracle.has_prox:
        raise UnsupportedOracle("oracle has no prox")

    def solve(y, lam, counters=None):
        x_next = oracle.prox(y, lam)
        if counters is not None:
            counters.prox_calls += 1
        g = (y - x_next) / lam
        e = x_next - y + lam * g  # identically zero
        return x_next, g, e

    return solve


def accel_inexact_ppa(solver, lambdas, delta, x0, N=None, mu=0.0, oracle=None,
                      enforce_delta=True):
    """Accelerated inexact proximal point method.

    `solver(y, lam, counters)` returns (x_next, g, e) with e the prox residual;
    each step's certificate ||e|| <= delta ||x_next - y|| is checked and a
    violation raises InnerSolveError with the partial trace attached.
    `enforce_delta=False` lets callers run outside the admissible delta range
    to observe the certificate failing.
    """
    lambdas = [float(l) for l in lambdas]
    if N is None:
        N = len(lambdas)
    if len(lambdas) < N:
        raise InvalidArgument("need one lambda per iteration")
    if enforce_delta and mu == 0 and not (0 <= delta <= 1):
        raise InvalidArgument("delta must lie in [0,1] when mu=0")
    counters = Counters()
    rec = Recorder("accel_inexact_ppa", oracle if oracle is not None else _NullOracle(),
                   counters,
                   meta={"N": N, "delta": delta, "mu": mu, "lambdas": lambdas[:N]})
    x = np.array(x0, dtype=float)
    z = x.copy()
    A = 0.0
    rec.record(0, x, grad=None if oracle is not None else np.zeros_like(x),
               state={"A": A, "z": z.copy()})
    for k in range(N):
        lam = lambdas[k]
        if mu > 0:
            if enforce_delta and not (0 <= delta <= np.sqrt(1.0 + lam * mu)):
                raise InvalidArgument("delta must lie in [0, sqrt(1+lambda*mu)]")
            a = (lam + 2.0 * A * lam * mu
                 + np.sqrt(4.0 * A * A * lam * mu * (lam * mu + 1.0)
                           + 4.0 * A * lam * (lam * mu + 1.0) + lam * lam)) / 2.0
            A1 = A + a
            tau = (A1 - A) * (A * mu + 1.0) / (A1 + 2.0 * mu * A * A1 - mu * A * A)
            y = x + tau * (z - x)
        else:
            a = (lam + np.sqrt(lam * lam + 4.0 * A * lam)) / 2.0
            A1 = A + a
            y = (A * x + a * z) / A1
        x_next, g, e = solver(y, lam, counters)
        counters.inner_iters += 1
        cert = InexactProxCertificate(e=e, x_next=x_next, y=y, lam=lam, g=g, delta=delta)
        if not check_relative_error(cert):
            raise InnerSolveError(f"relative-error criterion failed at step {k}",
                                  rec.trace)
        if mu > 0:
            z = (z + mu * (A1 - A) / (1.0 + mu * A1) * (x_next - z)
                 - (A1 - A) / (1.0 + mu * A1) * g)
        else:
            z = z - a * g
        x = x_next
        check_finite(x, rec.trace)
        A = A1
        rec.record(k + 1, x, grad=g, state={"A": A, "z": z.copy(), "a": a})
    return rec.trace


class _NullOracle:
    """Placeholder oracle when the recorder has nothing to evaluate."""

    value = staticmethod(lambda x: float("nan"))
    gradient = staticmethod(lambda x: np.full_like(np.asarray(x, dtype=float), np.nan))
    x_star = None
    f_star = None


def ahpe_bound(R, lambdas):
    lambdas = np.asarray(lambdas, dtype=float)
    return 2.0 * R * R / np.sum(np.sqrt(lambdas)) ** 2


# ---------------------------------------------------------------------------
# Catalyst

INNER_SOLVERS = ("gd", "gd_linesearch", "const_momentum")


def inner_constants(inner, lam, L):
    """(C_M, tau_M) of the linear convergence contract on the regularized
    subproblem, which is (L + 1/lam)-smooth and (1/lam)-strongly convex."""
    lamL = lam * L
    if inner == "gd":
        return 1.0, 1.0 / (1.0 + lamL)
    if inner == "gd_linesearch":
        return lamL + 1.0, 2.0 / (2.0 + lamL)
    if inner == "const_momentum":
        return lamL + 1.0, np.sqrt(1.0 / (1.0 + lamL))
    raise InvalidArgument(f"unknown inner solver {inner!r}")


def catalyst_burden(inner, lam, L):
    """Worst-case inner iterations per outer step before the stopping rule
    fires: B = log(C_M (lam L + 2)) / log(1/(1-tau_M)) + 1."""
    C, tau = inner_constants(inner, lam, L)
    return np.log(C * (lam * L + 2.0)) / np.log(1.0 / (1.0 - tau)) + 1.0


def lambda_gd_tuning(mu, L):
    """lambda = 1/(L - 2 mu); the simple tuning for a gd inner solver."""
    if L <= 2 * mu:
        raise InvalidArgument("needs L > 2 mu")
    return 1.0 / (L - 2.0 * mu)


def lambda_optimal_tuning(mu, L):
    """lambda = 2/(L - 3 mu); the tuning matching the accelerated rate."""
    if L <= 3 * mu:
        raise InvalidArgument("needs L > 3 mu")
    return 2.0 / (L - 3.0 * mu)


def _regularized(oracle, y, lam):
    """Phi(x) = f(x) + ||x - y||^2/(2 lam)."""
    mu = oracle.params.mu if oracle.params is not None else 0.0
    L = oracle.params.L
    return ProblemOracle(
        lambda x: oracle.value(x) + float(np.dot(x - y, x - y)) / (2.0 * lam),
        lambda x: oracle.gradient(x) + (x - y) / lam,
        params=ClassParams(mu + 1.0 / lam, L + 1.0 / lam),
        name="catalyst_subproblem",
    )


def catalyst(oracle, inner, lam, budget_total, x0, mu=0.0):
    """Acceleration of a linearly convergent inner method via the inexact
    accelerated proximal point outer loop.

    Each outer step approximately minimizes Phi_k = f + ||.-y_k||^2/(2 lam),
    warm-started at y_k, stopping as soon as lam ||grad Phi_k(w)|| <= ||w - w0||
    (both sides zero accepts). Stops when budget_total inner iterations have
    been spent; a partially completed inner solve counts as useless work.
    """
    if inner not in INNER_SOLVERS:
        raise InvalidArgument(f"unknown inner solver {inner!r}")
    if lam <= 0:
        raise InvalidArgument("lambda must be > 0")
    L = oracle.params.L
    burden = catalyst_burden(inner, lam, L)
    cap = 2 * int(np.ceil(burden))
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("catalyst", oracle, counters,
                   meta={"inner": inner, "lambda": lam, "mu": mu,
                         "budget_total": budget_total, "burden": burden})
    x = np.array(x0, dtype=float)
    z = x.copy()
    A = 0.0
    inner_counts = []
    rec.record(0, x, state={"A": A, "z": z.copy(), "n_inner": 0})
    total = 0
    k = 0
    exhausted = False
    while total < budget_total:
        if mu > 0:
            a = (lam + 2.0 * A * lam * mu
                 + np.sqrt(4.0 * A * A * lam * mu * (lam * mu + 1.0)
                           + 4.0 * A * lam * (lam * mu + 1.0) + lam * lam)) / 2.0
            A1 = A + a
            tau = (A1 - A) * (A * mu + 1.0) / (A1 + 2.0 * mu * A * A1 - mu * A * A)
            y = x + tau * (z - x)
        else:
            a = (lam + np.sqrt(lam * lam + 4.0 * A * lam)) / 2.0
            A1 = A + a
            y = (A * x + a * z) / A1

        w, n_inner, stopped = _inner_solve(co, oracle, y, lam, inner,
                                           budget_total - total, cap)
        counters.inner_iters += n_inner
        total += n_inner
        if not stopped:
            exhausted = True
            break
        g = co.gradient(w)  # subgradient of f at the approximate prox point
        if mu > 0:
            z = (z + mu * (A1 - A) / (1.0 + mu * A1) * (w - z)
                 - (A1 - A) / (1.0 + mu * A1) * g)
        else:
            z = z - a * g
        x = w
        check_finite(x, rec.trace)
        A = A1
        k += 1
        inner_counts.append(n_inner)
        rec.record(k, x, grad=g, state={"A": A, "z": z.copy(), "n_inner": n_inner})
    rec.trace.meta["inner_counts"] = inner_counts
    rec.trace.meta["n_outer"] = k
    rec.trace.meta["n_total"] = total
    rec.trace.meta["n_useless"] = total - sum(inner_counts) if exhausted else 0
    return rec.trace


def _inner_solve(co, oracle, y, lam, inner, budget_left, cap):
    """Run the inner method on Phi = f + ||.-y||^2/(2 lam) from w0 = y until
    lam ||grad Phi(w)|| <= ||w - w0||. Returns (w, iterations, stopped)."""
    phi = _regularized(co, y, lam)
    L_phi = phi.params.L
    mu_phi = phi.params.mu
    w0 = y.copy()
    w = y.copy()

    def criterion(w):
        return lam * np.linalg.norm(phi.gradient(w)) - np.linalg.norm(w - w0) \
            <= tol_for(np.linalg.norm(w - w0))

    # note: criterion() costs a gradient of f through co; that is the honest
    # oracle accounting for evaluating the stopping rule
    if criterion(w):
        return w, 0, True

    if inner == "const_momentum":
        q = mu_phi / L_phi
        sq = np.sqrt(q)
        x_in, z_in = w.copy(), w.copy()
        for i in range(min(budget_left, cap)):
            y_in = x_in + (sq / (1.0 + sq)) * (z_in - x_in)
            g_in = phi.gradient(y_in)
            x_in = y_in - g_in / L_phi
            z_in = (1.0 - sq) * z_in + sq * (y_in - g_in / mu_phi)
            if criterion(x_in):
                return x_in, i + 1, True
        w = x_in
    else:
        for i in range(min(budget_left, cap)):
            g = phi.gradient(w)
            if inner == "gd":
                step = 1.0 / L_phi
            else:  # exact line search on the regularized subproblem
                step = _exact_linesearch(phi, oracle, w, g, lam, L_phi)
            w = w - step * g
            if criterion(w):
                return w, i + 1, True
    if min(budget_left, cap) == cap and budget_left > cap:
        raise ContractViolation(
            "inner solver exceeded twice its advertised burden")
    return w, min(budget_left, cap), False


def _exact_linesearch(phi, oracle, w, g, lam, L_phi):
    if getattr(oracle, "is_quadratic", False):
        Hg = oracle.hessian_matvec(g) + g / lam  # Hessian of Phi applied to g
        return float(np.dot(g, g) / np.dot(g, Hg))
    # golden-section fallback on [0, 2/mu_phi] is overkill here; use [0, 2/L..]
    lo, hi = 0.0, 2.0 / phi.params.mu
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = phi.value(w - c * g), phi.value(w - d * g)
    for _ in range(40):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = phi.value(w - c * g)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = phi.value(w - d * g)
    return c if fc < fd else d
