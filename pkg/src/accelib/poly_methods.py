"""Methods with polynomial-based analyses: gradient descent, Chebyshev's
semi-iterative method, its heavy-ball limit, and conjugate gradients on
quadratics."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument, UnsupportedOracle
from .trace import CountingOracle, Counters, Recorder, check_finite


def gradient_descent(oracle, gamma, x0, N, mu=0.0):
    """x_{k+1} = x_k - gamma * grad f(x_k).

    `mu` only annotates the trace so the potential certificate can use the
    strongly convex weighting; it does not change the iterates.
    """
    if gamma <= 0:
        raise InvalidArgument("gamma must be > 0")
    if N < 0:
        raise InvalidArgument("N must be >= 0")
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("gd", oracle, counters, meta={"gamma": gamma, "N": N, "mu": mu})
    x = np.array(x0, dtype=float)
    g = co.gradient(x)
    rec.record(0, x, grad=g)
    for k in range(N):
        x = x - gamma * g
        check_finite(x, rec.trace)
        g = co.gradient(x)
        rec.record(k + 1, x, grad=g)
    return rec.trace


def delta_sequence(mu, L, N):
    """delta_1 = (L-mu)/(L+mu); delta_k = 1/(2(L+mu)/(L-mu) - delta_{k-1})."""
    deltas = []
    delta = (L - mu) / (L + mu)
    for _ in range(N):
        deltas.append(delta)
        delta = 1.0 / (2.0 * (L + mu) / (L - mu) - delta)
    return deltas


def delta_infty(mu, L):
    return (np.sqrt(L) - np.sqrt(mu)) / (np.sqrt(L) + np.sqrt(mu))


def chebyshev_bound(mu, L, N):
    """Worst-case distance ratio 2/(xi^N + xi^-N), xi = (sqrt(kappa)+1)/(sqrt(kappa)-1)."""
    kappa = L / mu
    xi = (np.sqrt(kappa) + 1.0) / (np.sqrt(kappa) - 1.0)
    return 2.0 / (xi**N + xi ** (-N))


def chebyshev(oracle, x0, N, mu=None, L=None):
    """Chebyshev's method; requires mu > 0.

    First step is plain gradient descent with step 2/(L+mu); afterwards
    x_k = x_{k-1} - (4 delta_k/(L-mu)) grad f(x_{k-1})
              + (1 - 2 delta_k (L+mu)/(L-mu)) (x_{k-2} - x_{k-1}).
    """
    if mu is None:
        mu, L = oracle.params.mu, oracle.params.L
    if mu <= 0:
        raise InvalidArgument("chebyshev requires mu > 0")
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("chebyshev", oracle, counters, meta={"mu": mu, "L": L, "N": N})
    x_prev = np.array(x0, dtype=float)
    g = co.gradient(x_prev)
    rec.record(0, x_prev, grad=g, state={"delta": None})
    if N == 0:
        return rec.trace
    x = x_prev - (2.0 / (L + mu)) * g
    g = co.gradient(x)
    delta = (L - mu) / (L + mu)
    rec.record(1, x, grad=g, state={"delta": delta})
    for k in range(2, N + 1):
        delta = 1.0 / (2.0 * (L + mu) / (L - mu) - delta)
        x_new = (x - (4.0 * delta / (L - mu)) * g
                 + (1.0 - 2.0 * delta * (L + mu) / (L - mu)) * (x_prev - x))
        check_finite(x_new, rec.trace)
        x_prev, x = x, x_new
        g = co.gradient(x)
        rec.record(k, x, grad=g, state={"delta": delta})
    return rec.trace


def heavy_ball(oracle, x0, N, mu=None, L=None):
    """Fixed-coefficient limit of Chebyshev's method.

    x_{k+1} = x_k - 4/(sqrt(L)+sqrt(mu))^2 grad f(x_k)
                  + delta_inf^2 (x_k - x_{k-1}).
    """
    if mu is None:
        mu, L = oracle.params.mu, oracle.params.L
    if mu <= 0:
        raise InvalidArgument("heavy_ball requires mu > 0")
    step = 4.0 / (np.sqrt(L) + np.sqrt(mu)) ** 2
    beta = delta_infty(mu, L) ** 2
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("heavy_ball", oracle, counters,
                   meta={"mu": mu, "L": L, "N": N, "step": step, "momentum": beta})
    x_prev = np.array(x0, dtype=float)
    x = x_prev
    g = co.gradient(x)
    rec.record(0, x, grad=g)
    for k in range(N):
        x_new = x - step * g + beta * (x - x_prev)
        check_finite(x_new, rec.trace)
        x_prev, x = x, x_new
        g = co.gradient(x)
        rec.record(k + 1, x, grad=g)
    return rec.trace


def conjugate_gradient_quadratic(oracle, x0, N):
    """CG realization of the span-argmin method, valid on quadratics only.

    Hessian-vector products are taken as gradient differences, which are exact
    when the gradient is affine.
    """
    if not getattr(oracle, "is_quadratic", False):
        raise UnsupportedOracle("conjugate_gradient_quadratic needs a quadratic oracle")
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("cg", oracle, counters, meta={"N": N})
    x = np.array(x0, dtype=float)
    g = co.gradient(x)
    rec.record(0, x, grad=g)
    r = -g
    p = r.copy()
    rs = float(np.dot(r, r))
    for k in range(N):
        if rs <= 1e-30:
            rec.record(k + 1, x, grad=-r)
            continue
        Hp = co.gradient(x + p) + r  # gradient is affine, so this equals H p exactly
        alpha = rs / float(np.dot(p, Hp))
        x = x + alpha * p
        r_new = r - alpha * Hp
        rs_new = float(np.dot(r_new, r_new))
        p = r_new + (rs_new / rs) * p
        r, rs = r_new, rs_new
        g = -r
        rec.record(k + 1, x, grad=g)
    return rec.trace
