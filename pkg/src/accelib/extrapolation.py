"""Nonlinear (Anderson-type) acceleration: offline, mixing, online,
regularized, and proximal variants with safeguards."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, SingularSystemError
from .trace import CountingOracle, Counters, Recorder, check_finite

SINGULAR_PIVOT_REL = 1e-13


class PairBuffer:
    """Ordered (x_i, g_i) pairs with optional capacity; oldest evicted first."""

    def __init__(self, capacity=None):
        if capacity is not None and capacity < 1:
            raise InvalidArgument("capacity must be >= 1")
        self.capacity = capacity
        self._xs = []
        self._gs = []

    def append(self, x, g):
        self._xs.append(np.array(x, dtype=float, copy=True))
        self._gs.append(np.array(g, dtype=float, copy=True))
        if self.capacity is not None and len(self._xs) > self.capacity:
            self._xs.pop(0)
            self._gs.pop(0)

    def __len__(self):
        return len(self._xs)

    @property
    def X(self):
        return np.array(self._xs)

    @property
    def G(self):
        return np.array(self._gs)


@dataclass
class ExtrapolationResult:
    c: np.ndarray
    x_extr: np.ndarray
    gram_cond: float


def solve_pivot(A, b):
    """Gaussian elimination with partial pivoting on a small dense system.

    Raises SingularSystemError when a pivot falls below 1e-13 * max |entry|.
    """
    A = np.array(A, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    n = A.shape[0]
    threshold = SINGULAR_PIVOT_REL * max(np.max(np.abs(A)), 1e-300)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(A[col:, col])))
        if np.abs(A[piv, col]) < threshold:
            raise SingularSystemError(f"pivot {A[piv, col]!r} below threshold")
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        for row in range(col + 1, n):
            m = A[row, col] / A[col, col]
            A[row, col:] -= m * A[col, col:]
            b[row] -= m * b[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - np.dot(A[row, row + 1:], x[row + 1:])) / A[row, row]
    return x


def lstsq_qr(A, b):
    """Least-squares min ||A y - b|| via Householder QR (backward stable,
    unlike the squared normal equations). A is tall or square; a diagonal of R
    below 1e-13 * max |R| flags rank deficiency."""
    A = np.array(A, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    m, n = A.shape
    for j in range(n):
        col = A[j:, j]
        alpha = -np.sign(col[0]) * np.linalg.norm(col) if col[0] != 0 else -np.linalg.norm(col)
        v = col.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn > 0:
            v /= vn
            A[j:, j:] -= 2.0 * np.outer(v, v @ A[j:, j:])
            b[j:] -= 2.0 * v * (v @ b[j:])
    diag = np.abs(np.diag(A[:n, :n]))
    if diag.min() < SINGULAR_PIVOT_REL * max(diag.max(), 1e-300):
        raise SingularSystemError("rank-deficient least-squares system")
    y = np.zeros(n)
    for row in range(n - 1, -1, -1):
        y[row] = (b[row] - np.dot(A[row, row + 1:n], y[row + 1:])) / A[row, row]
    return y


def spectral_norm(M, iters=100, seed=0):
    """Deterministic power iteration estimate of ||M||_2 for symmetric PSD M."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = M @ v
        n = np.linalg.norm(w)
        if n == 0.0:
            return 0.0
        v = w / n
    return float(v @ M @ v)


def _gram_cond(GtG):
    vals = np.linalg.eigvalsh((GtG + GtG.T) / 2.0)
    lo = max(float(vals.min()), 0.0)
    hi = float(vals.max())
    return np.inf if lo == 0.0 else hi / lo


def offline_na(buf):
    """Solve (G^T G) z = 1, normalize c = z / (z^T 1), return x_extr = sum c_i x_i.

    When the Gram solve hits the pivot threshold (the buffered gradients are
    affinely dependent, e.g. k >= d on a quadratic where the exact minimizer is
    reachable), the same subproblem min ||c @ G|| s.t. sum(c) = 1 is re-solved
    in difference coordinates c_i (i < k), which stays nonsingular whenever the
    gradient differences are independent. Truly degenerate buffers still raise.
    """
    if len(buf) < 1:
        raise InvalidArgument("need at least one pair")
    G = buf.G
    GtG = G @ G.T
    k = len(buf)
    try:
        z = solve_pivot(GtG, np.ones(k))
        c = z / np.sum(z)
    except SingularSystemError:
        if k == 1:
            raise
        D = G[:-1] - G[-1]
        norms = np.linalg.norm(D, axis=1)
        if np.any(norms == 0.0):
            raise
        y = lstsq_qr((D / norms[:, None]).T, -G[-1]) / norms
        c = np.append(y, 1.0 - np.sum(y))
    x_extr = c @ buf.X
    return ExtrapolationResult(c=c, x_extr=x_extr, gram_cond=_gram_cond(GtG))


def na_mixing(buf, h):
    """x_extr = sum c_i (x_i - h g_i) with the offline weights."""
    res = offline_na(buf)
    x_extr = res.c @ (buf.X - h * buf.G)
    return ExtrapolationResult(c=res.c, x_extr=x_extr, gram_cond=res.gram_cond)


def rna(buf, h, lam, c_ref=None):
    """Regularized weights from (GG/||GG||_2 + lam I) w = lam c_ref, renormalized.

    c = w + z (1 - w^T 1)/(z^T 1) with (GG_n + lam I) z = 1, so c^T 1 = 1 exactly.
    Default c_ref is uniform.
    """
    if lam <= 0:
        raise InvalidArgument("lambda must be > 0")
    k = len(buf)
    if k < 1:
        raise InvalidArgument("need at least one pair")
    if c_ref is None:
        c_ref = np.full(k, 1.0 / k)
    else:
        c_ref = np.asarray(c_ref, dtype=float)
        if abs(np.sum(c_ref) - 1.0) > 1e-9:
            raise InvalidArgument("c_ref must sum to 1")
    G = buf.G
    GtG = G @ G.T
    norm = spectral_norm(GtG)
    Gn = GtG / norm if norm > 0 else GtG
    A = Gn + lam * np.eye(k)
    w = solve_pivot(A, lam * c_ref)
    z = solve_pivot(A, np.ones(k))
    c = w + z * (1.0 - np.sum(w)) / np.sum(z)
    x_extr = c @ (buf.X - h * buf.G)
    return ExtrapolationResult(c=c, x_extr=x_extr, gram_cond=_gram_cond(A))


def _golden_section(fun, a, b, evals=20):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(evals - 2):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return c if fc < fd else d


def online_rna(oracle, x0, h, lam, m, N, safeguard="none"):
    """Limited-memory online extrapolation.

    Each step appends (x_k, grad f(x_k)), extrapolates with rna (lam > 0) or
    offline mixing (lam == 0), and optionally safeguards:
      - "descent": accept x_extr only if f(x_extr) < min buffered f(x_i),
        else fall back to x_k - h grad f(x_k);
      - "linesearch": golden-section search of the mixing step over [0, 4h].
    A singular offline solve falls back to the gradient step and flags the
    record state.
    """
    if m < 1:
        raise InvalidArgument("memory m must be >= 1")
    if safeguard not in ("none", "descent", "linesearch"):
        raise InvalidArgument(f"unknown safeguard {safeguard!r}")
    counters = Counters()
    co = CountingOracle(oracle, counters)
    rec = Recorder("online_rna", oracle, counters,
                   meta={"h": h, "lambda": lam, "m": m, "N": N, "safeguard": safeguard})
    buf = PairBuffer(capacity=m)
    x = np.array(x0, dtype=float)
    g = co.gradient(x)
    rec.record(0, x, grad=g)
    for k in range(N):
        buf.append(x, g)
        fallback = False

        def extr(step):
            if lam > 0:
                return rna(buf, step, lam).x_extr
            return na_mixing(buf, step).x_extr

        try:
            if safeguard == "linesearch":
                best_h = _golden_section(lambda s: oracle.value(extr(s)), 0.0, 4.0 * h)
                x_new = extr(best_h)
            else:
                x_new = extr(h)
            if safeguard == "descent":
                best_buffered = min(oracle.value(xi) for xi in buf.X)
                if not oracle.value(x_new) < best_buffered:
                    x_new = x - h * g
                    fallback = True
        except SingularSystemError:
            x_new = x - h * g
            fallback = True
        check_finite(x_new, rec.trace)
        x = x_new
        g = co.gradient(x)
        rec.record(k + 1, x, grad=g, state={"fallback": fallback})
    return rec.trace


def prox_rna(problem, x0, gamma, lam, N, c_ref=None, m=None):
    """Online RNA through a proximal operator.

    Maintains z_k with x_k = prox_{gamma h}(z_k); the extrapolated residuals are
    g_k = (gamma grad f(x_k) + z_k - x_k)/gamma, and the z-sequence is
    extrapolated then re-proxed so every reported x_k lies in dom h.
    """
    if gamma <= 0:
        raise InvalidArgument("gamma must be > 0")
    counters = Counters()
    f = CountingOracle(problem.smooth, counters)
    h = CountingOracle(problem.nonsmooth, counters)
    rec = Recorder("prox_rna", problem.smooth, counters,
                   meta={"gamma": gamma, "lambda": lam, "N": N},
                   objective=problem.objective,
                   x_star=problem.x_star, f_star=problem.F_star)
    buf = PairBuffer(capacity=m)
    x = np.array(x0, dtype=float)
    z = x.copy()  # x0 is taken in dom h, so prox_{gamma h}(z0) = x0
    rec.record(0, x, grad=problem.smooth.gradient(x))
    for k in range(N):
        g = (gamma * f.gradient(x) + z - x) / gamma
        buf.append(z, g)
        fallback = False
        try:
            if lam > 0:
                z_new = rna(buf, gamma, lam, c_ref=c_ref).x_extr
            else:
                z_new = na_mixing(buf, gamma).x_extr
        except SingularSystemError:
            z_new = z - gamma * g
            fallback = True
        check_finite(z_new, rec.trace)
        z = z_new
        x = h.prox(z, gamma)
        rec.record(k + 1, x, grad=problem.smooth.gradient(x), state={"fallback": fallback})
    return rec.trace
