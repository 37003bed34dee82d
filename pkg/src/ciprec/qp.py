"""Reference solvers for ``min u^T A u`` over the probability simplex.

Two independent routes: exhaustive support enumeration (exact, n <= 20) and
accelerated projected gradient with an exact sort-based simplex projection.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import BadDimensions, NotConverged, TooLarge

MAX_ENUM = 20


@dataclass(frozen=True, eq=False)
class SimplexQp:
    A: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def from_kernel(cls, kernel) -> "SimplexQp":
        return cls(kernel.V_inv)

    def objective(self, u) -> float:
        return float(u @ self.A @ u)


@dataclass(frozen=True, eq=False)
class QpResult:
    u: np.ndarray
    objective: float
    iterations: int = 0
    residual: float = 0.0


def kkt_certificate(A, u, tol=1e-8):
    """Largest KKT violation of ``u``: with ``nu = min_k (2Au)_k`` over the
    support, every ``(2Au)_k`` must equal ``nu`` on the support and be at
    least ``nu`` off it."""
    g = 2 * A @ u
    on = u > 1e-9
    nu = g[on].mean()
    viol_on = np.abs(g[on] - nu).max()
    viol_off = max(0.0, (nu - g[~on]).max()) if (~on).any() else 0.0
    return max(viol_on, viol_off)


@lru_cache(maxsize=None)
def _supports(n, size):
    arr = np.array(list(combinations(range(n), size)), dtype=np.intp).reshape(-1, size)
    arr.setflags(write=False)
    return arr


def _level(A, F, tol):
    """Solve the equality-constrained problem on every support in ``F`` (C, f)
    at once. Returns (objectives, u) for candidates passing the KKT sign
    checks; objectives of failing candidates are ``inf``."""
    C, f = F.shape
    n = A.shape[0]
    sub = A[F[:, :, None], F[:, None, :]]
    z = np.linalg.solve(sub, np.ones((C, f, 1)))[..., 0]
    tot = z.sum(axis=1)
    uF = z / tot[:, None]
    nu = 2.0 / tot  # multiplier of 1^T u = 1; objective is nu / 2
    U = np.zeros((C, n))
    np.put_along_axis(U, F, uF, axis=1)
    mult = 2.0 * U @ A - nu[:, None]
    np.put_along_axis(mult, F, 0.0, axis=1)
    ok = (tot > 0) & (uF.min(axis=1) >= -tol) & (mult.min(axis=1) >= -tol * np.maximum(1.0, nu))
    obj = np.where(ok, 1.0 / np.where(tot > 0, tot, 1.0), np.inf)
    return obj, U


def solve_active_set_enum(qp: SimplexQp, exhaustive=False, tol=1e-10) -> QpResult:
    """Global minimizer by enumerating supports.

    For each support F the restricted problem has the closed form
    ``u_F = A_FF^-1 1 / (1^T A_FF^-1 1)``; a candidate is accepted when
    ``u_F >= 0`` and the off-support multipliers ``2 (A u)_j - nu`` are
    non-negative, which is the full KKT system. A positive-definite ``A`` has
    exactly one such point, so by default the search stops at the first one
    found (largest supports first). ``exhaustive=True`` scores every support
    and keeps the smallest objective.
    """
    n = qp.n
    if n > MAX_ENUM:
        raise TooLarge(f"enumeration limited to n <= {MAX_ENUM}, got {n}")
    if n < 1:
        raise BadDimensions("empty problem")
    best_obj, best_u = np.inf, None
    for size in range(n, 0, -1):
        obj, U = _level(qp.A, _supports(n, size), tol)
        j = int(np.argmin(obj))
        if obj[j] < best_obj:
            best_obj, best_u = obj[j], U[j]
            if not exhaustive:
                break
    if best_u is None:
        raise NotConverged("no support satisfied the KKT conditions")
    u = np.clip(best_u, 0.0, None)
    u /= u.sum()
    return QpResult(u, qp.objective(u))


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{u >= 0, sum(u) = 1}`` by sort and threshold."""
    y = np.asarray(y, dtype=float)
    srt = np.sort(y, kind="stable")[::-1]
    css = np.cumsum(srt) - 1.0
    idx = np.arange(1, y.shape[0] + 1)
    rho = np.nonzero(srt - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(y - theta, 0.0)


def solve_projected_gradient(qp: SimplexQp, tol=1e-10, max_iter=100_000, u0=None) -> QpResult:
    """Accelerated projected gradient (FISTA with gradient-based restart).

    Stops when the norm of the gradient mapping ``L (y - P(y - grad/L))``
    falls to ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    A = qp.A
    n = qp.n
    L = 2.0 * float(np.linalg.eigvalsh(A)[-1])
    u = np.full(n, 1.0 / n) if u0 is None else project_simplex(u0)
    y = u.copy()
    tk = 1.0
    res = np.inf
    for it in range(1, max_iter + 1):
        u_new = project_simplex(y - (2.0 / L) * (A @ y))
        step = y - u_new
        res = L * float(np.sqrt(step @ step))
        if res <= tol:
            return QpResult(u_new, qp.objective(u_new), it, res)
        if step @ (u_new - u) > 0:
            tk = 1.0
            y = u_new
        else:
            tk_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
            y = u_new + ((tk - 1.0) / tk_new) * (u_new - u)
            tk = tk_new
        u = u_new
    raise NotConverged(
        f"projected gradient stopped after {max_iter} iterations, residual {res:.3e}",
        result=QpResult(u, qp.objective(u), max_iter, res),
        residual=res,
    )
