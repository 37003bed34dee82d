"""Iterative closed-form active-set scheme for the simplex dual.

Every iterate lies on the affine family

    u = a / c + 1/2 * G[:, I] q_I,      q_I = -(2/c) Z^-1 a_I,   Z = G[I, I],

which pins ``u_I = 0`` and keeps ``1^T u = 1`` (rows of G sum to zero). The
active sequence ``i`` grows one index at a time, picking the ``t``-th
smallest entry of ``u`` among indices not yet active. If the new multipliers
are not all non-negative the sequence is cut just before the most negative
one and the next-ranked candidate is tried at that position; the per
position counters ``N`` remember how many candidates each position has used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NotConverged, NotPositiveDefinite, SelectorExhausted
from .linalg import cholesky
from .qp import SimplexQp, solve_projected_gradient

EPS_FEAS = 1e-9
# classification slack on min(a)
EPS_CLASSIFY = 1e-12

EMPTY_S = "EmptyS"
NONEMPTY_S = "NonEmptyS"


@dataclass
class IterativeResult:
    u: np.ndarray
    iterations: int
    converged: bool
    active: tuple = ()
    q: np.ndarray | None = None
    fallback: bool = False
    trace: list | None = field(default=None, repr=False)


def classify(kernel) -> str:
    return EMPTY_S if kernel.a.min() >= -EPS_CLASSIFY else NONEMPTY_S


def default_n_max(kernel) -> int:
    return 10 * kernel.n


def _multipliers(G, a, c, active):
    """``q_I = -(2/c) Z^-1 a_I`` and the resulting ``u``."""
    idx = np.fromiter(active, dtype=np.intp, count=len(active))
    Z = G[idx[:, None], idx]
    if Z.diagonal().min() <= 0:
        raise NotPositiveDefinite(f"G has a non-positive diagonal entry on {idx}")
    q = cholesky(Z).solve(a[idx]) * (-2.0 / c)
    return q


def _u_of(G, a, c, active, q):
    return a / c + 0.5 * (G[:, list(active)] @ q)


class _Search:
    """State of one run; ``advance`` performs one loop iteration."""

    def __init__(self, kernel, eps):
        self.G, self.a, self.c = kernel.G, kernel.a, kernel.c
        self.eps = eps
        self.active: list[int] = []
        self.counts = [1]
        self.t = 1
        self.q = np.empty(0)
        self.u = kernel.zf_u
        # accepted state with the largest dual value u^T V^-1 u seen so far
        self.best = (1.0 / self.c, self.u, (), self.q)

    def dual_value(self):
        # u^T V^-1 u on the affine family: 1/c - a_I . q_I / (2c)
        return 1.0 / self.c - float(self.a[self.active] @ self.q) / (2.0 * self.c)

    def advance(self):
        order = np.argsort(self.u, kind="stable")
        taken = set(self.active)
        cands = [k for k in order.tolist() if k not in taken]
        if self.t > len(cands):
            raise SelectorExhausted(
                f"rank {self.t} requested with {len(cands)} candidates left"
            )
        self.active.append(cands[self.t - 1])
        self.counts.append(1)
        q = _multipliers(self.G, self.a, self.c, self.active)
        if q.min() >= -self.eps:
            self.q = q
            self.u = _u_of(self.G, self.a, self.c, self.active, q)
            self.t = 1
            val = self.dual_value()
            if val > self.best[0]:
                self.best = (val, self.u, tuple(self.active), q)
            return "accept"
        m = int(np.argmin(q))
        self.active = self.active[:m]
        if self.active:
            self.q = _multipliers(self.G, self.a, self.c, self.active)
            self.u = _u_of(self.G, self.a, self.c, self.active, self.q)
        else:
            self.q = np.empty(0)
            self.u = self.a / self.c
        self.counts = self.counts[: m + 1]
        self.counts[m] += 1
        self.t = self.counts[m]
        return "retract"


def _run(kernel, n_max, eps, trace):
    if n_max is None:
        n_max = default_n_max(kernel)
    log = [] if trace else None
    if classify(kernel) == EMPTY_S:
        return IterativeResult(kernel.zf_u, 0, True, (), np.empty(0), trace=log), None
    st = _Search(kernel, eps)
    n = 0
    exhausted = None
    while st.u.min() < -eps and n < n_max:
        try:
            action = st.advance()
        except SelectorExhausted as exc:
            exhausted = exc
            break
        n += 1
        if log is not None:
            log.append(
                {
                    "iteration": n,
                    "action": action,
                    "active": tuple(st.active),
                    "counts": tuple(st.counts),
                    "q": st.q.copy(),
                    "u_min": float(st.u.min()),
                    "objective": st.dual_value(),
                }
            )
    if st.u.min() >= -eps:
        return IterativeResult(st.u, n, True, tuple(st.active), st.q, trace=log), None
    _, u, active, q = st.best
    return IterativeResult(u, n, False, active, q, trace=log), exhausted


def _fallback(kernel, result):
    qp = SimplexQp.from_kernel(kernel)
    try:
        sol = solve_projected_gradient(qp)
    except NotConverged as exc:
        sol = exc.result
    result.u = sol.u
    result.converged = True
    result.fallback = True
    result.active = tuple(np.nonzero(sol.u <= EPS_FEAS)[0].tolist())
    result.q = None
    return result


def solve_iterative(kernel, n_max=None, eps=EPS_FEAS, trace=False, fallback=True) -> IterativeResult:
    """Run the scheme to convergence.

    ``n_max`` defaults to ``10 * n``; pass ``math.inf`` for no limit. If the
    rank selector runs out of candidates the projected-gradient oracle takes
    over and the result is flagged ``fallback`` (or :class:`SelectorExhausted`
    is raised with ``fallback=False``). Hitting ``n_max`` raises
    :class:`NotConverged` carrying the best feasible iterate.
    """
    result, exhausted = _run(kernel, n_max, eps, trace)
    if exhausted is not None:
        if not fallback:
            raise exhausted
        return _fallback(kernel, result)
    if not result.converged:
        raise NotConverged(
            f"no convergence in {result.iterations} iterations", result=result
        )
    return result


def solve_with_budget(kernel, n_max=math.inf, eps=EPS_FEAS, trace=False, fallback=True) -> IterativeResult:
    """Like :func:`solve_iterative` but returns the best iterate found when the
    budget runs out. ``n_max = 0`` always yields the zero-forcing point."""
    if n_max == 0:
        return IterativeResult(kernel.zf_u, 0, classify(kernel) == EMPTY_S, (), np.empty(0),
                               trace=[] if trace else None)
    result, exhausted = _run(kernel, n_max, eps, trace)
    if exhausted is not None and fallback:
        return _fallback(kernel, result)
    return result
