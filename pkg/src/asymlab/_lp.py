"""Support-function LP over polyhedra ``{x : G x <= 1}``.

HiGHS (through :func:`scipy.optimize.linprog`) does the search; the simplex
vertex it returns is then re-solved from its active constraints so that the
reported value is accurate to floating precision rather than to the solver's
feasibility tolerance.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True)
class Support:
    """Result of ``sup {<c, x> : G x <= 1}``.

    Exactly one of ``point`` (finite optimum) and ``ray`` (unbounded
    direction with ``G d <= 0`` and ``<c, d> > 0``) is set.
    """

    value: float
    point: Optional[np.ndarray] = None
    ray: Optional[np.ndarray] = None

    @property
    def bounded(self):
        return self.value != math.inf


def _polish(G, c, x):
    n = G.shape[1]
    slack = 1.0 - G @ x
    order = np.argsort(slack, kind="stable")
    rows = []
    for i in order:
        if slack[i] > 1e-6 * max(1.0, np.abs(G[i]).max()):
            break
        cand = G[rows + [i]]
        if np.linalg.matrix_rank(cand) == len(rows) + 1:
            rows.append(i)
            if len(rows) == n:
                break
    if len(rows) < n:
        return None
    v = np.linalg.solve(G[rows], np.ones(n))
    if np.max(G @ v) > 1.0 + 1e-12 * max(1.0, np.abs(v).max()):
        return None
    return v


def recession_ray(G, c):
    """Direction ``d`` in ``{G d <= 0}``, ``|d|_inf <= 1``, maximising ``<c, d>``.

    Returns ``(d, <c, d>)``.
    """
    n = G.shape[1]
    res = linprog(-c, A_ub=G, b_ub=np.zeros(G.shape[0]), bounds=[(-1.0, 1.0)] * n,
                  method="highs-ds", options=_HIGHS)
    if res.status != 0:  # pragma: no cover - the box LP is always feasible
        raise RuntimeError(f"recession LP failed: {res.message}")
    d = np.asarray(res.x, dtype=float)
    return d, float(c @ d)


def lp_support(G, c):
    G = np.asarray(G, dtype=float)
    c = np.asarray(c, dtype=float)
    n = G.shape[1]
    if not np.any(c):
        return Support(0.0, point=np.zeros(n))
    res = linprog(-c, A_ub=G, b_ub=np.ones(G.shape[0]), bounds=[(None, None)] * n,
                  method="highs-ds", options=_HIGHS)
    if res.status == 0:
        x = np.asarray(res.x, dtype=float)
        v = _polish(G, c, x)
        if v is not None and c @ v >= c @ x - 1e-7 * max(1.0, abs(c @ x)):
            x = v
        return Support(float(c @ x), point=x)
    if res.status in (2, 3):
        # x = 0 is feasible, so "infeasible or unbounded" can only mean unbounded
        d, gain = recession_ray(G, c)
        if gain <= 0:  # pragma: no cover - solver disagreement
            raise RuntimeError("LP reported unbounded but no improving ray exists")
        return Support(math.inf, ray=d)
    raise RuntimeError(f"support LP failed: {res.message}")  # pragma: no cover
