"""Basepoint sphericalization of a finite metric space.

Given a basepoint p, every pair gets the rescaled separation

    rho_p(x, y) = d(x, y) / ((1 + d(x, p)) (1 + d(y, p))),

which in general fails the triangle inequality.  The warped metric d-hat is
the chain infimum of rho over finite point sequences; on a finite set this
is exactly the shortest-path closure of the complete rho-weighted graph.
An ideal point labeled "∞" is adjoined with d-hat(x, ∞) := h(x), where
h(x) = 1/(1 + d(x, p)) is the per-point shrink factor.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .space import FiniteMetricSpace, ball_mask

INFINITY_LABEL = "∞"


def thread_count() -> int:
    """Worker cap from METRICFORGE_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("METRICFORGE_THREADS", "1")))
    except ValueError:
        return 1


def point_scales(m: FiniteMetricSpace, p: int) -> np.ndarray:
    """h(x) = 1/(1 + d(x, p)) for every point; h(p) = 1."""
    return 1.0 / (1.0 + m.dist[p])


def rho_matrix(m: FiniteMetricSpace, p: int) -> np.ndarray:
    h = point_scales(m, p)
    r = m.dist * h[:, None] * h[None, :]
    np.fill_diagonal(r, 0.0)
    return r


def rho(m: FiniteMetricSpace, p: int, x: int, y: int) -> float:
    """Rescaled separation d(x,y) * h(x) * h(y) of a single pair."""
    h = point_scales(m, p)
    return float(m.dist[x, y] * h[x] * h[y])


@dataclass(frozen=True, eq=False)
class WarpedSpace:
    """A finite space under the chain-infimum metric with ∞ adjoined.

    ``warped`` holds the base points (original order) plus one final point
    labeled "∞"; ``h`` are the shrink factors of the base points.
    """

    base: FiniteMetricSpace
    basepoint: int
    h: np.ndarray
    warped: FiniteMetricSpace

    @property
    def infty(self) -> int:
        """Index of the adjoined point in ``warped``."""
        return self.base.n


def _apsp(weights: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths on a complete nonnegative graph.

    Per-source priority-queue search accumulates each candidate distance as
    a left-associated float sum along its path, which is exactly what a
    chain enumeration computes; the minimum therefore agrees bit-for-bit
    with brute force over simple chains.  Sources are fanned across threads
    for large inputs (results are per-row independent).
    """
    n = weights.shape[0]
    workers = thread_count()
    if workers > 1 and n >= 512:
        chunks = np.array_split(np.arange(n), workers)
        out = np.empty_like(weights)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for idx, part in zip(chunks, pool.map(
                    lambda c: dijkstra(weights, directed=False, indices=c), chunks)):
                out[idx] = part
        return out
    return dijkstra(weights, directed=False)


def warp(m: FiniteMetricSpace, p: int) -> WarpedSpace:
    """Warp a space around basepoint index ``p`` and adjoin ∞.

    The basepoint is a required argument: no default is meaningful, and
    different choices give genuinely different warped geometries.
    """
    if not (0 <= p < m.n):
        raise ValueError(f"basepoint index {p} out of range")
    if INFINITY_LABEL in m.points:
        raise ValueError(f"label {INFINITY_LABEL!r} is reserved for the adjoined point")
    h = point_scales(m, p)
    w = rho_matrix(m, p)
    w = np.minimum(w, w.T)  # exact symmetry regardless of input rounding
    dhat = _apsp(w)
    dhat = np.minimum(dhat, dhat.T)
    n = m.n
    full = np.zeros((n + 1, n + 1))
    full[:n, :n] = dhat
    full[:n, n] = h
    full[n, :n] = h
    warped = FiniteMetricSpace(
        points=m.points + (INFINITY_LABEL,),
        dist=full,
        coords=None,
        mass=None,
        boundary=None,
    )
    return WarpedSpace(base=m, basepoint=p, h=h, warped=warped)


def infty_ball(w: WarpedSpace, r: float) -> set:
    """Open ball around the adjoined point, as warped-space indices."""
    if r <= 0:
        raise ValueError("radius must be positive")
    return set(int(i) for i in np.nonzero(ball_mask(w.warped, w.infty, r))[0])


@dataclass(frozen=True)
class InclusionReport:
    """Outcome of the two-sided ball comparison at one center and radius."""

    center: int
    r: float
    C: float
    precondition_ok: bool
    inner_radius: float
    outer_radius: float
    violations: tuple
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.precondition_ok and not self.violations


def check_inclusions(w: WarpedSpace, a: int, r: float, C: float) -> InclusionReport:
    """Verify that base and warped balls around ``a`` nest both ways.

    With s = d-hat(a, ∞) and r <= s / C, membership is compared point by
    point for

        B_d(a, (r/s^2) C/(C+1))  ⊆  B_dhat(a, r)  ⊆  B_d(a, (r/s^2) 4C/(C-1))

    in both the open and the closed variant.  Set membership on finite data
    is exact, so comparisons are strict/non-strict with no tolerance.
    """
    if C <= 1:
        raise ValueError("C must exceed 1")
    if not (0 <= a < w.base.n):
        raise ValueError("center must be a base point")
    s = float(w.h[a])  # d-hat(a, ∞)
    inner = (r / (s * s)) * (C / (C + 1.0))
    outer = (r / (s * s)) * (4.0 * C / (C - 1.0))
    if r > s / C:
        return InclusionReport(a, r, C, False, inner, outer, (),
                               message="precondition failed: r exceeds d-hat(a, ∞)/C")
    base_row = w.base.dist[a]
    hat_row = w.warped.dist[a, : w.base.n]
    violations = []
    for closed in (False, True):
        if closed:
            in_inner = base_row <= inner
            in_hat = hat_row <= r
            in_outer = base_row <= outer
        else:
            in_inner = base_row < inner
            in_hat = hat_row < r
            in_outer = base_row < outer
        for i in np.nonzero(in_inner & ~in_hat)[0]:
            violations.append(("inner", bool(closed), int(i)))
        for i in np.nonzero(in_hat & ~in_outer)[0]:
            violations.append(("outer", bool(closed), int(i)))
    return InclusionReport(a, r, C, True, inner, outer, tuple(violations))
