"""Quantitative geometry estimators on finite samples.

All constants reported here are greedy, grid-resolved, one-sided bounds:
greedy covers upper-bound both the scaled Hausdorff pre-measure and the
doubling count, and connectivity constants are the smallest grid value at
which every sampled configuration passes.  Everything is deterministic
given (space, seed, grids).

Continua have no finite counterpart; connected subsets of the
delta-proximity graph (points adjacent iff within delta) stand in for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .space import FiniteMetricSpace, sample_scale

DELTA_FACTOR = 2.5      # default proximity scale, in units of sample resolution
RADII_FLOOR = 3.0       # radii below RADII_FLOOR * delta are discretization noise
DEFAULT_LAMBDA_GRID = tuple(2.0 ** (k / 4.0) for k in range(17))  # 1 .. 16


def default_delta(m: FiniteMetricSpace) -> float:
    """Proximity scale: DELTA_FACTOR times the max nearest-neighbor gap."""
    return DELTA_FACTOR * sample_scale(m)


def default_radii(m: FiniteMetricSpace, delta: float, count: int = 8) -> tuple:
    """Log-spaced radii inside [RADII_FLOOR * delta, diam]; empty if that
    window is void (space too sparse for the requested scale)."""
    lo = RADII_FLOOR * delta
    hi = m.diam()
    if hi <= 0 or lo <= 0 or lo >= hi:
        return ()
    return tuple(float(r) for r in np.geomspace(lo, hi, count))


def _pick_centers(m, centers, n_centers, seed):
    if centers is not None:
        return np.asarray([int(c) for c in centers], dtype=int)
    rng = np.random.default_rng(seed)
    k = min(m.n, n_centers)
    return np.sort(rng.choice(m.n, size=k, replace=False))


# ---------------------------------------------------------------------------
# Doubling constant
# ---------------------------------------------------------------------------

def _greedy_cover_count(D, pts, radius, closed=False):
    """Balls of the given radius, centered at pts, needed to cover pts."""
    sub = D[np.ix_(pts, pts)]
    covers = sub <= radius if closed else sub < radius
    uncovered = np.ones(len(pts), dtype=bool)
    count = 0
    while uncovered.any():
        gain = (covers & uncovered[None, :]).sum(axis=1)
        best = int(np.argmax(gain))  # argmax takes the lowest index on ties
        if gain[best] == 0:
            # isolated leftovers each need their own ball
            count += int(uncovered.sum())
            break
        uncovered &= ~covers[best]
        count += 1
    return count


def doubling_constant(m: FiniteMetricSpace, radii=None, centers=None,
                      n_centers: int = 32, seed: int = 0) -> int:
    """Greedy upper bound on the doubling constant over sampled balls.

    For each sampled (a, r), counts the closed (r/2)-balls a greedy cover
    needs for B(a, r).  Covering balls are closed and centered inside the
    ball: on gridded samples, open balls drop entire rings of points lying
    at exactly-representable distances, inflating the count by a
    discretization artifact rather than by geometry.
    """
    if m.n == 1:
        return 1
    delta = default_delta(m)
    if radii is None:
        radii = default_radii(m, delta)
        if not radii:
            radii = (m.diam(),) if m.diam() > 0 else ()
    cs = _pick_centers(m, centers, n_centers, seed)
    best = 1
    for a in cs:
        row = m.dist[a]
        for r in radii:
            if r <= 0:
                raise ValueError("radii must be positive")
            pts = np.nonzero(row < r)[0]
            if pts.size == 0:
                continue
            best = max(best, _greedy_cover_count(m.dist, pts, r / 2.0, closed=True))
    return int(best)


# ---------------------------------------------------------------------------
# Hausdorff pre-measure (scaled greedy cover)
# ---------------------------------------------------------------------------

def _first_fit_cells(m: FiniteMetricSpace, eps: float) -> np.ndarray:
    """Assign each point to a cell of a first-fit eps-net of the space.

    Net centers are kept in index order unless already covered by a kept
    center; every point then belongs to the first kept center whose closed
    eps-ball contains it.  The assignment depends only on (space, eps).
    """
    n = m.n
    covered = np.zeros(n, dtype=bool)
    kept = []
    for c in range(n):
        if not covered[c]:
            kept.append(c)
            covered |= m.dist[c] <= eps
    within = m.dist[np.asarray(kept, dtype=int)] <= eps
    return np.asarray(kept, dtype=int)[np.argmax(within, axis=0)]


def hausdorff_premeasure(m: FiniteMetricSpace, S, Q: float, eps: float,
                         cells: np.ndarray | None = None) -> float:
    """Net-cover bound on the radius-power cover sum of S.

    The value is (distinct first-fit net cells touching S) * eps^Q.  Each
    touched cell center lies within eps of S, so the corresponding closed
    balls are centered in the eps-neighborhood of S and cover it.  Because
    the net is built from the ambient space alone, the estimate is monotone
    in S and subadditive over unions, like the quantity it bounds.
    ``cells`` lets callers evaluating many subsets reuse the assignment
    from :func:`_first_fit_cells`.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    idx = np.asarray(sorted(set(int(i) for i in S)), dtype=int)
    if idx.size == 0:
        raise ValueError("target set must be nonempty")
    if cells is None:
        cells = _first_fit_cells(m, eps)
    return len(np.unique(cells[idx])) * eps ** Q


# ---------------------------------------------------------------------------
# Regularity constant
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegularityReport:
    """Scaling comparison of ball measure against radius^Q."""

    Q: float
    K_hat: float
    M_hat: int
    radii: tuple
    centers: tuple
    worst_witness: tuple | None   # (center, radius, ratio)
    evaluated: int
    infinite: bool                # some evaluated ball had zero measure
    seed: int
    measure: str                  # "mass" or "premeasure"
    eps: float | None = None


def regularity_constant(m: FiniteMetricSpace, Q: float, radii=None, centers=None,
                        n_centers: int = 32, seed: int = 0, eps: float | None = None,
                        with_doubling: bool = True) -> RegularityReport:
    """Estimate the two-sided ball-measure scaling constant.

    The measure proxy is the explicit mass field when present (generated
    spaces know their own density); passing ``eps`` switches to the greedy
    eps-cover pre-measure, which is also the fallback for spaces without
    mass.  K_hat is the max over evaluated (a, r) of
    max(mu(B̄(a,r)) / r^Q, r^Q / mu(B̄(a,r))).
    """
    if eps is None and m.mass is None:
        raise ValueError("regularity needs point masses or an eps cover scale")
    use_premeasure = eps is not None
    delta = default_delta(m)
    if radii is None:
        radii = default_radii(m, delta)
    radii = tuple(float(r) for r in radii)
    cs = _pick_centers(m, centers, n_centers, seed)
    cells = _first_fit_cells(m, eps) if use_premeasure else None
    k_hat = 1.0
    worst = None
    evaluated = 0
    infinite = False
    for a in cs:
        row = m.dist[a]
        for r in radii:
            if r <= 0 or r > m.diam():
                continue
            members = row <= r
            if use_premeasure:
                mu = hausdorff_premeasure(m, np.nonzero(members)[0], Q, eps, cells=cells)
            else:
                mu = float(m.mass[members].sum())
            evaluated += 1
            if mu <= 0.0:
                infinite = True
                worst = (int(a), float(r), math.inf)
                continue
            ratio = max(mu / r ** Q, r ** Q / mu)
            if ratio > k_hat:
                k_hat = ratio
                worst = (int(a), float(r), float(ratio))
    m_hat = doubling_constant(m, radii=radii or None, centers=cs, seed=seed) \
        if with_doubling else 0
    return RegularityReport(
        Q=float(Q),
        K_hat=math.inf if infinite else float(k_hat),
        M_hat=int(m_hat),
        radii=radii,
        centers=tuple(int(c) for c in cs),
        worst_witness=worst,
        evaluated=evaluated,
        infinite=infinite,
        seed=seed,
        measure="premeasure" if use_premeasure else "mass",
        eps=eps,
    )


# ---------------------------------------------------------------------------
# Linear local connectivity on the delta-proximity graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LLCReport:
    """Grid-resolved join-inside-inflated-ball constants.

    ``lambda1``/``lambda2`` are the smallest grid values at which every
    sampled configuration passes (inf when even the grid max fails);
    ``failures1``/``failures2`` hold witnesses (a, r, x, y) at the last
    failing grid value below the reported constant.
    """

    lambda1: float
    lambda2: float
    delta: float
    grid: tuple
    failures1: tuple
    failures2: tuple
    usable: bool
    evaluated1: int
    evaluated2: int
    skipped: int
    centers: tuple
    radii: tuple
    seed: int


def _induced_components(adj: csr_matrix, mask: np.ndarray):
    idx = np.nonzero(mask)[0]
    sub = adj[idx][:, idx]
    _, labels = connected_components(sub, directed=False)
    return idx, labels


def _joined(adj, allowed_mask, members):
    """True iff all ``members`` lie in one component of adj | allowed."""
    idx, labels = _induced_components(adj, allowed_mask)
    pos = np.searchsorted(idx, members)
    return bool(np.all(labels[pos] == labels[pos[0]]))


def _witness_pair(adj, allowed_mask, members):
    idx, labels = _induced_components(adj, allowed_mask)
    pos = np.searchsorted(idx, members)
    lab = labels[pos]
    first = members[0]
    other = members[lab != lab[0]]
    return int(first), int(other[0])


def llc_constants(m: FiniteMetricSpace, delta: float | None = None,
                  lambda_grid=None, centers=None, radii=None,
                  n_centers: int = 32, n_radii: int = 8,
                  seed: int = 0) -> LLCReport:
    """Estimate join-inside (lambda1) and join-outside (lambda2) constants.

    For each sampled center a and radius r, lambda1 asks that all points of
    B(a, r) lie in one component of the delta-graph restricted to B(a, λr);
    lambda2 asks the same of the complement of B(a, r) inside the complement
    of B(a, r/λ).  Configurations with r above the diameter are vacuous for
    lambda2 and skipped; both estimates are monotone along the grid.
    """
    if delta is None:
        delta = default_delta(m)
    if lambda_grid is None:
        lambda_grid = DEFAULT_LAMBDA_GRID
    grid = tuple(float(v) for v in lambda_grid)
    if not grid or grid[0] < 1.0:
        raise ValueError("lambda grid must start at 1.0 or above")
    D = m.dist
    adj = csr_matrix(D <= delta)
    ncomp, _ = connected_components(adj, directed=False)
    cs = _pick_centers(m, centers, n_centers, seed)
    if radii is None:
        radii = default_radii(m, delta, n_radii)
    radii = tuple(float(r) for r in radii)
    if ncomp > 1 or not radii:
        return LLCReport(math.inf, math.inf, float(delta), grid, (), (),
                         usable=False, evaluated1=0, evaluated2=0, skipped=0,
                         centers=tuple(int(c) for c in cs), radii=radii, seed=seed)
    diam = m.diam()

    def run_leg(leg):
        key = 0  # current grid candidate index
        failed_at_max = False
        evaluated = 0
        skipped = 0
        configs = []
        for a in cs:
            row = D[a]
            for r in radii:
                if leg == 1:
                    members = np.nonzero(row < r)[0]
                else:
                    if r > diam:
                        skipped += 1
                        continue
                    members = np.nonzero(row >= r)[0]
                if members.size < 2:
                    skipped += 1
                    continue
                evaluated += 1
                configs.append((int(a), float(r), members))

        def passes(a, r, members, lam):
            if leg == 1:
                allowed = D[a] < lam * r
            else:
                allowed = D[a] >= r / lam
            return _joined(adj, allowed, members)

        for a, r, members in configs:
            if passes(a, r, members, grid[key]):
                continue
            while key < len(grid) and not passes(a, r, members, grid[key]):
                key += 1
            if key == len(grid):
                failed_at_max = True
                key = len(grid) - 1  # keep scanning for the worst witnesses

        value = math.inf if failed_at_max else grid[key]
        # Witnesses at the last failing grid value below the result.
        witness_level = grid[-1] if failed_at_max else (grid[key - 1] if key > 0 else None)
        failures = []
        if witness_level is not None:
            for a, r, members in configs:
                if len(failures) >= 20:
                    break
                if not passes(a, r, members, witness_level):
                    if leg == 1:
                        allowed = D[a] < witness_level * r
                    else:
                        allowed = D[a] >= r / witness_level
                    x, y = _witness_pair(adj, allowed, members)
                    failures.append((a, r, x, y))
        return value, tuple(failures), evaluated, skipped

    lambda1, failures1, ev1, sk1 = run_leg(1)
    lambda2, failures2, ev2, sk2 = run_leg(2)
    return LLCReport(
        lambda1=lambda1, lambda2=lambda2, delta=float(delta), grid=grid,
        failures1=failures1, failures2=failures2, usable=True,
        evaluated1=ev1, evaluated2=ev2, skipped=sk1 + sk2,
        centers=tuple(int(c) for c in cs), radii=radii, seed=seed,
    )


# ---------------------------------------------------------------------------
# Quasicircle criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuasicircleReport:
    """Doubling + connectivity screen for a claimed closed-curve sample.

    The caller asserts the sample traces a closed curve; that claim is not
    verified topologically.  An open arc passes the join-inside leg with a
    small constant, so the join-outside leg is reported too: a gap in the
    curve makes lambda2 blow up, with witnesses at the gap.
    """

    m_hat: int
    lambda1: float
    lambda2: float
    delta: float
    passed: bool
    degenerate: bool
    usable: bool
    failures: tuple


def quasicircle_check(m: FiniteMetricSpace, max_lambda: float = 2.0,
                      max_doubling: int = 8, delta: float | None = None,
                      lambda_grid=None, centers=None, radii=None,
                      n_centers: int = 48, seed: int = 0) -> QuasicircleReport:
    """Screen a closed-curve sample for quasicircle behavior."""
    if m.n < 3:
        return QuasicircleReport(0, math.inf, math.inf, 0.0, passed=False,
                                 degenerate=True, usable=False, failures=())
    if delta is None:
        delta = default_delta(m)
    llc = llc_constants(m, delta=delta, lambda_grid=lambda_grid,
                        centers=centers, radii=radii,
                        n_centers=n_centers, seed=seed)
    m_hat = doubling_constant(m, centers=llc.centers, radii=llc.radii or None,
                              seed=seed)
    passed = (llc.usable and llc.lambda1 <= max_lambda
              and llc.lambda2 <= max_lambda and m_hat <= max_doubling)
    return QuasicircleReport(
        m_hat=m_hat, lambda1=llc.lambda1, lambda2=llc.lambda2,
        delta=float(delta), passed=bool(passed), degenerate=False,
        usable=llc.usable, failures=llc.failures1 + llc.failures2,
    )
