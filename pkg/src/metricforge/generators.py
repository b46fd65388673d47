"""Seeded generators for test-bed metric spaces.

Every generator is deterministic: identical parameters and seed give a
bit-identical space.  Generated spaces always pass ``validate_metric``.
Boundary marks are generator outputs, never inferred afterwards.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse.csgraph import dijkstra
from scipy.spatial.distance import cdist

from .space import FiniteMetricSpace


def _positive(name, value):
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")


def euclidean_grid(side: int, spacing: float) -> FiniteMetricSpace:
    """side x side square grid with the given spacing; mass = spacing^2."""
    _positive("side", side)
    _positive("spacing", spacing)
    ii, jj = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    coords = np.stack([ii.ravel(), jj.ravel()], axis=1).astype(np.float64) * spacing
    labels = tuple(f"g{i}_{j}" for i, j in zip(ii.ravel(), jj.ravel()))
    dist = cdist(coords, coords)
    mass = np.full(len(labels), spacing * spacing)
    return FiniteMetricSpace(labels, dist, coords=coords, mass=mass)


def disk_sample(n: int, radius: float = 1.0, seed: int = 0,
                mark_boundary: bool = False) -> FiniteMetricSpace:
    """Uniform sample of a closed disk; mass = area / n.

    With ``mark_boundary``, points in the outer annulus of width
    2.5 * radius / sqrt(n) (about 2.5 typical spacings) are marked.
    """
    _positive("n", n)
    _positive("radius", radius)
    rng = np.random.default_rng(seed)
    rr = radius * np.sqrt(rng.uniform(size=n))
    th = rng.uniform(0.0, 2.0 * math.pi, size=n)
    coords = np.stack([rr * np.cos(th), rr * np.sin(th)], axis=1)
    dist = cdist(coords, coords)
    labels = tuple(f"p{i}" for i in range(n))
    mass = np.full(n, math.pi * radius * radius / n)
    boundary = None
    if mark_boundary:
        band = 2.5 * radius / math.sqrt(n)
        marked = np.nonzero(rr > radius - band)[0]
        boundary = frozenset(int(i) for i in marked) if marked.size else None
    return FiniteMetricSpace(labels, dist, coords=coords, mass=mass, boundary=boundary)


def disk_grid(spacing: float, radius: float = 1.0,
              mark_boundary: bool = True) -> FiniteMetricSpace:
    """Square-grid sample of a disk; rim ring marked as boundary.

    Grid points with |p| <= radius are kept; the rim is the outermost cell
    ring, |p| > radius - spacing.  mass = spacing^2.
    """
    _positive("spacing", spacing)
    _positive("radius", radius)
    k = int(math.floor(radius / spacing))
    axis = np.arange(-k, k + 1, dtype=np.float64) * spacing
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    norms = np.hypot(pts[:, 0], pts[:, 1])
    keep = norms <= radius
    coords = pts[keep]
    norms = norms[keep]
    labels = tuple(f"d{i}" for i in range(len(coords)))
    dist = cdist(coords, coords)
    mass = np.full(len(coords), spacing * spacing)
    boundary = None
    if mark_boundary:
        rim = np.nonzero(norms > radius - spacing)[0]
        boundary = frozenset(int(i) for i in rim)
    return FiniteMetricSpace(labels, dist, coords=coords, mass=mass, boundary=boundary)


def sphere_cap_complement(eps: float, n: int, seed: int = 0) -> FiniteMetricSpace:
    """Chordal-metric sample of the unit sphere minus a closed cap.

    The cap is centered at the north pole with chordal radius ``eps``.  The
    cap rim (the boundary circle of the remaining space) is sampled by
    explicitly placed, equally spaced points, marked as the boundary;
    interior points are uniform on the complement, kept clear of the rim so
    the marked set is exactly the points on the rim.
    """
    _positive("eps", eps)
    _positive("n", n)
    if eps >= 2.0:
        raise ValueError("eps must be below the sphere diameter 2")
    if n < 16:
        raise ValueError("n must be at least 16 to sample both rim and interior")
    rng = np.random.default_rng(seed)
    pole = np.array([0.0, 0.0, 1.0])
    z0 = 1.0 - eps * eps / 2.0                 # rim plane height
    rho0 = eps * math.sqrt(1.0 - eps * eps / 4.0)  # rim circle radius
    h = math.sqrt(4.0 * math.pi / n)           # area-per-point length scale
    m_rim = max(8, int(math.ceil(2.0 * math.pi * rho0 / (h / 2.0))))
    m_rim = min(m_rim, max(8, n // 3))
    th = 2.0 * math.pi * np.arange(m_rim) / m_rim
    rim = np.stack([rho0 * np.cos(th), rho0 * np.sin(th), np.full(m_rim, z0)], axis=1)

    clearance = max(h / 4.0, 0.021)
    interior = []
    need = n - m_rim
    while len(interior) < need:
        batch = rng.normal(size=(4 * max(need, 32), 3))
        batch /= np.linalg.norm(batch, axis=1, keepdims=True)
        chordal_pole = np.linalg.norm(batch - pole, axis=1)
        planar = np.hypot(batch[:, 0], batch[:, 1])
        rim_gap = np.hypot(planar - rho0, batch[:, 2] - z0)
        ok = (chordal_pole > eps) & (rim_gap > clearance)
        for row in batch[ok]:
            interior.append(row)
            if len(interior) >= need:
                break
    coords = np.vstack([rim, np.asarray(interior).reshape(need, 3)])
    labels = tuple([f"r{i}" for i in range(m_rim)]
                   + [f"p{i}" for i in range(need)])
    dist = cdist(coords, coords)
    area = 4.0 * math.pi - math.pi * eps * eps  # cap area is pi * eps^2
    mass = np.full(n, area / n)
    return FiniteMetricSpace(labels, dist, coords=coords, mass=mass,
                             boundary=frozenset(range(m_rim)))


def halfplane_sample(n: int, seed: int = 0, width: float = 2.0,
                     height: float = 1.0) -> FiniteMetricSpace:
    """Uniform sample of an open half-plane strip [-w/2, w/2] x (0, h]."""
    _positive("n", n)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-width / 2.0, width / 2.0, size=n)
    y = rng.uniform(0.0, height, size=n)
    y = np.maximum(y, 1e-12)  # keep strictly inside the open half-plane
    coords = np.stack([x, y], axis=1)
    dist = cdist(coords, coords)
    labels = tuple(f"p{i}" for i in range(n))
    mass = np.full(n, width * height / n)
    return FiniteMetricSpace(labels, dist, coords=coords, mass=mass)


def random_metric(n: int, seed: int = 0, edge_density: float = 0.35) -> FiniteMetricSpace:
    """Shortest-path metric of a random weighted graph on n vertices.

    A random Hamiltonian path keeps the graph connected; extra edges appear
    with the given density.  Weights are uniform in [0.5, 2], so distances
    are strictly positive and the shortest-path closure is a metric.
    """
    _positive("n", n)
    rng = np.random.default_rng(seed)
    w = np.zeros((n, n))
    if n > 1:
        perm = rng.permutation(n)
        pw = rng.uniform(0.5, 2.0, size=n - 1)
        w[perm[:-1], perm[1:]] = pw
        w[perm[1:], perm[:-1]] = pw
        extra = np.triu(rng.uniform(size=(n, n)) < edge_density, 1)
        ew = rng.uniform(0.5, 2.0, size=(n, n))
        keep = extra & (w == 0)
        w[keep] = ew[keep]
        w = np.maximum(w, w.T)
    dist = dijkstra(w, directed=False)
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    labels = tuple(f"p{i}" for i in range(n))
    return FiniteMetricSpace(labels, dist)


_KINDS = {
    "grid": lambda p: euclidean_grid(int(p["side"]), float(p["spacing"])),
    "disk": lambda p: disk_sample(int(p["n"]), float(p.get("radius", 1.0)),
                                  int(p.get("seed", 0)), bool(p.get("mark_boundary", False))),
    "disk-grid": lambda p: disk_grid(float(p["spacing"]), float(p.get("radius", 1.0)),
                                     bool(p.get("mark_boundary", True))),
    "sphere-cap": lambda p: sphere_cap_complement(float(p["eps"]), int(p["n"]),
                                                  int(p.get("seed", 0))),
    "halfplane": lambda p: halfplane_sample(int(p["n"]), int(p.get("seed", 0)),
                                            float(p.get("width", 2.0)),
                                            float(p.get("height", 1.0))),
    "random-metric": lambda p: random_metric(int(p["n"]), int(p.get("seed", 0)),
                                             float(p.get("edge_density", 0.35))),
}


def generate(kind: str, **params) -> FiniteMetricSpace:
    """Dispatch a generator by kind name (the CLI entry point)."""
    if kind not in _KINDS:
        raise ValueError(f"unknown generator kind {kind!r}; known: {sorted(_KINDS)}")
    try:
        return _KINDS[kind](params)
    except KeyError as exc:
        raise ValueError(f"generator {kind!r} is missing parameter {exc}") from None
