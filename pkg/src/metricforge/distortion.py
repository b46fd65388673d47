"""Cross-ratios, triple/quadruple distortion envelopes, and the
plane-to-sphere chordal comparison.

Distortion profiling is exhaustive on small spaces (every ordered tuple of
distinct indices) and seeded-uniform above the cutoff.  Envelopes are
binned by the input ratio on a fixed log grid with explicit under/overflow
bins, so out-of-range tuples are recorded rather than dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .space import FiniteMetricSpace

BIN_LO, BIN_HI, BIN_COUNT = 1e-4, 1e4, 48
EXHAUSTIVE_TRIPLE_CUTOFF = 60
EXHAUSTIVE_QUAD_CUTOFF = 30
DEFAULT_SAMPLES = 1_000_000

_EDGES = np.logspace(math.log10(BIN_LO), math.log10(BIN_HI), BIN_COUNT + 1)


def cross_ratio(m: FiniteMetricSpace, x: int, y: int, z: int, w: int) -> float:
    """d(x,z) d(y,w) / (d(x,w) d(y,z)) for four distinct points."""
    if len({x, y, z, w}) != 4:
        raise ValueError("cross ratio needs four distinct points")
    denom = m.dist[x, w] * m.dist[y, z]
    if denom == 0.0:
        raise ValueError("cross ratio undefined: coincident points give a zero denominator")
    return float(m.dist[x, z] * m.dist[y, w] / denom)


@dataclass(frozen=True)
class ClaimCheck:
    """Pointwise comparison of outputs against a claimed gauge bound."""

    description: str
    passed: bool
    worst_ratio: float               # max over tuples of out / claimed(t_in)
    worst_witness: tuple | None      # (indices, t_in, t_out)


@dataclass(frozen=True)
class DistortionProfile:
    """Per-bin max output ratio keyed by input ratio.

    ``envelope[b]`` is the exact max output over evaluated tuples whose
    input ratio fell in bin b (nan when empty); ``envelope_input[b]`` is the
    input ratio of a tuple attaining that max.  Bins 0 and -1 catch under-
    and overflow.
    """

    kind: str
    bin_edges: tuple
    envelope: tuple
    envelope_input: tuple
    counts: tuple
    skipped_degenerate: int
    exhaustive: bool
    seed: int
    claim: ClaimCheck | None = None

    def nonempty_bins(self):
        return [b for b, c in enumerate(self.counts) if c > 0]


def _check_mapping(src, dst, mapping):
    f = np.asarray([int(v) for v in mapping], dtype=int)
    if f.shape != (src.n,):
        raise ValueError("mapping must assign a destination index to every source point")
    if len(np.unique(f)) != src.n:
        raise ValueError("mapping must be injective")
    if f.min() < 0 or f.max() >= dst.n:
        raise ValueError("mapping hits out-of-range destination indices")
    return f


def _exhaustive_tuples(n, arity):
    grids = np.meshgrid(*[np.arange(n)] * arity, indexing="ij")
    cols = [g.ravel() for g in grids]
    mask = np.ones(cols[0].shape, dtype=bool)
    for i in range(arity):
        for j in range(i + 1, arity):
            mask &= cols[i] != cols[j]
    return np.stack([c[mask] for c in cols], axis=1)


def _profile(kind, src, dst, mapping, ratio_fn, n_samples, seed,
             exhaustive_cutoff, claimed, claimed_desc):
    f = _check_mapping(src, dst, mapping)
    arity = 3 if kind == "QS" else 4
    nbins = BIN_COUNT + 2
    env = np.full(nbins, -np.inf)
    env_in = np.full(nbins, -np.inf)
    counts = np.zeros(nbins, dtype=np.int64)
    skipped = 0
    worst_ratio = -np.inf
    worst_witness = None
    exhaustive = src.n <= exhaustive_cutoff

    def absorb(tuples):
        nonlocal worst_ratio, worst_witness
        if tuples.shape[0] == 0:
            return
        t_in, t_out = ratio_fn(tuples, f)
        slots = np.searchsorted(_EDGES, t_in, side="right")
        np.add.at(counts, slots, 1)
        np.maximum.at(env, slots, t_out)
        # Rows attaining the (possibly new) bin max replace the recorded
        # attaining input; bins whose max came from an earlier batch keep it.
        hit = t_out == env[slots]
        scratch = np.full(nbins, -np.inf)
        np.maximum.at(scratch, slots[hit], t_in[hit])
        touched = scratch > -np.inf
        env_in[touched] = scratch[touched]
        if claimed is not None:
            bound = claimed(t_in)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = t_out / bound
            k = int(np.argmax(ratio))
            if ratio[k] > worst_ratio:
                worst_ratio = float(ratio[k])
                worst_witness = (tuple(int(v) for v in tuples[k]),
                                 float(t_in[k]), float(t_out[k]))

    if exhaustive:
        tuples = _exhaustive_tuples(src.n, arity)
        absorb(tuples)
    else:
        rng = np.random.default_rng(seed)
        done = 0
        while done < n_samples:
            batch = min(200_000, n_samples - done)
            draw = rng.integers(0, src.n, size=(batch, arity))
            ok = np.ones(batch, dtype=bool)
            for i in range(arity):
                for j in range(i + 1, arity):
                    ok &= draw[:, i] != draw[:, j]
            skipped += int((~ok).sum())
            draw = draw[ok]
            if draw.shape[0]:
                absorb(draw)
            done += batch

    claim = None
    if claimed is not None:
        claim = ClaimCheck(
            description=claimed_desc or "claimed gauge",
            passed=bool(worst_ratio <= 1.0),
            worst_ratio=float(worst_ratio),
            worst_witness=worst_witness,
        )
    env_out = tuple(float(v) if np.isfinite(v) else math.nan for v in env)
    env_in_out = tuple(float(v) if np.isfinite(v) else math.nan for v in env_in)
    return DistortionProfile(
        kind=kind,
        bin_edges=tuple(float(e) for e in _EDGES),
        envelope=env_out,
        envelope_input=env_in_out,
        counts=tuple(int(c) for c in counts),
        skipped_degenerate=skipped,
        exhaustive=exhaustive,
        seed=seed,
        claim=claim,
    )


def qs_profile(src: FiniteMetricSpace, dst: FiniteMetricSpace, mapping,
               n_samples: int = DEFAULT_SAMPLES, seed: int = 0,
               claimed=None, claimed_desc: str = "") -> DistortionProfile:
    """Triple-distortion envelope: out-ratio of (a,b,c) binned by in-ratio.

    The input ratio is d(a,b)/d(a,c); the output ratio is the same quotient
    after applying the injective index ``mapping`` into ``dst``.  A claimed
    gauge (callable on arrays) is checked pointwise over every evaluated
    tuple, worst witness recorded.
    """
    Ds, Dd = src.dist, dst.dist

    def ratios(tuples, f):
        a, b, c = tuples[:, 0], tuples[:, 1], tuples[:, 2]
        t_in = Ds[a, b] / Ds[a, c]
        t_out = Dd[f[a], f[b]] / Dd[f[a], f[c]]
        return t_in, t_out

    return _profile("QS", src, dst, mapping, ratios, n_samples, seed,
                    EXHAUSTIVE_TRIPLE_CUTOFF, claimed, claimed_desc)


def qm_profile(src: FiniteMetricSpace, dst: FiniteMetricSpace, mapping,
               n_samples: int = DEFAULT_SAMPLES, seed: int = 0,
               claimed=None, claimed_desc: str = "") -> DistortionProfile:
    """Quadruple-distortion envelope keyed by the source cross-ratio."""
    Ds, Dd = src.dist, dst.dist

    def ratios(tuples, f):
        x, y, z, w = (tuples[:, k] for k in range(4))
        t_in = Ds[x, z] * Ds[y, w] / (Ds[x, w] * Ds[y, z])
        fx, fy, fz, fw = f[x], f[y], f[z], f[w]
        t_out = Dd[fx, fz] * Dd[fy, fw] / (Dd[fx, fw] * Dd[fy, fz])
        return t_in, t_out

    return _profile("QM", src, dst, mapping, ratios, n_samples, seed,
                    EXHAUSTIVE_QUAD_CUTOFF, claimed, claimed_desc)


def linear_gauge(coefficient: float):
    """The gauge t -> coefficient * t as an array-ready callable."""
    c = float(coefficient)
    return lambda t: c * np.asarray(t)


# ---------------------------------------------------------------------------
# Stereographic projection and the chordal comparison
# ---------------------------------------------------------------------------

def stereographic(xy) -> np.ndarray:
    """Map plane points onto the unit sphere punctured at the north pole.

    (0,0) goes to the south pole and |x| -> inf approaches (0,0,1); the
    output rows are unit vectors.  Accepts a single pair or an (N, 2) array.
    """
    pts = np.asarray(xy, dtype=np.float64)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    r2 = (pts ** 2).sum(axis=1)
    denom = 1.0 + r2
    out = np.stack([2.0 * pts[:, 0] / denom,
                    2.0 * pts[:, 1] / denom,
                    (r2 - 1.0) / denom], axis=1)
    return out[0] if single else out


def chordal(xy_a, xy_b) -> np.ndarray | float:
    """Euclidean gap between the spherical images of two plane point sets."""
    sa, sb = stereographic(xy_a), stereographic(xy_b)
    d = np.linalg.norm(np.atleast_2d(sa) - np.atleast_2d(sb), axis=1)
    return float(d[0]) if np.asarray(xy_a).ndim == 1 else d


def plane_sphere_ratios(xy_a, xy_b) -> np.ndarray:
    """Two-sided ratio between the chordal gap and the flat rescaled gap.

    The flat form |x - y| / ((1 + |x|)(1 + |y|)) and the chordal distance
    differ by a factor that never leaves [1/4, 4]; this returns the
    pointwise max of the two quotients for each pair.
    """
    a = np.atleast_2d(np.asarray(xy_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(xy_b, dtype=np.float64))
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    flat = np.linalg.norm(a - b, axis=1) / ((1.0 + na) * (1.0 + nb))
    chord = np.linalg.norm(stereographic(a) - stereographic(b), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.maximum(chord / flat, flat / chord)
    return out


def check_plane_to_sphere_L(points) -> float:
    """Worst two-sided ratio over all distinct pairs of a planar sample."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("need at least two planar points")
    ii, jj = np.triu_indices(len(pts), 1)
    gaps = np.linalg.norm(pts[ii] - pts[jj], axis=1)
    keep = gaps > 0
    if not keep.any():
        raise ValueError("all points coincide")
    return float(plane_sphere_ratios(pts[ii[keep]], pts[jj[keep]]).max())
