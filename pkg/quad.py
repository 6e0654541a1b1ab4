"""
Double-exponential (tanh-sinh) quadrature over interval unions
and y-nested two-dimensional domains.

Integrands may ask for endpoint offsets (with_offsets=True); singular
weight factors are then built from distances, which stay accurate where
x itself rounds onto an endpoint.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Tuple

import numpy as np
from scipy.special import expit

import config
from errors import InvalidParameters, NoConvergence, QuadratureFailure

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2.0
T_MAX = 6.0
FIRST_LEVEL = 2


@dataclass(frozen=True)
class QuadratureSpec:
    rule: str = "double_exponential"
    level_max: int = config.QUAD_LEVEL_MAX
    abs_tol: float = config.QUAD_ABS_TOL
    rel_tol: float = config.QUAD_REL_TOL

    def __post_init__(self):
        if self.rule != "double_exponential":
            raise InvalidParameters(f"unsupported rule '{self.rule}'")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise InvalidParameters("quadrature tolerances must be positive")
        if self.level_max < FIRST_LEVEL + 1:
            raise InvalidParameters(f"level_max must be at least {FIRST_LEVEL + 1}")

    @classmethod
    def bivariate(cls) -> "QuadratureSpec":
        return cls(
            level_max=config.BIV_QUAD_LEVEL_MAX,
            abs_tol=config.BIV_QUAD_ABS_TOL,
            rel_tol=config.BIV_QUAD_REL_TOL,
        )


@dataclass(frozen=True)
class IntervalUnion:
    """Ascending, pairwise disjoint closed intervals (touching ends allowed)"""

    segments: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        segments = tuple((float(lo), float(hi)) for lo, hi in self.segments)
        object.__setattr__(self, "segments", segments)
        for lo, hi in segments:
            if not lo < hi:
                raise InvalidParameters(f"empty segment [{lo}, {hi}]")
        for (_, hi), (lo, _) in zip(segments, segments[1:]):
            if lo < hi:
                raise InvalidParameters("segments must be ascending and disjoint")

    @classmethod
    def symmetric(cls, inner: float, outer: float) -> "IntervalUnion":
        """[-outer, -inner] U [inner, outer]; merges at inner = 0, empty if inner >= outer"""
        inner, outer = abs(inner), abs(outer)
        if inner >= outer:
            return cls(())
        if inner == 0.0:
            return cls(((-outer, 0.0), (0.0, outer)))
        return cls(((-outer, -inner), (inner, outer)))

    def __iter__(self) -> Iterator[Tuple[float, float]]:
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def length(self) -> float:
        return sum(hi - lo for lo, hi in self.segments)

    def contains(self, x: float, interior: bool = False) -> bool:
        for lo, hi in self.segments:
            if interior and lo < x < hi:
                return True
            if not interior and lo <= x <= hi:
                return True
        return False


@dataclass(frozen=True)
class BivDomain:
    """{(x, y): y in y_support, x in x_support_of(y)}"""

    y_support: IntervalUnion
    x_support_of: Callable[[float], IntervalUnion]
    triangles: Tuple[Tuple[Tuple[float, float], ...], ...] = field(default=())

    def contains(self, x: float, y: float, interior: bool = False) -> bool:
        if not self.y_support.contains(y, interior):
            return False
        return self.x_support_of(y).contains(x, interior)

    @property
    def area(self) -> float:
        return sum(_triangle_area(t) for t in self.triangles)


def _triangle_area(vertices) -> float:
    (x1, y1), (x2, y2), (x3, y3) = vertices
    return abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)) / 2.0


@dataclass
class QuadResult:
    value: object
    err_est: float
    converged: bool
    level: int
    evaluations: int = 0

    def __iter__(self):
        yield self.value
        yield self.err_est


def boundary_distances(lo: float, hi: float, lo_off, hi_off):
    """
    Map segment offsets to (distance to the endpoint of smaller |x|,
    distance to the endpoint of larger |x|) for segments not crossing 0.
    """
    if lo >= 0.0:
        return lo_off, hi_off
    if hi <= 0.0:
        return hi_off, lo_off
    raise QuadratureFailure(f"segment [{lo}, {hi}] straddles the origin")


def _level_nodes(level: int, half_length: float, only_new: bool):
    """
    Unit tanh-sinh nodes at step h = 2^-level on one side (t > 0),
    as (small offset, large offset, weight without the h factor).
    """
    h = 2.0 ** -level
    count = int(T_MAX / h)
    k = np.arange(1, count + 1)
    if only_new:
        k = k[k % 2 == 1]
    t = k * h
    s = HALF_PI * np.sinh(t)
    near = 2.0 * half_length * expit(-2.0 * s)
    far = 2.0 * half_length - near
    weight = HALF_PI * np.cosh(t) * 4.0 * expit(2.0 * s) * expit(-2.0 * s) * half_length
    keep = (near > 0.0) & (weight > 0.0)
    return near[keep], far[keep], weight[keep]


def _segment_nodes(lo: float, hi: float, level: int, only_new: bool):
    half = 0.5 * (hi - lo)
    near, far, weight = _level_nodes(level, half, only_new)
    # near hi: x = hi - near; near lo: x = lo + near
    x = np.concatenate([hi - near, lo + near])
    lo_off = np.concatenate([far, near])
    hi_off = np.concatenate([near, far])
    w = np.concatenate([weight, weight])
    if not only_new:
        x = np.append(x, lo + half)
        lo_off = np.append(lo_off, half)
        hi_off = np.append(hi_off, half)
        w = np.append(w, HALF_PI * half)
    return x, lo_off, hi_off, w


def _call(f, x, lo_off, hi_off, with_offsets: bool) -> np.ndarray:
    values = f(x, lo_off, hi_off) if with_offsets else f(x)
    values = np.asarray(values, dtype=float)
    if values.ndim == 0:
        values = np.full(x.shape, float(values))
    if not np.all(np.isfinite(values)):
        raise QuadratureFailure("integrand returned non-finite values")
    return values.reshape(-1, x.size)


def _norm(value) -> float:
    return float(np.max(np.abs(value))) if np.size(value) else 0.0


def integrate_segment(
    f: Callable, lo: float, hi: float, spec: QuadratureSpec, with_offsets: bool = False
) -> QuadResult:
    """Level-doubling tanh-sinh on one segment; vector-valued integrands allowed"""
    x, lo_off, hi_off, w = _segment_nodes(lo, hi, FIRST_LEVEL, only_new=False)
    raw = _call(f, x, lo_off, hi_off, with_offsets) @ w
    evaluations = x.size
    previous = raw * 2.0 ** -FIRST_LEVEL
    err = math.inf
    for level in range(FIRST_LEVEL + 1, spec.level_max + 1):
        x, lo_off, hi_off, w = _segment_nodes(lo, hi, level, only_new=True)
        if x.size:
            raw = raw + _call(f, x, lo_off, hi_off, with_offsets) @ w
        evaluations += x.size
        current = raw * 2.0 ** -level
        err = _norm(current - previous)
        if err <= max(spec.abs_tol, spec.rel_tol * _norm(current)):
            return QuadResult(current, err, True, level, evaluations)
        previous = current
    return QuadResult(previous, err, False, spec.level_max, evaluations)


def _finish(result: QuadResult, scalar: bool, strict: bool, what: str) -> QuadResult:
    if scalar:
        result.value = float(np.asarray(result.value).reshape(-1)[0])
    if not result.converged:
        logger.warning(
            f"{what}: no convergence at level {result.level} (err_est={result.err_est:.3e})"
        )
        if strict:
            raise NoConvergence(result.value, result.err_est, result.level)
    return result


def integrate_union(
    f: Callable,
    u: IntervalUnion,
    spec: Optional[QuadratureSpec] = None,
    with_offsets: bool = False,
    strict: bool = False,
    scalar: Optional[bool] = None,
    distances: bool = False,
) -> QuadResult:
    """
    Sum of per-segment tanh-sinh integrals.
    f(x), f(x, lo_off, hi_off) or, with distances=True, f(x, d_small, d_large)
    returns values with trailing axis over x.
    """
    spec = spec or QuadratureSpec()
    total, err, converged, level, evaluations = 0.0, 0.0, True, 0, 0
    shape = None
    for lo, hi in u:
        g = f
        if distances:
            g = lambda x, a, b, lo=lo, hi=hi: f(x, *boundary_distances(lo, hi, a, b))
        part = integrate_segment(g, lo, hi, spec, with_offsets or distances)
        total = total + part.value
        err += part.err_est
        converged = converged and part.converged
        level = max(level, part.level)
        evaluations += part.evaluations
        shape = np.shape(part.value)
    if scalar is None:
        scalar = shape is None or shape == (1,)
    result = QuadResult(np.asarray(total, dtype=float), err, converged, level, evaluations)
    return _finish(result, scalar, strict, "integrate_union")


def integrate_biv(
    f: Callable,
    d: BivDomain,
    spec: Optional[QuadratureSpec] = None,
    inner_spec: Optional[QuadratureSpec] = None,
    with_offsets: bool = False,
    strict: bool = False,
) -> QuadResult:
    """
    Iterated integral: outer over d.y_support, inner over d.x_support_of(y).
    With offsets, f receives (x, y, dx_small, dx_large, dy_small, dy_large).
    Inner error estimates are integrated along y and added to the outer one.
    """
    spec = spec or QuadratureSpec.bivariate()
    inner_spec = inner_spec or spec
    width = [None]
    inner_failures = [0]

    def outer(ys, y_lo_off, y_hi_off, lo, hi):
        dy_small, dy_large = boundary_distances(lo, hi, y_lo_off, y_hi_off)
        columns = []
        for y, ds, dl in zip(ys, dy_small, dy_large):
            support = d.x_support_of(y)

            def inner(xs, x_lo_off, x_hi_off, seg):
                dx_small, dx_large = boundary_distances(seg[0], seg[1], x_lo_off, x_hi_off)
                if with_offsets:
                    return f(xs, y, dx_small, dx_large, ds, dl)
                return f(xs, y)

            value, err = 0.0, 0.0
            for seg in support:
                part = integrate_segment(
                    lambda xs, a, b, seg=seg: inner(xs, a, b, seg),
                    seg[0], seg[1], inner_spec, with_offsets=True,
                )
                value = value + part.value
                err += part.err_est
                if not part.converged:
                    inner_failures[0] += 1
            if width[0] is None and np.ndim(value):
                width[0] = np.size(value)
            columns.append(np.append(np.atleast_1d(value), err))
        if not columns:
            return np.zeros((1, 0))
        n = width[0] or 1
        stacked = []
        for col in columns:
            if col.size != n + 1:
                col = np.append(np.zeros(n), col[-1])
            stacked.append(col)
        return np.array(stacked).T

    total, err, converged, level, evaluations = 0.0, 0.0, True, 0, 0
    for lo, hi in d.y_support:
        part = integrate_segment(
            lambda ys, a, b, lo=lo, hi=hi: outer(ys, a, b, lo, hi),
            lo, hi, spec, with_offsets=True,
        )
        values = np.asarray(part.value, dtype=float)
        total = total + values[:-1]
        err += part.err_est + abs(float(values[-1]))
        converged = converged and part.converged
        level = max(level, part.level)
        evaluations += part.evaluations
    if inner_failures[0]:
        logger.warning(f"integrate_biv: {inner_failures[0]} inner integrals did not converge")
    scalar = np.size(total) == 1
    result = QuadResult(np.asarray(total, dtype=float), err, converged, level, evaluations)
    return _finish(result, scalar, strict, "integrate_biv")


def gram_from_values(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Stacked upper-triangle products v_i v_j w, shape (m(m+1)/2, npts)"""
    m = values.shape[0]
    rows, cols = np.triu_indices(m)
    return values[rows] * values[cols] * weights


def unpack_gram(flat: np.ndarray, m: int) -> np.ndarray:
    gram = np.zeros((m, m))
    rows, cols = np.triu_indices(m)
    gram[rows, cols] = flat
    gram[cols, rows] = flat
    return gram


def sample_interior(u: IntervalUnion, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform interior points of an interval union"""
    lengths = np.array([hi - lo for lo, hi in u])
    picks = rng.choice(len(lengths), size=count, p=lengths / lengths.sum())
    fractions = rng.uniform(0.0, 1.0, size=count)
    fractions = np.clip(fractions, 1e-9, 1 - 1e-9)
    lows = np.array([lo for lo, _ in u])[picks]
    return lows + fractions * lengths[picks]
