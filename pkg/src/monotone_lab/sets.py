"""Compact convex sets: polytopes, norm balls, and capsules.

Each set exposes its support function, a deterministic support argmax,
Euclidean projection, and distances under any of the three norms.
Half-space representations are deliberately absent; everything the
package needs is a vertex list, a ball, or a segment fattened by a ball
(capsule).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solvers import nearest_hull_point, project_ball, subgradient_descent
from .spaces import NormTag, norm_subgradient, vector_norm

_LEX_TOL = 1e-12


def _lex_smallest(points: np.ndarray) -> np.ndarray:
    """Lexicographically smallest row of ``points``."""
    order = np.lexsort(points.T[::-1])
    return points[order[0]]


@dataclass(frozen=True)
class CompactConvexSet:
    """Base for the three variants.  ``side`` marks primal vs dual ambient."""

    side: str = "primal"

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def support(self, y: np.ndarray) -> float:
        """sup over the set of <., y>."""
        raise NotImplementedError

    def argmax_support(self, y: np.ndarray) -> np.ndarray:
        """A deterministic maximizer of <., y> over the set."""
        raise NotImplementedError

    def project(self, y: np.ndarray) -> np.ndarray:
        """Euclidean projection of ``y`` onto the set."""
        raise NotImplementedError

    def contains(self, y: np.ndarray, tol: float = 1e-9) -> bool:
        y = self._check(y)
        return self.dist(y, NormTag.L2) <= tol

    def dist(self, y: np.ndarray, norm: NormTag = NormTag.L2) -> float:
        """inf over the set of ||y - z||_norm.

        Exact via Euclidean projection when norm is l2; under l1/linf a
        projected subgradient descent reports the best bound found.
        """
        y = self._check(y)
        if norm is NormTag.L2:
            return float(np.linalg.norm(y - self.project(y)))
        p0 = self.project(y)

        def obj(z: np.ndarray) -> float:
            return vector_norm(y - z, norm)

        def sub(z: np.ndarray) -> np.ndarray:
            return -norm_subgradient(y - z, norm)

        scale = max(1.0, float(np.linalg.norm(y - p0)))
        _, best, _ = subgradient_descent(
            obj, sub, [p0], step_scale=0.3 * scale, max_steps=3000,
            project=self.project,
        )
        return min(best, obj(p0))

    def interior_contains(self, y: np.ndarray, tol: float = 1e-9) -> bool:
        """True if ``y`` is in the interior, up to a probe width of ~tol.

        For balls this is exact; for polytopes it probes the 2n axis
        perturbations, which is correct for full-dimensional hulls.
        """
        y = self._check(y)
        if not self.contains(y, tol):
            return False
        delta = 16 * max(tol, 1e-9)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = delta
            if not (self.contains(y + e, tol) and self.contains(y - e, tol)):
                return False
        return True

    def _check(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float).ravel()
        if y.shape != (self.dim,):
            raise ValueError(f"point has shape {y.shape}, expected ({self.dim},)")
        return y


@dataclass(frozen=True)
class Polytope(CompactConvexSet):
    """Convex hull of a nonempty finite vertex list."""

    vertices: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        V = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if V.size == 0:
            raise ValueError("polytope needs at least one vertex")
        object.__setattr__(self, "vertices", V)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def support(self, y: np.ndarray) -> float:
        y = self._check(y)
        return float(np.max(self.vertices @ y))

    def argmax_support(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        vals = self.vertices @ y
        top = float(np.max(vals))
        scale = max(1.0, float(np.max(np.abs(vals))))
        ties = self.vertices[vals >= top - _LEX_TOL * scale]
        return _lex_smallest(ties).copy()

    def project(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        return nearest_hull_point(self.vertices, y)


def interval(lo: float, hi: float, side: str = "primal") -> Polytope:
    """The 1-D polytope [lo, hi]."""
    return Polytope(side=side, vertices=np.array([[float(lo)], [float(hi)]]))


def singleton(point: np.ndarray, side: str = "primal") -> Polytope:
    return Polytope(side=side, vertices=np.atleast_2d(np.asarray(point, float)))


def box(lo: np.ndarray, hi: np.ndarray, side: str = "primal") -> Polytope:
    """Axis-aligned box as an explicit vertex list."""
    lo = np.asarray(lo, float).ravel()
    hi = np.asarray(hi, float).ravel()
    n = lo.size
    corners = []
    for mask in range(2**n):
        v = np.where([(mask >> i) & 1 for i in range(n)], hi, lo)
        corners.append(v)
    return Polytope(side=side, vertices=np.array(corners))


@dataclass(frozen=True)
class Ball(CompactConvexSet):
    """Norm ball {x : ||x - center||_norm <= radius}."""

    center: np.ndarray = None  # type: ignore[assignment]
    radius: float = 0.0
    norm: NormTag = NormTag.L2

    def __post_init__(self) -> None:
        c = np.asarray(self.center, dtype=float).ravel()
        object.__setattr__(self, "center", c)
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")

    @property
    def dim(self) -> int:
        return self.center.size

    def support(self, y: np.ndarray) -> float:
        y = self._check(y)
        return float(self.center @ y) + self.radius * vector_norm(
            y, self.norm.dual()
        )

    def argmax_support(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        return self.center + self.radius * _dual_unit(y, self.norm)

    def project(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        if self.norm is NormTag.L2:
            return self.center + project_ball(
                y - self.center, self.radius, "l2"
            )
        kind = "linf" if self.norm is NormTag.LINF else "l1"
        return self.center + project_ball(y - self.center, self.radius, kind)

    def contains(self, y: np.ndarray, tol: float = 1e-9) -> bool:
        y = self._check(y)
        return vector_norm(y - self.center, self.norm) <= self.radius + tol

    def dist(self, y: np.ndarray, norm: NormTag = NormTag.L2) -> float:
        y = self._check(y)
        if norm is self.norm:
            return max(0.0, vector_norm(y - self.center, norm) - self.radius)
        return super().dist(y, norm)

    def interior_contains(self, y: np.ndarray, tol: float = 1e-9) -> bool:
        y = self._check(y)
        return (
            self.radius > 0
            and vector_norm(y - self.center, self.norm) < self.radius - tol
        )


def _dual_unit(y: np.ndarray, ball_norm: NormTag) -> np.ndarray:
    """A unit vector u of the ball's norm with <u, y> = ||y||_dual.

    Deterministic tie rule: lexicographically smallest maximizer (zero
    coordinates map to -1 under linf-type attainment; the first max-abs
    index wins for l1-type attainment).
    """
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        return np.zeros_like(y)
    if ball_norm is NormTag.L2:
        n = np.linalg.norm(y)
        if n == 0.0:  # subnormal entries can underflow the norm
            return np.zeros_like(y)
        return y / n
    if ball_norm is NormTag.LINF:
        # support is r*||y||_1, attained at sign pattern; break 0-ties low
        u = np.sign(y)
        u[u == 0] = -1.0
        return u
    # l1 ball: support is r*||y||_inf, attained at +-e_i on a max-abs index
    a = np.abs(y)
    top = float(np.max(a))
    idx = np.nonzero(a >= top - _LEX_TOL * max(top, 1.0))[0]
    # lexicographically smallest vertex: prefer -e_i with the largest i
    # among negative-sign candidates, else the canonical first index
    best = None
    for i in idx:
        cand = np.zeros_like(y)
        cand[i] = np.sign(y[i]) if y[i] != 0 else 1.0
        if best is None or tuple(cand) < tuple(best):
            best = cand
    return best


@dataclass(frozen=True)
class Capsule(CompactConvexSet):
    """Segment [a, b] fattened by a norm ball: {p + q : p in [a,b],
    ||q||_norm <= radius}.  Exact support function; projections under
    non-Euclidean fattening fall back to descent."""

    a: np.ndarray = None  # type: ignore[assignment]
    b: np.ndarray = None  # type: ignore[assignment]
    radius: float = 0.0
    norm: NormTag = NormTag.L2

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).ravel())
        object.__setattr__(self, "b", np.asarray(self.b, dtype=float).ravel())
        if self.radius < 0:
            raise ValueError("capsule radius must be nonnegative")

    @property
    def dim(self) -> int:
        return self.a.size

    def support(self, y: np.ndarray) -> float:
        y = self._check(y)
        seg = max(float(self.a @ y), float(self.b @ y))
        return seg + self.radius * vector_norm(y, self.norm.dual())

    def argmax_support(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        va, vb = float(self.a @ y), float(self.b @ y)
        if abs(va - vb) <= _LEX_TOL * max(1.0, abs(va), abs(vb)):
            p = _lex_smallest(np.vstack([self.a, self.b]))
        else:
            p = self.a if va > vb else self.b
        return p + self.radius * _dual_unit(y, self.norm)

    def _project_segment(self, y: np.ndarray) -> np.ndarray:
        d = self.b - self.a
        dd = float(d @ d)
        if dd == 0.0:
            return self.a.copy()
        t = float(np.clip((y - self.a) @ d / dd, 0.0, 1.0))
        return self.a + t * d

    def project(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        if self.norm is NormTag.L2:
            p = self._project_segment(y)
            gap = y - p
            n = np.linalg.norm(gap)
            if n <= self.radius:
                return y.copy()
            return p + gap * (self.radius / n)
        # alternate projections on the Minkowski structure p + q
        p = self._project_segment(y)
        kind = "linf" if self.norm is NormTag.LINF else "l1"
        q = np.zeros_like(y)
        for _ in range(200):
            q = project_ball(y - p, self.radius, kind)
            p_new = self._project_segment(y - q)
            if np.linalg.norm(p_new - p) <= 1e-13:
                p = p_new
                break
            p = p_new
        return p + q

    def contains(self, y: np.ndarray, tol: float = 1e-9) -> bool:
        y = self._check(y)
        p = self._project_segment(y)
        if vector_norm(y - p, self.norm) <= self.radius + tol:
            return True
        return super().contains(y, tol)
