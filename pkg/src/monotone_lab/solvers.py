"""Small numerical workhorses shared by the rest of the package.

Everything here is deterministic given its inputs (and seed, where one
appears); nothing keeps state between calls.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``v`` onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    n = v.size
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, n + 1)
    cond = u - css / ks > 0
    rho = int(np.nonzero(cond)[0][-1])
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection of ``v`` onto the l1 ball of given radius."""
    v = np.asarray(v, dtype=float)
    if radius <= 0:
        return np.zeros_like(v)
    if np.sum(np.abs(v)) <= radius:
        return v.copy()
    w = project_simplex(np.abs(v) / radius) * radius
    return np.sign(v) * w


def project_ball(v: np.ndarray, radius: float, kind: str) -> np.ndarray:
    """Euclidean projection onto the centered norm ball ``{||x||_kind <= r}``."""
    v = np.asarray(v, dtype=float)
    if kind == "l2":
        n = np.linalg.norm(v)
        return v if n <= radius else v * (radius / n)
    if kind == "linf":
        return np.clip(v, -radius, radius)
    if kind == "l1":
        return project_l1_ball(v, radius)
    raise ValueError(f"unknown ball kind {kind!r}")


def nearest_hull_point(
    vertices: np.ndarray, y: np.ndarray, max_iter: int = 2000, tol: float = 1e-14
) -> np.ndarray:
    """Euclidean projection of ``y`` onto conv(vertices).

    Accelerated projected gradient on the simplex of convex weights;
    the objective is smooth and the simplex projection is exact, so the
    iterate reaches machine precision for the small vertex counts used
    here.
    """
    V = np.asarray(vertices, dtype=float)
    m = V.shape[0]
    if m == 1:
        return V[0].copy()
    G = V @ V.T
    b = V @ np.asarray(y, dtype=float)
    L = max(float(np.linalg.eigvalsh(G)[-1]), 1e-12)
    lam = np.full(m, 1.0 / m)
    z = lam.copy()
    t = 1.0
    f_prev = np.inf
    for _ in range(max_iter):
        grad = G @ z - b
        lam_new = project_simplex(z - grad / L)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = lam_new + ((t - 1.0) / t_new) * (lam_new - lam)
        lam, t = lam_new, t_new
        f = 0.5 * lam @ G @ lam - b @ lam
        if abs(f_prev - f) <= tol * max(1.0, abs(f)):
            break
        f_prev = f
    lam = _active_set_polish(G, b, lam)
    return V.T @ lam


def _active_set_polish(G: np.ndarray, b: np.ndarray, lam: np.ndarray,
                       drop_tol: float = 1e-10) -> np.ndarray:
    """Exact KKT solve on the active vertex set found by the iteration.

    Solves the equality-constrained quadratic program restricted to the
    currently positive weights, dropping any weight the solve makes
    negative, so the returned projection is accurate to machine
    precision on the identified face.
    """
    m = lam.size
    active = lam > drop_tol
    if not np.any(active):
        active[int(np.argmax(lam))] = True
    best = lam
    for _ in range(4 * m):
        idx = np.nonzero(active)[0]
        k = idx.size
        # KKT system: [G_aa 1; 1' 0] [lam; mu] = [b_a; 1]
        K = np.zeros((k + 1, k + 1))
        K[:k, :k] = G[np.ix_(idx, idx)]
        K[:k, k] = 1.0
        K[k, :k] = 1.0
        rhs = np.concatenate([b[idx], [1.0]])
        try:
            sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
        except np.linalg.LinAlgError:
            return best
        w, mu = sol[:k], sol[k]
        if np.any(w < -drop_tol):
            active[idx[int(np.argmin(w))]] = False
            if not np.any(active):
                return best
            continue
        cand = np.zeros(m)
        cand[idx] = np.maximum(w, 0.0)
        s = cand.sum()
        if s <= 0:
            return best
        best = cand / s
        # dual feasibility: inactive vertices must not improve
        viol = (G @ best - b) + mu
        viol[idx] = 0.0
        j = int(np.argmin(viol))
        scale = max(1.0, float(np.max(np.abs(b))))
        if viol[j] >= -1e-11 * scale:
            return best
        active[j] = True
    return best


def douglas_rachford(
    prox_a: Callable[[np.ndarray], np.ndarray],
    prox_b: Callable[[np.ndarray], np.ndarray],
    z0: np.ndarray,
    max_iter: int = 4000,
    tol: float = 1e-12,
) -> tuple[np.ndarray, float, bool]:
    """Douglas-Rachford iteration for 0 in A(x) + B(x).

    ``prox_a`` / ``prox_b`` are the resolvents of A and B (step already
    absorbed).  Returns (x, residual, converged) where x = J_A(y) at the
    final shadow iterate.
    """
    y = np.asarray(z0, dtype=float).copy()
    x = prox_a(y)
    res = np.inf
    for _ in range(max_iter):
        w = prox_b(2.0 * x - y)
        y = y + w - x
        x_new = prox_a(y)
        res = float(np.linalg.norm(x_new - x)) + float(np.linalg.norm(w - x))
        x = x_new
        if res <= tol:
            return x, res, True
    return x, res, False


def subgradient_descent(
    objective: Callable[[np.ndarray], float],
    subgrad: Callable[[np.ndarray], np.ndarray],
    starts: list[np.ndarray],
    step_scale: float = 1.0,
    max_steps: int = 2000,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
) -> tuple[np.ndarray, float, int]:
    """Multi-start projected subgradient method with step c/sqrt(k).

    Tracks the best iterate seen across all restarts.  Returns
    (best_point, best_value, total_steps).  Upper bound only: the method
    carries no optimality certificate.
    """
    best_x: np.ndarray | None = None
    best_f = np.inf
    total = 0
    for x0 in starts:
        x = np.asarray(x0, dtype=float).copy()
        if project is not None:
            x = project(x)
        f = objective(x)
        if f < best_f:
            best_f, best_x = f, x.copy()
        for k in range(1, max_steps + 1):
            g = subgrad(x)
            gn = np.linalg.norm(g)
            total += 1
            if gn < 1e-15:
                break
            x = x - (step_scale / np.sqrt(k)) * g / gn
            if project is not None:
                x = project(x)
            f = objective(x)
            if f < best_f:
                best_f, best_x = f, x.copy()
    assert best_x is not None
    return best_x, best_f, total
