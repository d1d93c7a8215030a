"""Rate polytopes for given auxiliaries and the capacity-region computation.

For a joint ``p(u, x[, q])`` the inner polytope is cut by

    Rc <= min_s I(U;Z|Q),   Rp <= I(X;Y|U,Q),   Rc + Rp <= I(X;Y|Q)

and the outer polytope replaces the private-rate bound by
``Rc + Rp <= I(X;Y|U,Q) + min_s I(U;Z|Q)``. The region is the convex hull of
inner polytopes over all auxiliaries; :func:`compute_region` searches it by
support-function maximization along a fan of directions.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import geometry
from .channels import (AuxiliaryJoint, DimensionMismatch, SavbcSpec,
                       StateWeights)
from .infomeasures import (LN2, NonConvergence, _cmi_const,
                           _mix, _pairwise_fw, _safe_log, _state_tensor,
                           _xlogx, min_state_capacity, min_state_mi,
                           min_state_mi_many, shannon_capacity)

log = logging.getLogger(__name__)


class BudgetExhausted(RuntimeError):
    def __init__(self, message, region=None):
        super().__init__(message)
        self.region = region


class GridTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class RatePair:
    rc: float
    rp: float

    def __post_init__(self):
        if self.rc < 0 or self.rp < 0:
            raise ValueError(f"negative rate in ({self.rc}, {self.rp})")

    def __iter__(self):
        yield self.rc
        yield self.rp


@dataclass(frozen=True, eq=False)
class RateRegion:
    """Convex polygon of (Rc, Rp) pairs, vertices counter-clockwise."""

    vertices: np.ndarray
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) == 0:
            raise ValueError("a region needs at least one vertex")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def hull(cls, points, warnings: Iterable[str] = ()) -> "RateRegion":
        pts = np.clip(np.asarray(points, dtype=float).reshape(-1, 2), 0.0, None)
        return cls(geometry.convex_hull(pts), tuple(warnings))

    def contains(self, pt, slack: float = 0.0) -> bool:
        return geometry.contains(self.vertices, tuple(pt), slack)

    def contains_region(self, other: "RateRegion", slack: float = 0.0) -> bool:
        return geometry.polygon_contains(self.vertices, other.vertices, slack)

    def distance(self, other: "RateRegion") -> float:
        return geometry.hausdorff(self.vertices, other.vertices)

    @property
    def area(self) -> float:
        return geometry.area(self.vertices)

    def support(self, mu_c: float, mu_p: float) -> float:
        return float((self.vertices @ np.array([mu_c, mu_p])).max())

    def __len__(self):
        return len(self.vertices)


def contains(region: RateRegion, pt, slack: float = 0.0) -> bool:
    return region.contains(pt, slack)


def region_distance(a: RateRegion, b: RateRegion) -> float:
    """Symmetric Hausdorff distance between two filled polygons."""
    return a.distance(b)


# --------------------------------------------------------------------------
# per-auxiliary bounds

@dataclass(frozen=True)
class RateBounds:
    """The three mutual-information terms for one auxiliary (bits)."""

    common: float       # min_s I(U;Z|Q)
    private: float      # I(X;Y|U,Q)
    total: float        # I(X;Y|Q)
    weights: StateWeights

    def inner_points(self) -> np.ndarray:
        return _inner_points(self.common, self.private, self.total)

    def outer_points(self) -> np.ndarray:
        return _outer_points(self.common, self.private, self.total)


def _inner_points(a, b, c) -> np.ndarray:
    a, b, c = (np.maximum(np.asarray(t, float), 0.0) for t in (a, b, c))
    rc = np.minimum(a, c)
    rp = np.minimum(b, c)
    z = np.zeros_like(rc)
    pts = [(z, z), (rc, z), (rc, np.clip(c - rc, 0, rp)),
           (np.clip(c - rp, 0, rc), rp), (z, rp)]
    return np.stack([np.stack(p, axis=-1) for p in pts], axis=-2)


def _outer_points(a, b, c) -> np.ndarray:
    a, b, c = (np.maximum(np.asarray(t, float), 0.0) for t in (a, b, c))
    s = np.minimum(a + b, c)
    rc = np.minimum(a, s)
    z = np.zeros_like(rc)
    pts = [(z, z), (rc, z), (rc, s - rc), (z, s)]
    return np.stack([np.stack(p, axis=-1) for p in pts], axis=-2)


def _y_mi(uxq: np.ndarray, W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(I(X;Y|U,Q), I(X;Y|Q)) in bits for a batch ``uxq[b, u, x, q]``."""
    h_w = -_xlogx(W).sum(axis=1)
    p_xq = uxq.sum(axis=1)
    h_y_x = np.einsum("bxq,x->b", p_xq, h_w)
    p_uyq = np.einsum("buxq,xy->buyq", uxq, W)
    p_uq = uxq.sum(axis=2)
    p_yq = p_uyq.sum(axis=1)
    p_q = p_uq.sum(axis=1)
    h_y_uq = -_xlogx(p_uyq).sum(axis=(1, 2, 3)) + _xlogx(p_uq).sum(axis=(1, 2))
    h_y_q = -_xlogx(p_yq).sum(axis=(1, 2)) + _xlogx(p_q).sum(axis=1)
    priv = np.maximum((h_y_uq - h_y_x) / LN2, 0.0)
    total = np.maximum((h_y_q - h_y_x) / LN2, 0.0)
    return priv, total


def _check_aux(aux: AuxiliaryJoint, spec: SavbcSpec):
    if aux.x_size != spec.x_size:
        raise DimensionMismatch(f"auxiliary has |X|={aux.x_size}, spec has {spec.x_size}")


def rate_bounds(aux: AuxiliaryJoint, spec: SavbcSpec, tol: float = 1e-9) -> RateBounds:
    _check_aux(aux, spec)
    try:
        a, w = min_state_mi(aux, spec.family, tol)
    except NonConvergence as exc:
        # value is an upper estimate of the min; shrink by the certified gap
        log.warning("state minimization: %s", exc)
        a, w = max(exc.value - exc.gap, 0.0), exc.weights
    priv, total = _y_mi(aux.uxq()[None], spec.w.rows)
    return RateBounds(a, float(priv[0]), float(total[0]), w)


def inner_polytope(aux: AuxiliaryJoint, spec: SavbcSpec, tol: float = 1e-9) -> RateRegion:
    """Polygon {Rc <= min_s I(U;Z|Q), Rp <= I(X;Y|U,Q), Rc+Rp <= I(X;Y|Q)}.

    Without a Q axis this is the plain three-inequality polytope.
    """
    return RateRegion.hull(rate_bounds(aux, spec, tol).inner_points())


def outer_polytope(aux: AuxiliaryJoint, spec: SavbcSpec, tol: float = 1e-9) -> RateRegion:
    return RateRegion.hull(rate_bounds(aux, spec, tol).outer_points())


# --------------------------------------------------------------------------
# Proposition-2 style reference points

def corner_points(spec: SavbcSpec, tol: float = 1e-7) -> tuple[RatePair, RatePair]:
    """``(min{C(W), min_s C(V_s)}, 0)`` and ``(0, C(W))``."""
    cw = shannon_capacity(spec.w, tol)
    cv, _ = min_state_capacity(spec.family, tol)
    return RatePair(min(cw, cv), 0.0), RatePair(0.0, cw)


def bounding_triangle(spec: SavbcSpec, tol: float = 1e-9) -> RateRegion:
    cw = shannon_capacity(spec.w, tol)
    return RateRegion.hull([(0, 0), (cw, 0), (0, cw)])


# --------------------------------------------------------------------------
# batched evaluation used by the searches

def _proj_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row onto the probability simplex."""
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    ind = np.arange(1, n + 1)
    cond = u - css / ind > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(len(v)), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


class _Evaluator:
    """Bounds and their gradients in p(u,x) for a batch, Q absent."""

    def __init__(self, spec: SavbcSpec, inner_iters: int = 4):
        self.W = spec.w.rows
        self.stack = spec.family.stack
        self.S = len(spec.family)
        self.h_w = -_xlogx(self.W).sum(axis=1)
        self.inner_iters = inner_iters

    def __call__(self, p: np.ndarray, lam: np.ndarray):
        W, h_w = self.W, self.h_w
        p_u = p.sum(axis=2)
        p_x = p.sum(axis=1)
        r_y = p_x @ W
        q_uy = p @ W
        h_y_x = p_x @ h_w
        c = (-_xlogx(r_y).sum(1) - h_y_x) / LN2
        b = (-_xlogx(q_uy).sum((1, 2)) + _xlogx(p_u).sum(1) - h_y_x) / LN2
        used = p_u > 1e-300
        grad_c = (-(_safe_log(r_y) @ W.T)[:, None, :] - h_w) / LN2
        logcond = _safe_log(q_uy) - _safe_log(p_u)[:, :, None]
        t = np.einsum("buy,xy->bux", logcond, W)
        grad_b = np.where(used[:, :, None], -t - h_w, 0.0) / LN2
        grad_c = np.broadcast_to(grad_c, p.shape).copy()

        uxq = p[..., None]
        A = _state_tensor(uxq, self.stack)
        if self.S > 1:
            lam, _, _ = _pairwise_fw(A, _cmi_const(uxq), lam, 1e-12, self.inner_iters)
        P = _mix(A, lam)[:, 0]                         # (B, U, Z)
        r_z = P.sum(axis=1)
        a = (_xlogx(P).sum((1, 2)) - _xlogx(p_u).sum(1) - _xlogx(r_z).sum(1)) / LN2
        V = np.einsum("bs,sxz->bxz", lam, self.stack)
        ratio = _safe_log(P) - _safe_log(p_u)[:, :, None] - _safe_log(r_z)[:, None, :]
        ga = np.einsum("buz,bxz->bux", ratio, V)
        # an unused u behaves like a fresh cloud: derivative D(V_x || r_z)
        unused = _kl_rows_batch(V, r_z)
        grad_a = np.where(used[:, :, None], ga, unused[:, None, :]) / LN2
        return (np.maximum(a, 0), np.maximum(b, 0), np.maximum(c, 0),
                grad_a, grad_b, grad_c, lam)


def _kl_rows_batch(V: np.ndarray, r: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(V > 0, V * (np.log(np.where(V > 0, V, 1.0)) - _safe_log(r)[:, None, :]), 0.0)
    return t.sum(axis=2)


def _smin(x, y, tau):
    """Smooth min and d/dx weight; exact when tau == 0."""
    if tau == 0:
        return np.minimum(x, y), (x <= y).astype(float)
    m = -tau * np.logaddexp(-x / tau, -y / tau)
    w = 0.5 * (1.0 - np.tanh((x - y) / (2.0 * tau)))
    return m, w


def _splus(z, tau):
    if tau == 0:
        return np.maximum(z, 0.0), (z > 0).astype(float)
    return tau * np.logaddexp(0.0, z / tau), 0.5 * (1.0 + np.tanh(z / (2.0 * tau)))


def _objective(a, b, c, mu, tau):
    """Support value of the inner polytope in direction ``mu`` and dJ/d(a,b,c).

    Greedy on the polymatroid: fill the rate with the larger weight first.
    """
    mc, mp = mu[:, 0], mu[:, 1]
    first = mc >= mp
    # common rate first
    m, wa = _smin(a, c, tau)
    k, v = _smin(b, c - m, tau)
    h, s = _splus(k, tau)
    J1 = mc * m + mp * h
    da1 = mc * wa - mp * s * (1 - v) * wa
    db1 = mp * s * v
    dc1 = mc * (1 - wa) + mp * s * (1 - v) * wa
    # private rate first
    k2, v2 = _smin(a, c - b, tau)
    h2, s2 = _splus(k2, tau)
    J2 = mp * b + mc * h2
    da2 = mc * s2 * v2
    db2 = mp - mc * s2 * (1 - v2)
    dc2 = mc * s2 * (1 - v2)
    pick = lambda x, y: np.where(first, x, y)
    return pick(J1, J2), pick(da1, da2), pick(db1, db2), pick(dc1, dc2)


@dataclass
class Budget:
    """Search knobs for :func:`compute_region`."""

    directions: int = 64
    restarts: int = 16
    iterations: int = 2000
    u_size: int | None = None
    seed: int = 0
    max_seconds: float | None = None
    threads: int | None = None
    tau_start: float = 0.05
    tau_min: float = 1e-5

    def __post_init__(self):
        for name in ("directions", "restarts", "iterations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.u_size is not None and self.u_size < 1:
            raise ValueError("u_size must be >= 1")


def direction_fan(n: int) -> np.ndarray:
    """``n`` unit weight vectors (mu_c, mu_p) spanning the first quadrant."""
    if n == 1:
        return np.array([[np.sqrt(0.5), np.sqrt(0.5)]])
    th = np.linspace(0.0, np.pi / 2, n)
    return np.stack([np.cos(th), np.sin(th)], axis=1)


def _ascend(spec: SavbcSpec, p0: np.ndarray, mu: np.ndarray, budget: Budget) -> np.ndarray:
    """Projected-gradient ascent of the (smoothed) support objective, batched."""
    ev = _Evaluator(spec)
    N, U, X = p0.shape
    S = len(spec.family)
    p = p0.copy()
    lam = np.full((N, S), 1.0 / S)
    a, b, c, ga, gb, gc, lam = ev(p, lam)
    step = np.full(N, 0.2)
    live = np.ones(N, dtype=bool)
    anneal = max(1, int(0.4 * budget.iterations))
    decay = (budget.tau_min / budget.tau_start) ** (1.0 / anneal)
    tau = budget.tau_start
    for it in range(budget.iterations):
        annealing = it < anneal
        tau = budget.tau_start * decay ** it if annealing else budget.tau_min
        idx = np.flatnonzero(live)
        if idx.size == 0:
            break
        J, da, db, dc = _objective(a[idx], b[idx], c[idx], mu[idx], tau)
        G = da[:, None, None] * ga[idx] + db[:, None, None] * gb[idx] + dc[:, None, None] * gc[idx]
        G -= G.mean(axis=(1, 2), keepdims=True)
        cand = _proj_simplex((p[idx] + step[idx, None, None] * G).reshape(idx.size, -1))
        cand = cand.reshape(idx.size, U, X)
        na, nb, nc, nga, ngb, ngc, nlam = ev(cand, lam[idx])
        Jn = _objective(na, nb, nc, mu[idx], tau)[0]
        acc = Jn > J + 1e-13
        ai = idx[acc]
        p[ai], lam[ai] = cand[acc], nlam[acc]
        a[ai], b[ai], c[ai] = na[acc], nb[acc], nc[acc]
        ga[ai], gb[ai], gc[ai] = nga[acc], ngb[acc], ngc[acc]
        step[idx] = np.where(acc, np.minimum(step[idx] * 1.5, 50.0), step[idx] * 0.5)
        if not annealing:
            live[idx[step[idx] < 1e-9]] = False
        else:
            step[idx] = np.maximum(step[idx], 1e-6)
    return p


def _polytope_points(spec: SavbcSpec, p: np.ndarray, tol: float) -> np.ndarray:
    """Exact inner-polytope vertices for a batch of p(u,x)."""
    uxq = p[..., None]
    a, _, gap = min_state_mi_many(uxq, spec.family, tol=tol)
    a = np.maximum(a - np.maximum(gap, 0.0), 0.0)
    priv, total = _y_mi(uxq, spec.w.rows)
    return _inner_points(a, priv, total).reshape(-1, 2)


def _threads(budget: Budget) -> int:
    if budget.threads:
        return budget.threads
    try:
        return max(1, int(os.environ.get("SAVBC_THREADS", "1")))
    except ValueError:
        return 1


def compute_region(spec: SavbcSpec, budget: Budget | None = None,
                   tol: float = 1e-6) -> RateRegion:
    """Convex hull of inner polytopes found by a direction-fan search.

    For every direction (mu_c, mu_p) on the fan, maximizes mu_c Rc + mu_p Rp
    over p(u,x) by multi-start projected-gradient ascent (Dirichlet(1)
    restarts). Every final auxiliary is re-evaluated exactly and its polytope
    enters the hull together with the two reference corner points.

    Exceeding ``budget.max_seconds`` stops the fan early; the best-so-far
    region is returned with a ``budget_exhausted`` warning.
    """
    budget = budget or Budget()
    U = budget.u_size or spec.x_size + 1
    X = spec.x_size
    rng = np.random.default_rng(budget.seed)
    fan = direction_fan(budget.directions)
    R = budget.restarts
    starts = rng.dirichlet(np.ones(U * X), size=(len(fan), R)).reshape(len(fan), R, U, X)
    warnings: list[str] = []
    t0 = time.monotonic()

    corners = corner_points(spec, min(tol, 1e-7))
    points = [np.zeros((1, 2)), np.array([tuple(corners[0]), tuple(corners[1])])]

    # directions are processed in fixed chunks; each chunk is independent so
    # thread scheduling cannot change the result
    chunk = max(1, 256 // R)
    jobs = [range(i, min(i + chunk, len(fan))) for i in range(0, len(fan), chunk)]

    deadline = None if budget.max_seconds is None else t0 + budget.max_seconds

    def run(dirs):
        if deadline is not None and time.monotonic() > deadline:
            return None
        d = np.array(dirs)
        p0 = starts[d].reshape(-1, U, X)
        mu = np.repeat(fan[d], R, axis=0)
        p = _ascend(spec, p0, mu, budget)
        return _polytope_points(spec, p, tol * 1e-2)

    with ThreadPoolExecutor(max_workers=_threads(budget)) as pool:
        results = list(pool.map(run, jobs))
    done = [r for r in results if r is not None]
    if len(done) < len(jobs):
        warnings.append("budget_exhausted")
        log.warning("time budget exhausted after %d of %d direction chunks",
                    len(done), len(jobs))
    points.extend(done)
    return RateRegion.hull(np.vstack(points), warnings)


# --------------------------------------------------------------------------
# brute force oracle

def simplex_grid(n: int, steps: int) -> Iterable[np.ndarray]:
    """All points of the n-simplex with coordinates in multiples of 1/steps."""
    for bars in itertools.combinations(range(steps + n - 1), n - 1):
        edges = np.array((-1,) + bars + (steps + n - 1,))
        yield (np.diff(edges) - 1) / steps


def brute_force_region(spec: SavbcSpec, grid_steps: int, u_size: int | None = None,
                       tol: float = 1e-9, max_points: int = 10**7) -> RateRegion:
    """Hull of inner polytopes over every grid point of the p(u,x) simplex."""
    if grid_steps < 1:
        raise ValueError("grid_steps must be >= 1")
    U = u_size or spec.x_size + 1
    n = U * spec.x_size
    count = math.comb(grid_steps + n - 1, n - 1)
    if count > max_points:
        raise GridTooLarge(f"{count} grid points exceed the limit of {max_points}")
    pts = []
    it = simplex_grid(n, grid_steps)
    while True:
        block = list(itertools.islice(it, 4096))
        if not block:
            break
        p = np.array(block).reshape(-1, U, spec.x_size)
        pts.append(_polytope_points(spec, p, tol))
    return RateRegion.hull(np.vstack(pts))


# --------------------------------------------------------------------------
# verification of the equivalent characterizations

@dataclass
class Report:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"[{status}] {self.name}: {parts}"


def _fmt(v):
    return f"{v:.9g}" if isinstance(v, float) else str(v)


def random_aux(rng: np.random.Generator, u_size: int, x_size: int, q_size: int = 1) -> AuxiliaryJoint:
    t = rng.dirichlet(np.ones(u_size * x_size * q_size))
    if q_size == 1:
        return AuxiliaryJoint(t.reshape(u_size, x_size))
    return AuxiliaryJoint(t.reshape(u_size, x_size, q_size))


def verify_q_absorption(spec: SavbcSpec, samples: int = 100, seed: int = 0,
                        tol: float = 1e-9, u_size: int = 2, q_size: int = 2) -> Report:
    """Merging Q into the auxiliary never lowers any of the three bounds.

    For each random p(u,x,q): with U' = (U,Q),
    min_s I(U';Z) >= min_s I(U;Z|Q), I(X;Y|U') = I(X;Y|U,Q),
    I(X;Y) >= I(X;Y|Q).
    """
    rng = np.random.default_rng(seed)
    worst, worst_case = -np.inf, None
    for k in range(samples):
        aux = random_aux(rng, u_size, spec.x_size, q_size)
        merged = aux.merge_q()
        bm = rate_bounds(merged, spec, tol)
        # the with-Q minimum is also tried from the merged minimizer, so the
        # comparison is between two minima over the same hull
        try:
            aq, _ = min_state_mi(aux, spec.family, tol,
                                 extra_starts=bm.weights.weights[None, :])
        except NonConvergence as exc:
            aq = exc.value
        priv_q, total_q = _y_mi(aux.uxq()[None], spec.w.rows)
        viol = (aq - bm.common, float(priv_q[0]) - bm.private, float(total_q[0]) - bm.total)
        v = max(viol)
        if v > worst:
            worst, worst_case = v, {"sample": k, "violations": [float(x) for x in viol],
                                    "aux": aux.table.tolist()}
    worst = max(worst, 0.0)
    return Report("q_absorption", worst <= tol,
                  {"samples": samples, "max_violation": float(worst)},
                  [worst_case] if worst_case else [])


def verify_inner_outer(spec: SavbcSpec, samples: int = 200, seed: int = 0,
                       tol: float = 1e-2, u_size: int = 2, q_size: int = 2,
                       slack: float = 1e-12) -> Report:
    """Inner polytope inside outer polytope per sample, and equality of the
    hulls via the two-case witness construction."""
    rng = np.random.default_rng(seed)
    violations, case_counts = 0, {"I": 0, "II": 0}
    outer_pts, witness_pts, bad = [], [], []
    for k in range(samples):
        aux = random_aux(rng, u_size, spec.x_size, q_size)
        bnd = rate_bounds(aux, spec, 1e-9)
        inner = RateRegion.hull(bnd.inner_points())
        outer = RateRegion.hull(bnd.outer_points())
        if not outer.contains_region(inner, slack):
            violations += 1
            bad.append({"sample": k, "aux": aux.table.tolist()})
        a, b, c = bnd.common, bnd.private, bnd.total
        if a + b >= c:
            case_counts["I"] += 1
            extra = (0.0, c)            # sum bound alone is active
        else:
            case_counts["II"] += 1
            extra = (0.0, a + b)
        outer_pts.append(outer.vertices)
        witness_pts.append(np.vstack([inner.vertices, [extra]]))
    dist = RateRegion.hull(np.vstack(outer_pts)).distance(
        RateRegion.hull(np.vstack(witness_pts)))
    return Report("inner_outer", violations == 0 and dist <= tol,
                  {"samples": samples, "containment_violations": violations,
                   "case_I": case_counts["I"], "case_II": case_counts["II"],
                   "hull_distance": float(dist)}, bad[:5])


def verify_corner_triangle(spec: SavbcSpec, region: RateRegion, tol: float = 1e-7,
                           corner_slack: float = 1e-3, triangle_slack: float = 1e-6) -> Report:
    """Region contains both reference corner points and sits in the triangle."""
    c1, c2 = corner_points(spec, tol)
    tri = bounding_triangle(spec, min(tol, 1e-9))
    outside = [v.tolist() for v in region.vertices if not tri.contains(v, triangle_slack)]
    missing = [tuple(c) for c in (c1, c2) if not region.contains(tuple(c), corner_slack)]
    return Report("corner_triangle", not outside and not missing,
                  {"corner_c": c1.rc, "corner_p": c2.rp,
                   "vertices_outside_triangle": len(outside),
                   "corners_missing": len(missing)},
                  outside[:5] + missing)
