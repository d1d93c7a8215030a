"""Closed-form region of the binary-symmetric instance.

W = BSC(p) and the Z-channel is any BSC with crossover in [p_min, p_max]. With
U uniform and X = U xor Bern(alpha), each alpha in [0, 1/2] contributes

    Rc <= 1 - h(alpha * p_max),  Rp <= h(alpha * p) - h(p),  Rc + Rp <= 1 - h(p),

where * is binary convolution. The worst state is always p_max, and when
p_max <= p the region is the sum-rate triangle.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channels import OutOfRange, bs_savbc
from .infomeasures import LN2, _xlogx
from .regions import Budget, RateRegion, Report, compute_region


def _hb(p):
    p = np.asarray(p, dtype=float)
    return -(_xlogx(p) + _xlogx(1.0 - p)) / LN2


def _conv(a, d):
    return a * (1.0 - d) + (1.0 - a) * d


@dataclass(frozen=True)
class BsSavbcParams:
    p: float
    p_min: float
    p_max: float

    def __post_init__(self):
        if not 0.0 <= self.p < 0.5:
            raise OutOfRange(f"p={self.p} outside [0, 1/2)")
        if not 0.0 <= self.p_min <= self.p_max < 0.5:
            raise OutOfRange(f"need 0 <= p_min <= p_max < 1/2, got {self.p_min}, {self.p_max}")

    @property
    def sum_capacity(self) -> float:
        return float(1.0 - _hb(self.p))

    def spec(self):
        return bs_savbc(self.p, self.p_min, self.p_max)


@dataclass(frozen=True, eq=False)
class Boundary:
    """Per-alpha bounds and the hull of the union of per-alpha polytopes."""

    alpha: np.ndarray
    rc_bound: np.ndarray
    rp_bound: np.ndarray
    sum_bound: np.ndarray
    hull: RateRegion

    def polytope(self, k: int) -> RateRegion:
        a, b, c = self.rc_bound[k], self.rp_bound[k], self.sum_bound[k]
        return RateRegion.hull(_corners(a, b, c))


def _corners(a, b, c):
    rc, rp = min(a, c), min(b, c)
    return [(0, 0), (rc, 0), (rc, max(0.0, min(c - rc, rp))),
            (max(0.0, min(c - rp, rc)), rp), (0, rp)]


def _grid(n_alpha: int) -> np.ndarray:
    if n_alpha < 2:
        raise ValueError("n_alpha must be >= 2")
    return np.linspace(0.0, 0.5, n_alpha)


def bs_region_boundary(params: BsSavbcParams, n_alpha: int = 201) -> Boundary:
    alpha = _grid(n_alpha)
    rc = 1.0 - _hb(_conv(alpha, params.p_max))
    rp = _hb(_conv(alpha, params.p)) - _hb(params.p)
    s = np.full_like(alpha, params.sum_capacity)
    if params.p_max <= params.p:
        c = params.sum_capacity
        hull = RateRegion.hull([(0, 0), (c, 0), (0, c)])
    else:
        pts = [pt for k in range(n_alpha) for pt in _corners(rc[k], rp[k], s[k])]
        hull = RateRegion.hull(pts)
    return Boundary(alpha, rc, np.maximum(rp, 0.0), s, hull)


def degraded_bsbc_region(p_strong: float, p_weak: float, n_alpha: int = 201):
    """(alpha, rc, rp) on the boundary of the degraded binary-symmetric BC."""
    if not 0.0 <= p_strong <= p_weak < 0.5:
        raise OutOfRange(f"need 0 <= p_strong <= p_weak < 1/2, got {p_strong}, {p_weak}")
    alpha = _grid(n_alpha)
    rp = _hb(_conv(alpha, p_strong)) - _hb(p_strong)
    rc = 1.0 - _hb(_conv(alpha, p_weak))
    return alpha, rc, np.maximum(rp, 0.0)


def case2_sumrate_line(params: BsSavbcParams, n_alpha: int = 201, atol: float = 1e-12):
    """Samples (alpha, rc, rp) of the sum-rate line traced when p > p_max."""
    if not params.p > params.p_max:
        raise OutOfRange(f"sum-rate line needs p > p_max, got {params.p} <= {params.p_max}")
    alpha = _grid(n_alpha)
    rc = 1.0 - _hb(_conv(alpha, params.p))
    rp = np.maximum(_hb(_conv(alpha, params.p)) - _hb(params.p), 0.0)
    ok = ((rc <= 1.0 - _hb(_conv(alpha, params.p_max)) + atol)
          & (np.abs(rc + rp - params.sum_capacity) <= atol))
    if not ok.all():
        raise ArithmeticError("sum-rate line sample violates its bounds")
    return alpha, rc, rp


def crosscheck(params: BsSavbcParams, budget: Budget | None = None, tol: float = 1e-2,
               n_alpha: int = 201) -> Report:
    """Distance between the general search and the closed-form hull."""
    ref = bs_region_boundary(params, n_alpha).hull
    found = compute_region(params.spec(), budget)
    d = found.distance(ref)
    return Report("bsc_crosscheck", d <= tol,
                  {"p": params.p, "p_min": params.p_min, "p_max": params.p_max,
                   "distance": float(d), "warnings": ";".join(found.warnings) or "none"})


def _g(v) -> str:
    return f"{float(v):.9g}"


def write_boundary_csv(path, boundary: Boundary) -> None:
    with open(path, "w", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(["alpha", "rc_bound", "rp_bound", "sum_bound"])
        for row in zip(boundary.alpha, boundary.rc_bound, boundary.rp_bound, boundary.sum_bound):
            wr.writerow([_g(v) for v in row])


def write_vertices_csv(path, region: RateRegion, label: str | None = None) -> None:
    with open(path, "w", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow((["label"] if label is not None else []) + ["rc", "rp"])
        for rc, rp in region.vertices:
            wr.writerow(([label] if label is not None else []) + [_g(rc), _g(rp)])


def figure_sweep(p: float, p_min: float, p_max_values, out_dir, n_alpha: int = 201):
    """Boundary and hull CSVs per p_max plus a combined hull CSV; returns the hulls."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hulls = {}
    for pm in p_max_values:
        prm = BsSavbcParams(p, min(p_min, pm), pm)
        b = bs_region_boundary(prm, n_alpha)
        write_boundary_csv(out / f"boundary_pmax_{pm:g}.csv", b)
        write_vertices_csv(out / f"hull_pmax_{pm:g}.csv", b.hull)
        hulls[pm] = b.hull
    with open(out / "hulls.csv", "w", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(["p_max", "rc", "rp"])
        for pm, h in hulls.items():
            for rc, rp in h.vertices:
                wr.writerow([_g(pm), _g(rc), _g(rp)])
    return hulls
