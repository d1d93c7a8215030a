"""Symmetrizability of a finite state family and nonemptiness of the region's interior.

A family {V_s} is symmetrizable when some sigma(s|x) makes

    sum_s sigma(s|x') V_s(z|x) = sum_s sigma(s|x) V_s(z|x')

for every x, x', z. The largest violation is minimized by a linear program.
Checking sigma on the vertices suffices: any mixture of vertices is itself a
distribution over vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .channels import SavbcSpec, StateFamily
from .infomeasures import shannon_capacity


class SolverFailure(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SymmetrizingChannel:
    sigma: np.ndarray   # (|X|, |S|), row x is sigma(.|x)

    def __post_init__(self):
        s = np.array(self.sigma, dtype=float)
        if s.ndim != 2 or np.any(s < -1e-12) or not np.allclose(s.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("sigma rows must be probability vectors")
        s = np.clip(s, 0.0, None)
        s /= s.sum(axis=1, keepdims=True)
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)


@dataclass(frozen=True)
class SymmetrizabilityResult:
    symmetrizable: bool
    residual: float
    witness: SymmetrizingChannel | None
    borderline: bool = False

    @property
    def verdict(self) -> str:
        return "symmetrizable" if self.symmetrizable else "nonsymmetrizable"


def residual(family: StateFamily, sigma) -> float:
    """Largest |sum_s sigma(s|x')V_s(z|x) - sum_s sigma(s|x)V_s(z|x')|."""
    st = family.stack                               # (S, X, Z)
    sig = np.asarray(sigma, dtype=float)            # (X, S)
    # M[x', x, z] = sum_s sigma(s|x') V_s(z|x)
    M = np.einsum("as,sxz->axz", sig, st)
    D = M - M.transpose(1, 0, 2)
    return float(np.abs(D).max()) if D.size else 0.0


def _constraints(st: np.ndarray):
    S, X, Z = st.shape
    nv = X * S + 1                                  # sigma(s|x) at x*S+s, then t
    rows = []
    for x in range(X):
        for xp in range(x + 1, X):
            for z in range(Z):
                r = np.zeros(nv)
                r[xp * S:(xp + 1) * S] += st[:, x, z]
                r[x * S:(x + 1) * S] -= st[:, xp, z]
                rows.append(r)
    A = np.array(rows).reshape(-1, nv)
    t = np.zeros((len(A), nv))
    t[:, -1] = 1.0
    A_ub = np.vstack([A - t, -A - t])
    A_eq = np.zeros((X, nv))
    for x in range(X):
        A_eq[x, x * S:(x + 1) * S] = 1.0
    return A_ub, A_eq


def _solve(c, A_ub, b_ub, A_eq, b_eq):
    res = linprog(c, A_ub=A_ub if len(A_ub) else None, b_ub=b_ub if len(A_ub) else None,
                  A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * len(c), method="highs")
    if res.status != 0:
        raise SolverFailure(f"linear program failed: {res.message}")
    return res.x


def is_symmetrizable(family: StateFamily, tol: float = 1e-8) -> SymmetrizabilityResult:
    """Decide symmetrizability by minimizing the largest identity violation.

    Among optimal sigma the lexicographically largest one in (x, s) order is
    returned, which makes the witness unique and reproducible.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    st = family.stack
    S, X, _ = st.shape
    A_ub, A_eq = _constraints(st)
    nv = X * S + 1
    c = np.zeros(nv)
    c[-1] = 1.0
    b_ub = np.zeros(len(A_ub))
    x = _solve(c, A_ub, b_ub, A_eq, np.ones(X))
    t_star = max(float(x[-1]), 0.0)

    # lexicographic refinement over the optimal face
    lock_ub = [A_ub]
    lock_b = [b_ub]
    cap = np.zeros((1, nv))
    cap[0, -1] = 1.0
    lock_ub.append(cap)
    lock_b.append(np.array([t_star + max(1e-12, 1e-9 * tol)]))
    for k in range(X * S):
        ck = np.zeros(nv)
        ck[k] = -1.0
        xk = _solve(ck, np.vstack(lock_ub), np.concatenate(lock_b), A_eq, np.ones(X))
        row = np.zeros((1, nv))
        row[0, k] = -1.0
        lock_ub.append(row)
        lock_b.append(np.array([-(xk[k] - 1e-10)]))
        x = xk
    sigma = np.clip(x[:-1].reshape(X, S), 0.0, None)
    sigma /= sigma.sum(axis=1, keepdims=True)
    # snap to exact zeros and ones when the identity still holds
    snapped = np.where(sigma < 1e-9, 0.0, sigma)
    snapped /= snapped.sum(axis=1, keepdims=True)
    if residual(family, snapped) <= residual(family, sigma) + 1e-12:
        sigma = snapped
    r = residual(family, sigma)
    sym = r <= tol
    borderline = tol / 10 <= r <= 10 * tol
    return SymmetrizabilityResult(sym, r, SymmetrizingChannel(sigma) if sym else None, borderline)


@dataclass(frozen=True)
class InteriorVerdict:
    nonempty: bool
    reasons: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self):
        return self.nonempty


def interior_nonempty(spec: SavbcSpec, tol: float = 1e-8) -> InteriorVerdict:
    """Interior is nonempty iff C(W) > 0 and the state family is nonsymmetrizable."""
    reasons = []
    if shannon_capacity(spec.w, min(tol, 1e-9)) <= tol:
        reasons.append("C_Sh(W)=0")
    if is_symmetrizable(spec.family, tol).symmetrizable:
        reasons.append("symmetrizable")
    return InteriorVerdict(not reasons, tuple(reasons))
