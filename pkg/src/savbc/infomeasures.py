"""Entropy/mutual-information kernels (bits), minimization of I(U;Z|Q) over the
convex hull of the state channels, and Blahut-Arimoto capacity.

The state minimization exploits that the joint law of (Q, U, Z) is affine in the
mixing weights, so I(U;Z|Q) is a convex function on the weight simplex. It is
solved with pairwise (away-step) Frank-Wolfe whose duality gap certifies the
returned value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (AuxiliaryJoint, ChannelError, DimensionMismatch,
                       OutOfRange, StateFamily, StateWeights, StochasticMatrix)

LN2 = np.log(2.0)
_TINY = 1e-300

Bits = float


class InvalidPmf(ChannelError):
    pass


class NonConvergence(RuntimeError):
    """Iteration budget ran out before the stopping certificate was met."""

    def __init__(self, message, value=None, weights=None, gap=None):
        super().__init__(message)
        self.value = value
        self.weights = weights
        self.gap = gap


def _check_pmf(p, tol=1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.size == 0 or np.any(~np.isfinite(p)) or np.any(p < -1e-15):
        raise InvalidPmf(f"not a PMF: {p}")
    if abs(p.sum() - 1.0) > tol:
        raise InvalidPmf(f"PMF sums to {p.sum()!r}")
    return np.clip(p, 0.0, None)


def _xlogx(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    pos = a > 0
    return np.where(pos, a * np.log(np.where(pos, a, 1.0)), 0.0)


def _safe_log(a) -> np.ndarray:
    return np.log(np.maximum(a, _TINY))


def _h(p) -> float:
    """Entropy in bits of a nonnegative table (no validation)."""
    return float(-_xlogx(p).sum() / LN2)


def entropy(p) -> Bits:
    return max(0.0, _h(_check_pmf(p)))


def binary_entropy(p: float) -> Bits:
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"{p} not in [0, 1]")
    return _h([p, 1.0 - p])


def convolve(alpha: float, delta: float) -> float:
    """Binary convolution ``alpha*(1-delta) + (1-alpha)*delta``."""
    for v in (alpha, delta):
        if not 0.0 <= v <= 1.0:
            raise OutOfRange(f"{v} not in [0, 1]")
    return alpha * (1.0 - delta) + (1.0 - alpha) * delta


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Dense joint PMF with named axes (e.g. ``("U", "X", "Q")``)."""

    table: np.ndarray
    axes: tuple[str, ...] = ()

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim < 1 or t.ndim > 4:
            raise InvalidPmf(f"joint must have 1 to 4 axes, got {t.ndim}")
        t = _check_pmf(t)
        axes = tuple(self.axes) or tuple("ABCD"[: t.ndim])
        if len(axes) != t.ndim or len(set(axes)) != t.ndim:
            raise InvalidPmf(f"axis names {axes} do not match table rank {t.ndim}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "axes", axes)

    @property
    def sizes(self) -> dict[str, int]:
        return dict(zip(self.axes, self.table.shape))

    def marginal(self, *names: str) -> "JointPmf":
        keep = [self.axes.index(n) for n in names]
        drop = tuple(i for i in range(self.table.ndim) if i not in keep)
        m = self.table.sum(axis=drop)
        kept_order = sorted(keep)
        m = np.moveaxis(m, range(len(keep)), [kept_order.index(k) for k in keep])
        return JointPmf(m, tuple(names))


def _as_table(joint, ndim: int) -> np.ndarray:
    t = joint.table if isinstance(joint, JointPmf) else _check_pmf(joint)
    if t.ndim != ndim:
        raise InvalidPmf(f"expected {ndim} axes, got {t.ndim}")
    return t


def mutual_information(joint) -> Bits:
    """I(A;B) for a two-axis joint ``p[a, b]``."""
    t = _as_table(joint, 2)
    mi = _h(t.sum(1)) + _h(t.sum(0)) - _h(t)
    return max(mi, 0.0)


def conditional_mi(joint) -> Bits:
    """I(A;B|C) for a three-axis joint ``p[a, b, c]``."""
    t = _as_table(joint, 3)
    mi = _h(t.sum(1)) + _h(t.sum(0)) - _h(t) - _h(t.sum((0, 1)))
    return max(mi, 0.0)


def _check_dims(aux: AuxiliaryJoint, x_size: int):
    if aux.x_size != x_size:
        raise DimensionMismatch(
            f"auxiliary has |X|={aux.x_size}, channel expects {x_size}")


def output_mi(aux: AuxiliaryJoint, v: StochasticMatrix) -> Bits:
    """I(U;Z) under p(u,x) v(z|x) (any Q axis is marginalized out)."""
    _check_dims(aux, v.input_size)
    p_uz = aux.drop_q().table @ v.rows
    return mutual_information(p_uz / p_uz.sum())


# --------------------------------------------------------------------------
# convex minimization of I(U;Z|Q) over the state simplex

def _state_tensor(uxq: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """Per-vertex joints ``A[b, s, q, u, z] = sum_x p(u,x,q) V_s(z|x)``."""
    return np.einsum("buxq,sxz->bsquz", uxq, stack, optimize=True)


def _cmi_const(uxq: np.ndarray) -> np.ndarray:
    """Weight-independent part of I(U;Z|Q) in nats, per batch item."""
    p_qu = uxq.sum(axis=2)
    p_q = p_qu.sum(axis=1)
    return -_xlogx(p_qu).sum(axis=(1, 2)) + _xlogx(p_q).sum(axis=1)


def _cmi_value(P: np.ndarray, const: np.ndarray) -> np.ndarray:
    """I(U;Z|Q) in nats from joints ``P[b, q, u, z]``."""
    return _xlogx(P).sum(axis=(1, 2, 3)) - _xlogx(P.sum(axis=2)).sum(axis=(1, 2)) + const


def _mix(A: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return np.einsum("bs,bsquz->bquz", lam, A)


def _cmi_grad(A: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Gradient of I(U;Z|Q) (nats) w.r.t. the weights, up to a common shift."""
    return (np.einsum("bsquz,bquz->bs", A, _safe_log(P))
            - np.einsum("bsqz,bqz->bs", A.sum(axis=3), _safe_log(P.sum(axis=2))))


def _line_search(P: np.ndarray, dP: np.ndarray, gmax: np.ndarray, iters: int = 50) -> np.ndarray:
    """Exact minimizing step on [0, gmax] along ``P + g*dP`` (safeguarded Newton)."""
    Pz, dPz = P.sum(axis=2), dP.sum(axis=2)

    def derivs(g):
        Pg = np.maximum(P + g[:, None, None, None] * dP, 0.0)
        Pgz = np.maximum(Pz + g[:, None, None] * dPz, 0.0)
        d1 = ((dP * _safe_log(Pg)).sum(axis=(1, 2, 3))
              - (dPz * _safe_log(Pgz)).sum(axis=(1, 2)))
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = np.where(Pg > 0, dP * dP / Pg, np.where(dP != 0, np.inf, 0.0))
            t2 = np.where(Pgz > 0, dPz * dPz / Pgz, 0.0)
        d2 = t1.sum(axis=(1, 2, 3)) - t2.sum(axis=(1, 2))
        return d1, d2

    lo = np.zeros_like(gmax)
    hi = gmax.copy()
    d_lo, _ = derivs(lo)
    d_hi, _ = derivs(hi)
    g = np.where(d_hi <= 0, hi, 0.5 * hi)
    g = np.where(d_lo >= 0, 0.0, g)
    live = (d_lo < 0) & (d_hi > 0)
    for _ in range(iters):
        if not live.any():
            break
        d1, d2 = derivs(g)
        hi = np.where(live & (d1 > 0), g, hi)
        lo = np.where(live & (d1 <= 0), g, lo)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = g - d1 / d2
        ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
        g_new = np.where(ok, newton, 0.5 * (lo + hi))
        g_new = np.where(live, g_new, g)
        live = live & (np.abs(g_new - g) > 1e-15 * np.maximum(1.0, gmax)) & (hi - lo > 1e-16)
        g = g_new
    return g


def _pairwise_fw(A, const, lam0, tol_nats, max_iter):
    """Batched pairwise Frank-Wolfe. Returns (weights, values_nats, gaps_nats)."""
    lam = np.array(lam0, dtype=float)
    B, S = lam.shape
    gap = np.full(B, np.inf)
    live = np.ones(B, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(live)
        if idx.size == 0:
            break
        Ai, li = A[idx], lam[idx]
        P = _mix(Ai, li)
        g = _cmi_grad(Ai, P)
        r = np.arange(idx.size)
        fw = np.argmin(g, axis=1)
        gi = (g * li).sum(axis=1) - g[r, fw]
        gap[idx] = gi
        move = gi > tol_nats
        live[idx[~move]] = False
        if not move.any():
            break
        m = np.flatnonzero(move)
        away = np.argmax(np.where(li[m] > 0, g[m], -np.inf), axis=1)
        fwm = fw[m]
        gmax = li[m, away]
        dP = Ai[m, fwm] - Ai[m, away]
        step = _line_search(P[m], dP, gmax)
        lm = li[m]
        rm = np.arange(m.size)
        lm[rm, fwm] += step
        lm[rm, away] = np.where(step >= gmax, 0.0, lm[rm, away] - step)
        lm = np.clip(lm, 0.0, None)
        lam[idx[m]] = lm / lm.sum(axis=1, keepdims=True)
    # final certificate at returned weights
    P = _mix(A, lam)
    g = _cmi_grad(A, P)
    gap = (g * lam).sum(axis=1) - g.min(axis=1)
    return lam, _cmi_value(P, const), gap


def _starts(S: int) -> np.ndarray:
    return np.vstack([np.eye(S), np.full((1, S), 1.0 / S)])


def _pick(values, lams, tol):
    """Minimum value; near-ties go to the lexicographically smallest support."""
    vmin = values.min()
    cands = np.flatnonzero(values <= vmin + tol)

    def key(k):
        return (tuple(np.flatnonzero(lams[k] > 1e-12)), values[k])

    return min(cands, key=key)


def min_state_mi_many(uxq: np.ndarray, family: StateFamily, tol: float = 1e-9,
                      max_iter: int = 10_000, extra_starts: np.ndarray | None = None):
    """Vectorized ``min_state_mi`` over a batch of joints ``uxq[b, u, x, q]``.

    Returns ``(values_bits, weights, gaps_bits)``; does not raise on budget
    exhaustion, the caller inspects ``gaps``.
    """
    uxq = np.asarray(uxq, dtype=float)
    B = uxq.shape[0]
    S = len(family)
    if uxq.shape[2] != family.input_size:
        raise DimensionMismatch(
            f"auxiliary has |X|={uxq.shape[2]}, states expect {family.input_size}")
    A = _state_tensor(uxq, family.stack)
    const = _cmi_const(uxq)
    if S == 1:
        lam = np.ones((B, 1))
        vals = _cmi_value(A[:, 0], const)
        return np.maximum(vals / LN2, 0.0), lam, np.zeros(B)
    st = _starts(S)
    if extra_starts is not None:
        st = np.vstack([st, np.atleast_2d(extra_starts)])
    k = st.shape[0]
    Ab = np.repeat(A, k, axis=0)
    cb = np.repeat(const, k)
    lam0 = np.tile(st, (B, 1))
    lam, vals, gaps = _pairwise_fw(Ab, cb, lam0, tol * LN2, max_iter)
    vals = vals.reshape(B, k) / LN2
    gaps = gaps.reshape(B, k) / LN2
    lam = lam.reshape(B, k, S)
    out_v, out_l, out_g = np.empty(B), np.empty((B, S)), np.empty(B)
    for b in range(B):
        j = _pick(vals[b], lam[b], tol)
        out_v[b], out_g[b] = vals[b, j], gaps[b, j]
        w = np.where(lam[b, j] > 1e-12, lam[b, j], 0.0)
        out_l[b] = w / w.sum()
    return np.maximum(out_v, 0.0), out_l, out_g


def min_state_mi(aux: AuxiliaryJoint, family: StateFamily, tol: float = 1e-9,
                 max_iter: int = 10_000, extra_starts=None) -> tuple[Bits, StateWeights]:
    """min over the convex hull of the states of I(U;Z), or of I(U;Z|Q) when
    ``aux`` carries a time-sharing axis.

    Raises :class:`NonConvergence` if the Frank-Wolfe gap is still above
    ``tol`` after ``max_iter`` iterations.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_dims(aux, family.input_size)
    vals, lams, gaps = min_state_mi_many(aux.uxq()[None], family, tol, max_iter, extra_starts)
    w = StateWeights(lams[0])
    if gaps[0] > tol:
        raise NonConvergence(f"duality gap {gaps[0]:.3g} > tol {tol:.3g}",
                             value=float(vals[0]), weights=w, gap=float(gaps[0]))
    return float(vals[0]), w


def cmi_at(aux: AuxiliaryJoint, family: StateFamily, weights) -> Bits:
    """I(U;Z|Q) (or I(U;Z)) under the mixed state ``weights``."""
    _check_dims(aux, family.input_size)
    w = weights.weights if isinstance(weights, StateWeights) else np.asarray(weights, float)
    uxq = aux.uxq()[None]
    A = _state_tensor(uxq, family.stack)
    v = _cmi_value(_mix(A, w[None]), _cmi_const(uxq))
    return max(float(v[0] / LN2), 0.0)


# --------------------------------------------------------------------------
# channel capacity

def _kl_rows(W: np.ndarray, r: np.ndarray) -> np.ndarray:
    """D(W(.|x) || r) in nats for each input x."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(W > 0, W * (np.log(np.where(W > 0, W, 1.0)) - _safe_log(r)[None, :]), 0.0)
    return t.sum(axis=1)


def _newton_polish(W: np.ndarray, p: np.ndarray, current: float) -> np.ndarray:
    """One constrained Newton step for max I(p) on the support of ``p``.

    Blahut-Arimoto crawls when the capacity surface is nearly flat; a Newton
    step there lands close to the optimum. Returned only if it improves I.
    """
    keep = p > 1e-9 * p.max()
    Ws = W[keep]
    r = p @ W
    ok = r > 0
    g = _kl_rows(W, r)[keep]
    H = -(Ws[:, ok] / r[ok]) @ Ws[:, ok].T
    n = int(keep.sum())
    K = np.zeros((n + 1, n + 1))
    K[:n, :n] = H
    K[:n, n] = K[n, :n] = 1.0
    rhs = np.concatenate([-g, [0.0]])
    step = np.linalg.lstsq(K, rhs, rcond=None)[0][:n]
    t = 1.0
    for _ in range(30):
        q = p.copy()
        q[keep] = p[keep] + t * step
        if q.min() >= 0:
            q /= q.sum()
            if float(q @ _kl_rows(W, q @ W)) > current:
                return q
        t *= 0.5
    return p


def blahut_arimoto(ch: StochasticMatrix, tol: float = 1e-9, max_iter: int = 100_000,
                   p0=None) -> tuple[Bits, Bits, np.ndarray]:
    """Alternating maximization for max_p I(X;Y).

    Returns ``(lower, upper, p)`` where ``lower = I(p)`` and
    ``upper = max_x D(W_x || pW)`` bracket the capacity; stops once
    ``upper - lower < tol``.
    """
    W = ch.rows if isinstance(ch, StochasticMatrix) else np.asarray(ch, float)
    nx = W.shape[0]
    p = np.full(nx, 1.0 / nx)
    if p0 is not None:
        # keep every input reachable; a weight near underflow never recovers
        p = 0.999 * np.asarray(p0, float) / np.sum(p0) + 0.001 * p
    for it in range(max_iter):
        D = _kl_rows(W, p @ W)
        lower, upper = float(p @ D), float(D.max())
        if (upper - lower) / LN2 < tol:
            return max(lower / LN2, 0.0), upper / LN2, p
        if it % 200 == 199:
            p = _newton_polish(W, p, lower)
            continue
        p = p * np.exp(D - D.max())
        p /= p.sum()
    raise NonConvergence(f"Blahut-Arimoto gap {(upper - lower) / LN2:.3g} after {max_iter} iterations",
                         value=lower / LN2, gap=(upper - lower) / LN2)


def shannon_capacity(ch: StochasticMatrix, tol: float = 1e-9) -> Bits:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return blahut_arimoto(ch, tol)[0]


def min_state_capacity(family: StateFamily, tol: float = 1e-8,
                       max_iter: int = 20_000) -> tuple[Bits, StateWeights]:
    """min over the state hull of C_Sh(V_s).

    Solved from the input side: ``g(p) = min_s I(p; V_s)`` is concave and
    its maximum equals the min-max capacity (the saddle function is concave
    in ``p`` and convex in the weights). Each step minimizes over the weights
    exactly (warm-started Frank-Wolfe) and then applies a Blahut-Arimoto style
    multiplicative update to ``p`` with backtracking. The bracket
    ``g(p) <= value <= max_x D(V*(.|x) || p V*)`` certifies the result.
    """
    stack = family.stack
    S, nx = len(family), family.input_size
    if S == 1:
        return blahut_arimoto(family.vertices[0], tol)[0], StateWeights(np.ones(1))
    inner_tol = tol / 10.0

    def inner(p, lam0):
        uxq = np.diag(p)[None, :, :, None]
        A = _state_tensor(uxq, stack)
        lam, val, gap = _pairwise_fw(A, _cmi_const(uxq), np.atleast_2d(lam0),
                                     inner_tol * LN2, 10_000)
        return lam[0], val[0], gap[0]

    p = np.full(nx, 1.0 / nx)
    lam0 = np.vstack([np.eye(S), np.full((1, S), 1.0 / S)])
    vals = [inner(p, l) for l in lam0]
    lam, g, gap = min(vals, key=lambda t: t[1])
    best_lb, best_ub, best_lam = -np.inf, np.inf, lam
    eta = 1.0
    for _ in range(max_iter):
        V = np.tensordot(lam, stack, axes=1)
        D = _kl_rows(V, p @ V)
        best_lb = max(best_lb, (g - gap) / LN2)
        if D.max() / LN2 < best_ub:
            best_ub, best_lam = D.max() / LN2, lam
        if best_ub - best_lb < tol:
            break
        while True:
            q = p * np.exp(eta * (D - D.max()))
            q = np.maximum(q / q.sum(), 1e-15)
            q /= q.sum()
            lam_q, g_q, gap_q = inner(q, lam)
            if g_q >= g or eta < 1e-6:
                break
            eta *= 0.5
        p, lam, g, gap = q, lam_q, g_q, gap_q
        eta = min(1e6, 2.0 * eta)
    else:
        raise NonConvergence(f"saddle gap {best_ub - best_lb:.3g} > tol {tol:.3g}",
                             value=max(best_lb, 0.0), weights=StateWeights(best_lam),
                             gap=best_ub - best_lb)
    # the lower end of the bracket is achievable by a single input law
    return max(best_lb, 0.0), StateWeights(best_lam)
