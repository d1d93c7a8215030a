"""Independent reference computations used by the tests.

Everything here is written from the definitions with plain loops or direct
grid enumeration, sharing no code with the package beyond its data types.
"""

import itertools
import math

import numpy as np


def h2(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def conv(a, d):
    return a * (1 - d) + (1 - a) * d


def mi_from_joint(P):
    """I(A;B) in bits from a 2-D joint table, by loops."""
    P = np.asarray(P, dtype=float)
    pa = P.sum(axis=1)
    pb = P.sum(axis=0)
    total = 0.0
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            if P[i, j] > 0:
                total += P[i, j] * math.log2(P[i, j] / (pa[i] * pb[j]))
    return total


def cmi_uz_given_q(uxq, V):
    """I(U;Z|Q) in bits for p(u,x,q) and one channel V(z|x), by loops."""
    U, X, Q = uxq.shape
    Z = V.shape[1]
    total = 0.0
    for q in range(Q):
        pq = uxq[:, :, q].sum()
        if pq <= 0:
            continue
        joint = np.zeros((U, Z))
        for u in range(U):
            for x in range(X):
                for z in range(Z):
                    joint[u, z] += uxq[u, x, q] * V[x, z]
        total += pq * mi_from_joint(joint / pq)
    return total


def simplex_points(S, count=1000):
    """At least ``count`` points on a regular grid of the (S-1)-simplex."""
    if S == 1:
        return [np.array([1.0])]
    k = 1
    while math.comb(k + S - 1, S - 1) < count:
        k += 1
    pts = []
    for bars in itertools.combinations(range(k + S - 1), S - 1):
        edges = (-1,) + bars + (k + S - 1,)
        pts.append(np.array([edges[i + 1] - edges[i] - 1 for i in range(S)]) / k)
    return pts


def grid_min_state_mi(aux_uxq, stack, count=1000):
    """Minimum of I(U;Z|Q) over a ``count``-point grid of mixing weights."""
    best = math.inf
    for lam in simplex_points(stack.shape[0], count):
        V = np.tensordot(lam, stack, axes=1)
        best = min(best, cmi_uz_given_q(aux_uxq, V))
    return best


def capacity_grid(W, steps=2000):
    """Capacity of a binary-input channel by input-grid search."""
    W = np.asarray(W, dtype=float)
    t = np.linspace(0, 1, steps + 1)
    P = np.stack([t, 1 - t], axis=1)[:, :, None] * W[None]     # (grid, 2, Y)
    r = P.sum(axis=1, keepdims=True)
    px = P.sum(axis=2, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, P * np.log2(P / (px * r)), 0.0)
    return float(terms.sum(axis=(1, 2)).max())


def sym_residual(stack, sigma):
    """max |sum_s sigma(s|x')V_s(z|x) - sum_s sigma(s|x)V_s(z|x')| by loops."""
    S, X, Z = stack.shape
    worst = 0.0
    for x in range(X):
        for xp in range(X):
            for z in range(Z):
                lhs = sum(sigma[xp, s] * stack[s, x, z] for s in range(S))
                rhs = sum(sigma[x, s] * stack[s, xp, z] for s in range(S))
                worst = max(worst, abs(lhs - rhs))
    return worst


def bs_closed_form_hull_points(p, p_max, n_alpha=2001):
    """Vertices of the per-alpha polytopes of the binary-symmetric example."""
    pts = [(0.0, 0.0)]
    s = 1 - h2(p)
    for a in np.linspace(0, 0.5, n_alpha):
        rc = 1 - h2(conv(a, p_max))
        rp = max(h2(conv(a, p)) - h2(p), 0.0)
        c = min(rc, s)
        pts += [(c, 0.0), (c, max(0.0, min(s - c, rp))), (max(0.0, min(s - rp, rc)), rp), (0.0, rp)]
    return pts
