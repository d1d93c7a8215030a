"""Monte-Carlo error estimates for short superposition codes.

Codes are i.i.d. superposition codebooks decoded by exhaustive maximum
likelihood. This is a qualitative instrument: at blocklengths up to 16 it
shows error trends inside versus outside the region and cannot certify
capacity.

Randomness is split into fixed-size trial chunks, each with its own stream
derived from (seed, chunk index), so estimates do not depend on how chunks
are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import (AuxiliaryJoint, DimensionMismatch, StateFamily,
                       StateWeights, StochasticMatrix)
from .infomeasures import min_state_mi

MAX_N = 16
MAX_SEQUENCES = 4096
MAX_CODEWORDS = 1 << 16
CHUNK = 4096
_TIE = 1e-9


class TooLarge(ValueError):
    pass


class DegenerateAux(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


def message_count(n: int, rate: float) -> int:
    return max(1, int(round(2.0 ** (n * rate))))


@dataclass(frozen=True, eq=False)
class SuperpositionCode:
    n: int
    cloud: np.ndarray        # (Mc, n) cloud-center symbols
    satellites: np.ndarray   # (Mc, Mp, n) channel inputs
    rc: float
    rp: float
    seed: int
    x_given_u: np.ndarray    # (U, X)

    @property
    def mc(self) -> int:
        return self.cloud.shape[0]

    @property
    def mp(self) -> int:
        return self.satellites.shape[1]

    @property
    def codewords(self) -> np.ndarray:
        return self.satellites.reshape(-1, self.n)


@dataclass(frozen=True)
class ErrorEstimate:
    p_err: float
    trials: int
    half_width: float
    errors: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_err <= 1.0:
            raise ValueError("error probability outside [0, 1]")


def _estimate(errors: int, trials: int) -> ErrorEstimate:
    p = errors / trials
    return ErrorEstimate(p, trials, float(1.96 * np.sqrt(p * (1 - p) / trials)), int(errors))


def _inverse_cdf(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Sample indices from the rows ``cdf[..., :]`` using uniforms ``u``."""
    k = (u[..., None] >= cdf).sum(axis=-1)
    return np.minimum(k, cdf.shape[-1] - 1)


def generate_code(aux: AuxiliaryJoint, n: int, rc: float, rp: float, seed: int) -> SuperpositionCode:
    if n < 1:
        raise ValueError("blocklength must be >= 1")
    if n > MAX_N:
        raise TooLarge(f"blocklength {n} exceeds {MAX_N}")
    if rc < 0 or rp < 0:
        raise ValueError("rates must be nonnegative")
    if aux.has_q:
        aux = aux.drop_q()
    mc, mp = message_count(n, rc), message_count(n, rp)
    if mc * mp > MAX_CODEWORDS:
        raise TooLarge(f"{mc * mp} codewords exceed {MAX_CODEWORDS}")
    p_u = aux.p_u
    if not np.any(p_u > 0):
        raise DegenerateAux("p_U has empty support")
    tab = aux.table
    with np.errstate(invalid="ignore", divide="ignore"):
        x_given_u = np.where(p_u[:, None] > 0, tab / p_u[:, None], 1.0 / aux.x_size)
    rng = np.random.default_rng(seed)
    cloud = _inverse_cdf(np.cumsum(p_u), rng.random((mc, n)))
    cdf = np.cumsum(x_given_u, axis=1)
    sat = _inverse_cdf(cdf[cloud[:, None, :]], rng.random((mc, mp, n)))
    return SuperpositionCode(n, cloud, sat, rc, rp, seed, x_given_u)


def _log(a):
    with np.errstate(divide="ignore"):
        return np.log(a)


def _argmax_first(ll: np.ndarray) -> np.ndarray:
    """Row-wise argmax; near-ties go to the smallest index."""
    top = ll.max(axis=1, keepdims=True)
    return np.argmax(ll >= top - _TIE, axis=1)


def _check_len(code, seq):
    if len(seq) != code.n:
        raise LengthMismatch(f"sequence length {len(seq)} != blocklength {code.n}")


def _y_loglik(code: SuperpositionCode, y: np.ndarray, W: np.ndarray) -> np.ndarray:
    LW = _log(W)
    cw = code.codewords
    ll = np.zeros((len(y), len(cw)))
    for i in range(code.n):
        ll += LW[cw[:, i]][:, y[:, i]].T
    return ll


def decode_y(code: SuperpositionCode, y_seq, w: StochasticMatrix) -> tuple[int, int]:
    """Maximum-likelihood message pair under W^n."""
    _check_len(code, y_seq)
    ll = _y_loglik(code, np.asarray(y_seq)[None, :], w.rows)
    k = int(_argmax_first(ll)[0])
    return divmod(k, code.mp)


def _as_channels(v_seq, n: int) -> np.ndarray:
    if isinstance(v_seq, StochasticMatrix):
        return np.repeat(v_seq.rows[None], n, axis=0)
    arr = [v.rows if isinstance(v, StochasticMatrix) else np.asarray(v, float) for v in v_seq]
    arr = np.array(arr)
    if arr.ndim == 2:
        arr = np.repeat(arr[None], n, axis=0)
    if len(arr) != n:
        raise LengthMismatch(f"{len(arr)} channels for blocklength {n}")
    return arr


def _z_logtable(code: SuperpositionCode, v: np.ndarray) -> np.ndarray:
    """log p(z|u) per index, induced by p(x|u) and the nominal channels."""
    if v.shape[1] != code.x_given_u.shape[1]:
        raise DimensionMismatch("nominal channel input size differs from the code alphabet")
    return _log(np.einsum("ux,ixz->iuz", code.x_given_u, v))


def _z_loglik(code: SuperpositionCode, z: np.ndarray, LT: np.ndarray) -> np.ndarray:
    ll = np.zeros((len(z), code.mc))
    for i in range(code.n):
        ll += LT[i][code.cloud[:, i]][:, z[:, i]].T
    return ll


def decode_z(code: SuperpositionCode, z_seq, v_seq) -> int:
    """Maximum-likelihood cloud index given nominal per-symbol channels."""
    _check_len(code, z_seq)
    LT = _z_logtable(code, _as_channels(v_seq, code.n))
    return int(_argmax_first(_z_loglik(code, np.asarray(z_seq)[None, :], LT))[0])


# --------------------------------------------------------------------------
# adversaries

def _index_aux(code: SuperpositionCode, i: int, aux_proxy: str) -> AuxiliaryJoint:
    X = code.x_given_u.shape[1]
    x = code.satellites[:, :, i]                      # (Mc, Mp)
    if aux_proxy == "cloud":
        keys = np.repeat(code.cloud[:, i:i + 1], code.mp, axis=1)
        size = code.x_given_u.shape[0]
    elif aux_proxy == "message":
        keys = np.repeat(np.arange(code.mc)[:, None], code.mp, axis=1)
        size = code.mc
    else:
        raise ValueError(f"unknown aux_proxy {aux_proxy!r}")
    t = np.zeros((size, X))
    np.add.at(t, (keys.ravel(), x.ravel()), 1.0)
    return AuxiliaryJoint(t / t.sum())


def greedy_adversary(code: SuperpositionCode, family: StateFamily,
                     aux_proxy: str = "cloud", tol: float = 1e-9) -> list[StateWeights]:
    """Per index, the state mixture minimizing I(U_i; Z_i) on the codebook's
    empirical joint of (proxy, input)."""
    if family.input_size != code.x_given_u.shape[1]:
        raise DimensionMismatch("family input size differs from the code alphabet")
    return [min_state_mi(_index_aux(code, i, aux_proxy), family, tol)[1] for i in range(code.n)]


def plan_weights(plan, family: StateFamily, n: int) -> np.ndarray:
    """Normalize a plan (vertex indices or StateWeights) to an (n, S) array."""
    S = len(family)
    out = np.zeros((n, S))
    if len(plan) != n:
        raise LengthMismatch(f"plan length {len(plan)} != blocklength {n}")
    for i, s in enumerate(plan):
        if isinstance(s, StateWeights):
            out[i] = s.weights
        elif np.ndim(s) == 0:
            out[i, int(s)] = 1.0
        else:
            out[i] = np.asarray(s, float)
    return out


def averaged_nominal(weights: np.ndarray, family: StateFamily) -> np.ndarray:
    """The plan's weights averaged over time, as one channel used at every index."""
    lam = weights.mean(axis=0)
    v = np.einsum("s,sxz->xz", lam, family.stack)
    return np.repeat(v[None], weights.shape[0], axis=0)


class _Draws:
    """Common random numbers for one chunk of trials."""

    def __init__(self, seed: int, chunk: int, size: int, code: SuperpositionCode):
        rng = np.random.default_rng(np.random.SeedSequence([seed, chunk]))
        self.m_c = rng.integers(code.mc, size=size)
        self.m_p = rng.integers(code.mp, size=size)
        self.uy = rng.random((size, code.n))
        self.uz = rng.random((size, code.n))
        self.x = code.satellites[self.m_c, self.m_p]


def _chunks(trials: int):
    for c, start in enumerate(range(0, trials, CHUNK)):
        yield c, min(CHUNK, trials - start)


def _y_errors(code, W, d: _Draws) -> np.ndarray:
    y = _inverse_cdf(np.cumsum(W, axis=1)[d.x], d.uy)
    k = _argmax_first(_y_loglik(code, y, W))
    return k != d.m_c * code.mp + d.m_p


def estimate_error(code: SuperpositionCode, w: StochasticMatrix, state_plan,
                   trials: int, seed: int, family: StateFamily | None = None,
                   nominal=None) -> ErrorEstimate:
    """Message-averaged error under a state plan.

    ``state_plan`` is a sequence of vertex indices or StateWeights (one per
    symbol) for ``family``, or a sequence of channels when ``family`` is None.
    Y and Z are drawn independently given the input and state. The Z decoder
    uses ``nominal`` channels, by default the plan averaged over time.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = code.n
    if family is None:
        V = _as_channels(state_plan, n)
        default_nominal = np.repeat(V.mean(axis=0)[None], n, axis=0)
    else:
        lam = plan_weights(state_plan, family, n)
        V = np.einsum("is,sxz->ixz", lam, family.stack)
        default_nominal = averaged_nominal(lam, family)
    LT = _z_logtable(code, default_nominal if nominal is None else _as_channels(nominal, n))
    Wr = w.rows
    cdfV = np.cumsum(V, axis=2)
    errors = 0
    for c, size in _chunks(trials):
        d = _Draws(seed, c, size, code)
        err = _y_errors(code, Wr, d)
        z = _inverse_cdf(cdfV[np.arange(n), d.x], d.uz)
        err |= _argmax_first(_z_loglik(code, z, LT)) != d.m_c
        errors += int(err.sum())
    return _estimate(errors, trials)


def gray_sequences(n: int, S: int):
    """All of range(S)^n in reflected Gray order; neighbours differ in one place."""
    if n == 0:
        yield ()
        return
    prev = list(gray_sequences(n - 1, S))
    for d in range(S):
        for tail in (prev if d % 2 == 0 else reversed(prev)):
            yield (d,) + tail


def exhaustive_adversary(code: SuperpositionCode, family: StateFamily, w: StochasticMatrix,
                         trials: int, seed: int, nominal=None):
    """Worst vertex-valued state sequence for the code, by enumeration.

    All sequences share the same messages and noise uniforms, so estimates
    are directly comparable. The Z decoder's nominal channels default to the
    greedy plan averaged over time, fixed before any state is chosen.
    Returns (sequence, estimate); ties go to the lexicographically smallest.
    """
    n, S = code.n, len(family)
    if S ** n > MAX_SEQUENCES:
        raise TooLarge(f"{S}^{n} state sequences exceed {MAX_SEQUENCES}")
    if nominal is None:
        nominal = averaged_nominal(plan_weights(greedy_adversary(code, family), family, n), family)
    LT = _z_logtable(code, _as_channels(nominal, n))
    cdf = np.cumsum(family.stack, axis=2)            # (S, X, Z)
    seqs = list(gray_sequences(n, S))
    errors = np.zeros(len(seqs), dtype=np.int64)
    for c, size in _chunks(trials):
        d = _Draws(seed, c, size, code)
        y_err = _y_errors(code, w.rows, d)
        # contrib[i][s]: log-likelihood contribution of index i when state s is active
        contrib = np.empty((n, S, size, code.mc))
        for i in range(n):
            for s in range(S):
                z = _inverse_cdf(cdf[s][d.x[:, i]], d.uz[:, i])
                contrib[i, s] = LT[i][code.cloud[:, i]][:, z].T
        cur = seqs[0]
        ll = contrib[np.arange(n), list(cur)].sum(axis=0)
        for k, seq in enumerate(seqs):
            if k:
                i = next(j for j in range(n) if seq[j] != cur[j])
                ll += contrib[i, seq[i]] - contrib[i, cur[i]]
                cur = seq
            # recompute from scratch now and then to bound rounding drift
            if k % 256 == 255:
                ll = contrib[np.arange(n), list(cur)].sum(axis=0)
            errors[k] += int((y_err | (_argmax_first(ll) != d.m_c)).sum())
    order = sorted(range(len(seqs)), key=lambda k: (-errors[k], seqs[k]))
    best = order[0]
    return seqs[best], _estimate(int(errors[best]), trials)

