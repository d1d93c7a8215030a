"""Finite-alphabet channel model for the semi-arbitrarily-varying broadcast channel.

The ordinary receiver sees a fixed DMC ``W(y|x)``; the robust receiver sees
``V_s(z|x)`` where the state ``s`` ranges over the convex hull of a finite
list of vertex channels.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ROW_TOL = 1e-9
PMF_TOL = 1e-9


class ChannelError(ValueError):
    """Base class for invalid channel or distribution data."""


class EmptyMatrix(ChannelError):
    pass


class NegativeEntry(ChannelError):
    pass


class RowSumNotOne(ChannelError):
    pass


class DimensionMismatch(ChannelError):
    pass


class OutOfRange(ChannelError):
    pass


class ParseError(ChannelError):
    pass


class ValidationError(ChannelError):
    """Spec document is well-formed but its content is invalid.

    ``location`` names the offending field/row, e.g. ``states[1].V[0]``.
    """

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Row-stochastic matrix ``rows[x, y] = P(y|x)``."""

    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _frozen(self.rows))

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows.shape

    def tolist(self) -> list[list[float]]:
        return self.rows.tolist()

    def __eq__(self, other):
        if not isinstance(other, StochasticMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.rows, other.rows))

    def __hash__(self):
        return hash((self.shape, self.rows.tobytes()))

    def __repr__(self):
        return f"StochasticMatrix({self.rows.tolist()})"


def validate_matrix(rows, location: str = "") -> StochasticMatrix:
    """Check ``rows`` is a nonempty rectangular row-stochastic table.

    Row sums may be off by up to 1e-9 (text round-off); rows off by more
    than 1e-12 are renormalized.
    """
    where = f"{location}: " if location else ""
    try:
        a = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise EmptyMatrix(f"{where}not a rectangular numeric table ({exc})") from None
    if a.ndim != 2 or a.size == 0:
        raise EmptyMatrix(f"{where}expected a nonempty 2-D table, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NegativeEntry(f"{where}non-finite entry")
    neg = np.argwhere(a < 0)
    if len(neg):
        r, c = neg[0]
        raise NegativeEntry(f"{where}row {r} column {c} is negative ({a[r, c]})")
    sums = a.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_TOL)
    if len(bad):
        r = bad[0]
        raise RowSumNotOne(f"{where}row {r} sums to {sums[r]!r}")
    # rows already stochastic to 1e-12 are kept verbatim so documents round-trip
    fix = np.abs(sums - 1.0) > 1e-12
    a[fix] /= sums[fix, None]
    return StochasticMatrix(a)


def bsc(p: float) -> StochasticMatrix:
    """Binary symmetric channel with crossover probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"crossover probability {p} not in [0, 1]")
    return StochasticMatrix(np.array([[1.0 - p, p], [p, 1.0 - p]]))


def identity_channel(size: int) -> StochasticMatrix:
    return StochasticMatrix(np.eye(size))


@dataclass(frozen=True)
class StateWeights:
    """PMF over the vertex list of a :class:`StateFamily`."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DimensionMismatch("state weights must be a nonempty vector")
        if np.any(w < -1e-12):
            raise NegativeEntry(f"negative state weight in {w}")
        if abs(w.sum() - 1.0) > 1e-12 * max(1, w.size):
            raise RowSumNotOne(f"state weights sum to {w.sum()!r}")
        w = np.clip(w, 0.0, None)
        object.__setattr__(self, "weights", _frozen(w / w.sum()))

    @classmethod
    def vertex(cls, index: int, count: int) -> "StateWeights":
        w = np.zeros(count)
        w[index] = 1.0
        return cls(w)

    @classmethod
    def uniform(cls, count: int) -> "StateWeights":
        return cls(np.full(count, 1.0 / count))

    def __len__(self):
        return self.weights.size

    def support(self, thresh: float = 1e-12) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.weights > thresh))

    def __eq__(self, other):
        if not isinstance(other, StateWeights):
            return NotImplemented
        return bool(np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash(self.weights.tobytes())


@dataclass(frozen=True)
class StateFamily:
    """Vertex channels whose convex hull is the adversary's state set."""

    vertices: tuple[StochasticMatrix, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        verts = tuple(self.vertices)
        if not verts:
            raise EmptyMatrix("state family needs at least one vertex")
        shape = verts[0].shape
        for i, v in enumerate(verts):
            if v.shape != shape:
                raise DimensionMismatch(
                    f"state {i} has shape {v.shape}, expected {shape}")
        names = tuple(self.names) or tuple(f"s{i}" for i in range(len(verts)))
        if len(names) != len(verts):
            raise DimensionMismatch("one name per state vertex required")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_stack", _frozen(np.stack([v.rows for v in verts])))

    @property
    def stack(self) -> np.ndarray:
        """Array of shape (S, X, Z)."""
        return self._stack

    def __len__(self):
        return len(self.vertices)

    @property
    def input_size(self) -> int:
        return self.vertices[0].input_size

    @property
    def output_size(self) -> int:
        return self.vertices[0].output_size

    def with_vertex(self, v: StochasticMatrix, name: str | None = None) -> "StateFamily":
        return StateFamily(self.vertices + (v,),
                           self.names + (name or f"s{len(self)}",))


def mix_states(family: StateFamily, w: StateWeights | Sequence[float]) -> StochasticMatrix:
    """Entrywise convex combination ``sum_s w_s V_s``."""
    if not isinstance(w, StateWeights):
        w = StateWeights(np.asarray(w, dtype=float))
    if len(w) != len(family):
        raise DimensionMismatch(
            f"{len(w)} weights for a family of {len(family)} states")
    mixed = np.tensordot(w.weights, family.stack, axes=1)
    return StochasticMatrix(mixed / mixed.sum(axis=1, keepdims=True))


@dataclass(frozen=True)
class SavbcSpec:
    w: StochasticMatrix
    family: StateFamily
    x_size: int = field(init=False)
    y_size: int = field(init=False)
    z_size: int = field(init=False)

    def __post_init__(self):
        if self.w.input_size != self.family.input_size:
            raise DimensionMismatch(
                f"W has {self.w.input_size} inputs but states have {self.family.input_size}")
        object.__setattr__(self, "x_size", self.w.input_size)
        object.__setattr__(self, "y_size", self.w.output_size)
        object.__setattr__(self, "z_size", self.family.output_size)

    def digest(self) -> str:
        return hashlib.sha256(emit_spec(self).encode()).hexdigest()


@dataclass(frozen=True, eq=False)
class AuxiliaryJoint:
    """Joint PMF of the auxiliary ``U``, the input ``X`` and optionally a
    time-sharing variable ``Q``.

    ``table`` has shape (U, X) or (U, X, Q).
    """

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim not in (2, 3) or t.size == 0:
            raise DimensionMismatch(f"auxiliary table must be 2-D or 3-D, got {t.shape}")
        if np.any(t < -1e-15):
            raise NegativeEntry("negative probability in auxiliary joint")
        total = t.sum()
        if abs(total - 1.0) > PMF_TOL:
            raise RowSumNotOne(f"auxiliary joint sums to {total!r}")
        t = np.clip(t, 0.0, None)
        object.__setattr__(self, "table", _frozen(t / t.sum()))

    @property
    def u_size(self) -> int:
        return self.table.shape[0]

    @property
    def x_size(self) -> int:
        return self.table.shape[1]

    @property
    def q_size(self) -> int:
        return self.table.shape[2] if self.table.ndim == 3 else 1

    @property
    def has_q(self) -> bool:
        return self.table.ndim == 3

    def uxq(self) -> np.ndarray:
        """Table as (U, X, Q), adding a singleton Q axis when absent."""
        return self.table if self.has_q else self.table[:, :, None]

    @property
    def p_u(self) -> np.ndarray:
        return self.uxq().sum(axis=(1, 2))

    @property
    def p_x(self) -> np.ndarray:
        return self.uxq().sum(axis=(0, 2))

    def merge_q(self) -> "AuxiliaryJoint":
        """Absorb Q into the auxiliary: ``U' = (U, Q)`` with index ``u*|Q| + q``."""
        t = self.uxq()
        return AuxiliaryJoint(t.transpose(0, 2, 1).reshape(self.u_size * self.q_size, self.x_size))

    def drop_q(self) -> "AuxiliaryJoint":
        return AuxiliaryJoint(self.uxq().sum(axis=2))

    # common constructions
    @classmethod
    def identity(cls, p_x) -> "AuxiliaryJoint":
        """U = X."""
        return cls(np.diag(np.asarray(p_x, dtype=float)))

    @classmethod
    def constant(cls, p_x) -> "AuxiliaryJoint":
        """U deterministic."""
        return cls(np.asarray(p_x, dtype=float)[None, :])

    @classmethod
    def independent(cls, p_u, p_x) -> "AuxiliaryJoint":
        return cls(np.outer(p_u, p_x))

    @classmethod
    def binary_superposition(cls, alpha: float) -> "AuxiliaryJoint":
        """U ~ Bern(1/2), X = U xor Bern(alpha)."""
        if not 0.0 <= alpha <= 1.0:
            raise OutOfRange(f"alpha {alpha} not in [0, 1]")
        return cls(0.5 * np.array([[1 - alpha, alpha], [alpha, 1 - alpha]]))


# --------------------------------------------------------------------------
# spec documents

_TOP_FIELDS = {"x_size", "y_size", "z_size", "W", "states", "description"}
_STATE_FIELDS = {"name", "V"}


def parse_spec(text: str) -> SavbcSpec:
    """Parse a channel-spec JSON document.

    Schema::

        {"x_size": int, "y_size": int, "z_size": int,
         "W": [[...] * y_size] * x_size,
         "states": [{"name": str, "V": [[...] * z_size] * x_size}, ...],
         "description": str  (optional)}
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    unknown = sorted(set(doc) - _TOP_FIELDS)
    if unknown:
        raise ValidationError(f"unknown field(s) {unknown}", "spec")
    for key in ("x_size", "y_size", "z_size", "W", "states"):
        if key not in doc:
            raise ValidationError("missing required field", key)
    sizes = {}
    for key in ("x_size", "y_size", "z_size"):
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ValidationError(f"must be a positive integer, got {v!r}", key)
        sizes[key] = v

    def matrix(rows, loc, n_out):
        if not isinstance(rows, list) or len(rows) != sizes["x_size"]:
            raise ValidationError(f"expected {sizes['x_size']} rows", loc)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n_out:
                raise ValidationError(f"expected {n_out} entries", f"{loc}[{i}]")
            for j, v in enumerate(row):
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ValidationError(f"not a number: {v!r}", f"{loc}[{i}][{j}]")
        try:
            return validate_matrix(rows)
        except ChannelError as exc:
            raise ValidationError(str(exc), loc) from None

    w = matrix(doc["W"], "W", sizes["y_size"])
    states = doc["states"]
    if not isinstance(states, list) or not states:
        raise ValidationError("need a nonempty list of states", "states")
    verts, names = [], []
    for k, st in enumerate(states):
        loc = f"states[{k}]"
        if not isinstance(st, dict):
            raise ValidationError("state must be an object", loc)
        unknown = sorted(set(st) - _STATE_FIELDS)
        if unknown:
            raise ValidationError(f"unknown field(s) {unknown}", loc)
        if "V" not in st:
            raise ValidationError("missing required field", f"{loc}.V")
        name = st.get("name", f"s{k}")
        if not isinstance(name, str):
            raise ValidationError("name must be a string", f"{loc}.name")
        verts.append(matrix(st["V"], f"{loc}.V", sizes["z_size"]))
        names.append(name)
    if len(set(names)) != len(names):
        raise ValidationError("state names must be unique", "states")
    return SavbcSpec(w, StateFamily(tuple(verts), tuple(names)))


def emit_spec(spec: SavbcSpec) -> str:
    doc = {
        "x_size": spec.x_size,
        "y_size": spec.y_size,
        "z_size": spec.z_size,
        "W": spec.w.tolist(),
        "states": [{"name": n, "V": v.tolist()}
                   for n, v in zip(spec.family.names, spec.family.vertices)],
    }
    return json.dumps(doc, indent=2)


def bs_savbc(p: float, p_min: float, p_max: float) -> SavbcSpec:
    """Binary-symmetric SAVBC: W = BSC(p), states span BSC(p_min)..BSC(p_max)."""
    if p_min > p_max:
        raise OutOfRange(f"p_min={p_min} exceeds p_max={p_max}")
    if p_min == p_max:
        family = StateFamily((bsc(p_max),), ("p_max",))
    else:
        family = StateFamily((bsc(p_min), bsc(p_max)), ("p_min", "p_max"))
    return SavbcSpec(bsc(p), family)


def random_spec(rng: np.random.Generator, x_size=2, y_size=2, z_size=2,
                n_states=1) -> SavbcSpec:
    """Spec with Dirichlet(1) rows; used by the verification suites."""
    w = StochasticMatrix(rng.dirichlet(np.ones(y_size), size=x_size))
    verts = tuple(StochasticMatrix(rng.dirichlet(np.ones(z_size), size=x_size))
                  for _ in range(n_states))
    return SavbcSpec(w, StateFamily(verts))
