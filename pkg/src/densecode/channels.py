"""Kraus channels, Pauli and depolarizing families, and lifting to bipartite systems."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ChannelError
from .linalg import DensityMatrix
from .qops import as_generator, random_density_matrix, random_unitary, weyl_operator

CHANNEL_TOL = 1e-9

__all__ = [
    "PauliSpec",
    "KrausChannel",
    "BipartiteChannel",
    "apply",
    "pauli_channel",
    "depolarizing_spec",
    "depolarizing_channel",
    "identity_channel",
    "lift",
    "compose",
    "two_sided_pauli",
    "two_sided_depolarizing",
    "one_sided_pauli",
    "random_unital_channel",
    "CovarianceReport",
    "verify_covariance",
]


def _check_table(q: np.ndarray) -> None:
    if np.any(~np.isfinite(q)):
        raise ChannelError("probability table has non-finite entries")
    if q.min() < -CHANNEL_TOL:
        raise ChannelError(f"negative probability {q.min()!r} in table")
    if abs(q.sum() - 1.0) > CHANNEL_TOL:
        raise ChannelError(f"probability table sums to {q.sum()!r}")


@dataclass(frozen=True)
class PauliSpec:
    """Probabilities over Weyl operators.

    ``q`` has shape ``(d, d)`` for a single-system table ``q[m, n]`` or
    ``(d, d, d, d)`` for a joint two-sided table ``q[m, n, m~, n~]``.
    """

    d: int
    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim not in (2, 4) or any(s != self.d for s in q.shape):
            raise ChannelError(f"table shape {q.shape} incompatible with d={self.d}")
        _check_table(q)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def joint(self) -> bool:
        return self.q.ndim == 4

    def to_json(self) -> str:
        return json.dumps({"d": self.d, "q": self.q.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "PauliSpec":
        obj = json.loads(text)
        return cls(int(obj["d"]), np.array(obj["q"], dtype=float))

    @classmethod
    def product(cls, qa: "PauliSpec", qb: "PauliSpec") -> "PauliSpec":
        """Joint table ``q_a[m, n] * q_b[m~, n~]`` of independent sides."""
        if qa.joint or qb.joint or qa.d != qb.d:
            raise ChannelError("product needs two single-system tables of equal d")
        return cls(qa.d, np.einsum("ab,cd->abcd", qa.q, qb.q))


def _kraus_stack(ops) -> np.ndarray:
    ops = np.asarray(ops, dtype=complex)
    if ops.ndim == 2:
        ops = ops[None]
    return ops


def _tp_unital(ops: np.ndarray) -> tuple[float, float]:
    eye = np.eye(ops.shape[1])
    tp = np.max(np.abs(np.einsum("kji,kjl->il", ops.conj(), ops) - eye))
    un = np.max(np.abs(np.einsum("kij,klj->il", ops, ops.conj()) - eye))
    return float(tp), float(un)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving map on one ``local_dim``-level system.

    ``pauli`` is set when the channel was built from a Pauli table.
    """

    local_dim: int
    kraus_ops: np.ndarray
    pauli: PauliSpec | None = None
    unital: bool = field(init=False)

    def __post_init__(self):
        ops = _kraus_stack(self.kraus_ops)
        if ops.shape[1:] != (self.local_dim, self.local_dim):
            raise ChannelError(f"Kraus operators of shape {ops.shape[1:]} on a {self.local_dim}-level system")
        tp, un = _tp_unital(ops)
        if tp > CHANNEL_TOL:
            raise ChannelError(f"Kraus operators not trace preserving (deviation {tp:.3e})")
        ops.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "unital", un <= CHANNEL_TOL)

    def __call__(self, rho):
        return apply(self, rho)


@dataclass(frozen=True, eq=False)
class BipartiteChannel:
    """Channel on ``C^dim_a (x) C^dim_b`` with full-space Kraus operators.

    ``pauli`` holds the joint table when the channel is a (possibly
    correlated) two-sided Pauli channel; it is kept even for product tables.
    """

    dim_a: int
    dim_b: int
    kraus_ops: np.ndarray
    pauli: PauliSpec | None = None
    name: str = ""
    unital: bool = field(init=False)

    def __post_init__(self):
        ops = _kraus_stack(self.kraus_ops)
        n = self.dim_a * self.dim_b
        if ops.shape[1:] != (n, n):
            raise ChannelError(f"Kraus operators of shape {ops.shape[1:]} on a {n}-dimensional space")
        tp, un = _tp_unital(ops)
        if tp > CHANNEL_TOL:
            raise ChannelError(f"Kraus operators not trace preserving (deviation {tp:.3e})")
        ops.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "unital", un <= CHANNEL_TOL)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    def __call__(self, rho):
        return apply(self, rho)

    def local_b(self, rho_b):
        """Induced channel on Bob's side, ``tr_a Lambda(1/dim_a (x) rho_b)``."""
        rho_b = rho_b.mat if isinstance(rho_b, DensityMatrix) else np.asarray(rho_b, dtype=complex)
        full = np.kron(np.eye(self.dim_a) / self.dim_a, rho_b)
        out = _apply_ops(self.kraus_ops, full)
        red = np.einsum("ijil->jl", out.reshape(self.dim_a, self.dim_b, self.dim_a, self.dim_b))
        return DensityMatrix(red, (self.dim_b,), validate=False)


def _apply_ops(ops: np.ndarray, mat: np.ndarray) -> np.ndarray:
    out = np.sum(ops @ mat @ ops.conj().transpose(0, 2, 1), axis=0)
    return 0.5 * (out + out.conj().T)


def apply(ch, rho):
    """``Lambda(rho) = sum_m K_m rho K_m^dag``.

    ``rho`` may be a :class:`DensityMatrix` (the result keeps its dims) or a
    bare array, in which case a bare array is returned.
    """
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = ch.kraus_ops.shape[1]
    if mat.shape != (n, n):
        raise ChannelError(f"channel acts on dimension {n}, state has shape {mat.shape}")
    out = _apply_ops(ch.kraus_ops, mat)
    if isinstance(rho, DensityMatrix):
        return DensityMatrix(out, rho.dims, validate=False)
    return out


def identity_channel(d: int) -> KrausChannel:
    spec = np.zeros((d, d))
    spec[0, 0] = 1.0
    return KrausChannel(d, np.eye(d)[None], PauliSpec(d, spec))


def pauli_channel(spec: PauliSpec) -> KrausChannel:
    """Single-system Pauli channel with Kraus operators ``sqrt(q_mn) V_mn``."""
    if spec.joint:
        raise ChannelError("pauli_channel takes a single-system table; use two_sided_pauli")
    d = spec.d
    ops = [np.sqrt(max(spec.q[m, n], 0.0)) * weyl_operator(m, n, d) for m in range(d) for n in range(d)]
    return KrausChannel(d, np.array(ops), spec)


def depolarizing_spec(d: int, p: float) -> PauliSpec:
    """``q_00 = 1 - p + p/d**2``, every other ``q_mn = p/d**2``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise parameter p must lie in [0, 1], got {p!r}")
    q = np.full((d, d), p / d**2)
    q[0, 0] = 1.0 - p + p / d**2
    return PauliSpec(d, q)


def depolarizing_channel(d: int, p: float) -> KrausChannel:
    return pauli_channel(depolarizing_spec(d, p))


def lift(ch: KrausChannel, side: str, other_dim: int) -> BipartiteChannel:
    """Extend a local channel to a bipartite one, identity on the other side."""
    side = side.upper()
    eye = np.eye(other_dim)
    if side == "A":
        ops = np.array([np.kron(k, eye) for k in ch.kraus_ops])
        dims = (ch.local_dim, other_dim)
    elif side == "B":
        ops = np.array([np.kron(eye, k) for k in ch.kraus_ops])
        dims = (other_dim, ch.local_dim)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    joint = None
    if ch.pauli is not None and other_dim == ch.local_dim:
        delta = np.zeros((other_dim, other_dim))
        delta[0, 0] = 1.0
        qa, qb = (ch.pauli.q, delta) if side == "A" else (delta, ch.pauli.q)
        joint = PauliSpec(ch.local_dim, np.einsum("ab,cd->abcd", qa, qb))
    return BipartiteChannel(*dims, ops, joint, name=f"lift-{side}")


def compose(first: BipartiteChannel, second: BipartiteChannel) -> BipartiteChannel:
    """Channel ``second o first``; Kraus operators are all products."""
    if first.dims != second.dims:
        raise ChannelError("cannot compose channels on different spaces")
    ops = np.einsum("aij,bjk->abik", second.kraus_ops, first.kraus_ops)
    ops = ops.reshape(-1, *ops.shape[2:])
    joint = None
    if first.pauli is not None and second.pauli is not None:
        # Weyl products differ only by phases, so the tables convolve over Z_d^4
        d = first.pauli.d
        qa, qb = first.pauli.q, second.pauli.q
        joint = np.zeros_like(qa)
        for idx in np.ndindex(qa.shape):
            if qa[idx] == 0.0:
                continue
            joint += qa[idx] * np.roll(qb, shift=idx, axis=(0, 1, 2, 3))
        joint = PauliSpec(d, joint)
    return BipartiteChannel(first.dim_a, first.dim_b, ops, joint, name="composed")


def two_sided_pauli(spec: PauliSpec, spec_b: PauliSpec | None = None) -> BipartiteChannel:
    """``Lambda(rho) = sum q[m,n,m~,n~] (V_mn (x) V_m~n~) rho (...)^dag``.

    Accepts either a joint table, or two single-system tables (``spec`` for
    Alice, ``spec_b`` for Bob, defaulting to ``spec``) whose product is used.
    """
    if not spec.joint:
        spec = PauliSpec.product(spec, spec_b if spec_b is not None else spec)
    elif spec_b is not None:
        raise ChannelError("spec_b is only meaningful with a single-system table")
    d = spec.d
    vs = [weyl_operator(m, n, d) for m in range(d) for n in range(d)]
    q = spec.q.reshape(d * d, d * d)
    ops = []
    for i, va in enumerate(vs):
        for j, vb in enumerate(vs):
            if q[i, j] > 0.0:
                ops.append(np.sqrt(q[i, j]) * np.kron(va, vb))
    return BipartiteChannel(d, d, np.array(ops), spec, name="two-sided-pauli")


def one_sided_pauli(spec: PauliSpec) -> BipartiteChannel:
    """Pauli channel on Alice's side only, identity on Bob's."""
    return lift(pauli_channel(spec), "A", spec.d)


def two_sided_depolarizing(d: int, p: float) -> BipartiteChannel:
    ch = two_sided_pauli(depolarizing_spec(d, p))
    return BipartiteChannel(d, d, ch.kraus_ops, ch.pauli, name="two-sided-dep")


def random_unital_channel(d: int, n_ops: int = 3, seed=None) -> KrausChannel:
    """Mixture of Haar-random unitaries with random weights (unital by construction)."""
    rng = as_generator(seed)
    w = rng.dirichlet(np.ones(n_ops))
    ops = np.array([np.sqrt(wk) * random_unitary(d, rng) for wk in w])
    return KrausChannel(d, ops)


@dataclass
class CovarianceReport:
    """Outcome of :func:`verify_covariance`."""

    trials: int
    max_difference: float
    differences: list[float]
    tol: float = CHANNEL_TOL

    @property
    def passed(self) -> bool:
        return self.max_difference < self.tol


def verify_covariance(ch: BipartiteChannel, trials: int = 100, seed=0) -> CovarianceReport:
    """Check ``Lambda(U rho U^dag) = U Lambda(rho) U^dag`` for ``U = U_a (x) U_b``.

    Draws Haar-random local unitaries and random mixed states. Holds for the
    two-sided depolarizing channel; a generic Pauli channel fails it.
    """
    rng = as_generator(seed)
    diffs = []
    for _ in range(trials):
        u = np.kron(random_unitary(ch.dim_a, rng), random_unitary(ch.dim_b, rng))
        rho = random_density_matrix(ch.dims, rng).mat
        lhs = _apply_ops(ch.kraus_ops, u @ rho @ u.conj().T)
        rhs = u @ _apply_ops(ch.kraus_ops, rho) @ u.conj().T
        diffs.append(float(np.max(np.abs(lhs - rhs))))
    return CovarianceReport(trials, max(diffs) if diffs else 0.0, diffs)
