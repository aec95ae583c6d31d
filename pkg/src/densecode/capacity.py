"""Holevo quantity and super dense coding capacities over unital noise.

The general route is :func:`capacity_unital`, which evaluates
``S(rho~) - S(Lambda(rho))`` where ``rho~`` is the channel output averaged
over the ``d**2`` equiprobable Weyl encodings. The formula is the capacity
only when the output entropy does not depend on Alice's unitary encoding;
:func:`check_entropy_condition` tests this on sampled unitaries.
The closed forms below are cross-checked against it in the test-suite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import BipartiteChannel, KrausChannel, apply, lift
from .errors import ChannelError, ConditionViolatedError, DenseCodingError
from .linalg import DensityMatrix, partial_trace, shannon_entropy, von_neumann_entropy
from .qops import as_generator, random_unitary, weyl_operator, weyl_operators

CONDITION_TOL = 1e-6
DEFAULT_SAMPLES = 64

__all__ = [
    "Ensemble",
    "EncodingKind",
    "EncodingScheme",
    "CapacityResult",
    "BruteForceReport",
    "PreprocessingResult",
    "holevo",
    "capacity_noiseless",
    "check_entropy_condition",
    "capacity_unital",
    "capacity_bell_one_sided_pauli",
    "capacity_werner_one_sided_pauli",
    "alpha_eigenvalues",
    "capacity_alpha",
    "capacity_bell_two_sided_dep2",
    "classical_dep2_capacity",
    "capacity_bell_one_sided_dep2",
    "weyl_scheme",
    "brute_force_best_encoding",
    "default_preprocessing_candidates",
    "preprocessing_capacity",
]


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0.0 else 0.0


def _as_bipartite(ch, rho: DensityMatrix) -> BipartiteChannel:
    if isinstance(ch, BipartiteChannel):
        return ch
    if isinstance(ch, KrausChannel):
        return lift(ch, "A", rho.dims[1])
    raise TypeError(f"expected a channel, got {type(ch).__name__}")


def _require_bipartite(rho: DensityMatrix) -> None:
    if len(rho.dims) != 2:
        raise DenseCodingError(f"need a bipartite state, got dims {rho.dims}")


@dataclass(frozen=True)
class Ensemble:
    """Weighted collection of density matrices of equal dimensions."""

    members: tuple[tuple[float, DensityMatrix], ...]

    def __post_init__(self):
        members = tuple((float(p), r) for p, r in self.members)
        if not members:
            raise DenseCodingError("empty ensemble")
        probs = np.array([p for p, _ in members])
        if probs.min() < -1e-12 or abs(probs.sum() - 1.0) > 1e-9:
            raise DenseCodingError(f"ensemble weights must be a distribution, got sum {probs.sum()!r}")
        shapes = {r.mat.shape for _, r in members}
        if len(shapes) != 1:
            raise DenseCodingError("ensemble members have different dimensions")
        object.__setattr__(self, "members", members)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.members])

    def average(self) -> DensityMatrix:
        mat = sum(p * r.mat for p, r in self.members)
        return DensityMatrix(mat, self.members[0][1].dims, validate=False)


def holevo(ens: Ensemble) -> float:
    """``chi = S(sum_i p_i rho_i) - sum_i p_i S(rho_i)`` in bits."""
    avg = von_neumann_entropy(ens.average())
    return avg - sum(p * von_neumann_entropy(r) for p, r in ens.members if p > 0.0)


def capacity_noiseless(rho: DensityMatrix) -> float:
    """``log d + S(rho_b) - S(rho)`` for unitary encoding over a perfect channel."""
    _require_bipartite(rho)
    da, db = rho.dims
    if da != db:
        raise DenseCodingError("noiseless capacity formula assumes equal subsystem dimensions")
    return math.log2(da) + von_neumann_entropy(partial_trace(rho, "B")) - von_neumann_entropy(rho)


class EncodingKind(enum.Enum):
    UNITARY_WEYL = "unitary-weyl"
    UNITARY_CUSTOM = "unitary-custom"
    PREPROCESSED = "preprocessed"


@dataclass
class EncodingScheme:
    """Alice's encoding: optional pre-processing map, then unitaries with weights."""

    kind: EncodingKind
    unitaries: list[np.ndarray]
    probabilities: np.ndarray
    pre_map: KrausChannel | None = None

    def __post_init__(self):
        self.probabilities = np.asarray(self.probabilities, dtype=float)
        if len(self.unitaries) != len(self.probabilities):
            raise DenseCodingError("one probability per unitary is required")
        if self.kind is EncodingKind.UNITARY_WEYL:
            n = len(self.unitaries)
            if not np.allclose(self.probabilities, 1.0 / n, atol=1e-12):
                raise DenseCodingError("Weyl encoding uses uniform probabilities")

    def encoded_states(self, rho: DensityMatrix) -> list[DensityMatrix]:
        da, db = rho.dims
        base = rho
        if self.pre_map is not None:
            base = apply(lift(self.pre_map, "A", db), rho)
        eye = np.eye(db)
        out = []
        for u in self.unitaries:
            w = np.kron(u, eye)
            out.append(DensityMatrix(w @ base.mat @ w.conj().T, rho.dims, validate=False))
        return out

    def ensemble(self, rho: DensityMatrix, ch=None) -> Ensemble:
        """Received ensemble ``{p_i, Lambda(rho_i)}``; ``ch=None`` means noiseless."""
        states = self.encoded_states(rho)
        if ch is not None:
            ch = _as_bipartite(ch, rho)
            states = [apply(ch, s) for s in states]
        return Ensemble(tuple(zip(self.probabilities, states)))


def weyl_scheme(d: int, pre_map: KrausChannel | None = None) -> EncodingScheme:
    """Equiprobable encoding by all ``d**2`` Weyl operators."""
    kind = EncodingKind.PREPROCESSED if pre_map is not None else EncodingKind.UNITARY_WEYL
    return EncodingScheme(kind, weyl_operators(d), np.full(d * d, 1.0 / d**2), pre_map)


def _encode_a(u: np.ndarray, rho: np.ndarray, db: int) -> np.ndarray:
    w = np.kron(u, np.eye(db))
    return w @ rho @ w.conj().T


def check_entropy_condition(
    rho: DensityMatrix, ch, samples: int = DEFAULT_SAMPLES, seed=0
) -> float:
    """Largest deviation ``|S(Lambda((U (x) 1) rho (U (x) 1)^dag)) - S(Lambda(rho))|``.

    ``U`` runs over the ``d**2`` Weyl operators and ``samples`` Haar-random
    unitaries. A residual below ``CONDITION_TOL`` is taken as numerical
    evidence that the output entropy is independent of the encoding.
    """
    _require_bipartite(rho)
    ch = _as_bipartite(ch, rho)
    if not ch.unital:
        raise ChannelError("entropy condition requires a unital channel")
    da, db = rho.dims
    rng = as_generator(seed)
    base = von_neumann_entropy(apply(ch, rho.mat))
    unitaries = weyl_operators(da) + [random_unitary(da, rng) for _ in range(samples)]
    residual = 0.0
    for u in unitaries:
        s = von_neumann_entropy(apply(ch, _encode_a(u, rho.mat, db)))
        residual = max(residual, abs(s - base))
    return residual


@dataclass(frozen=True)
class CapacityResult:
    value: float
    average_state_entropy: float
    channel_output_entropy: float
    condition_residual: float

    def to_dict(self) -> dict:
        return {
            "value_bits": self.value,
            "avg_state_entropy_bits": self.average_state_entropy,
            "channel_output_entropy_bits": self.channel_output_entropy,
            "condition_residual": self.condition_residual,
        }


def average_weyl_output(rho: DensityMatrix, ch) -> DensityMatrix:
    """``rho~``: channel output averaged over the equiprobable Weyl encodings."""
    ch = _as_bipartite(ch, rho)
    da, db = rho.dims
    acc = np.zeros_like(rho.mat)
    for v in weyl_operators(da):
        acc = acc + apply(ch, _encode_a(v, rho.mat, db))
    return DensityMatrix(acc / da**2, rho.dims, validate=False)


def capacity_unital(
    rho: DensityMatrix,
    ch,
    samples: int = DEFAULT_SAMPLES,
    seed=0,
    enforce: bool = True,
) -> CapacityResult:
    """Super dense coding capacity ``S(rho~) - S(Lambda(rho))`` for unital noise.

    One-sided channels are passed as a :class:`BipartiteChannel` with the
    identity on Bob's side (a bare :class:`KrausChannel` is lifted to Alice).

    Raises
    ------
    ChannelError
        The channel is not unital.
    ConditionViolatedError
        The sampled entropy condition fails (``enforce=True``); the formula
        value is then only an achievable lower bound.
    """
    _require_bipartite(rho)
    ch = _as_bipartite(ch, rho)
    if not ch.unital:
        raise ChannelError("capacity formula requires a unital channel")
    residual = check_entropy_condition(rho, ch, samples, seed)
    if enforce and residual >= CONDITION_TOL:
        raise ConditionViolatedError(residual)
    s_avg = von_neumann_entropy(average_weyl_output(rho, ch))
    s_out = von_neumann_entropy(apply(ch, rho.mat))
    return CapacityResult(s_avg - s_out, s_avg, s_out, residual)


def capacity_bell_one_sided_pauli(spec) -> float:
    """``log d**2 - H(q)`` for a Bell state and a one-sided Pauli channel."""
    return 2.0 * math.log2(spec.d) - shannon_entropy(spec.q.ravel())


def capacity_werner_one_sided_pauli(d: int, eta: float, spec) -> float:
    """``log d**2 - H({(1 - eta)/d**2 + eta q_mn})`` for a Werner resource."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    if spec.d != d:
        raise ValueError("Pauli table dimension does not match d")
    mixed = (1.0 - eta) / d**2 + eta * spec.q.ravel()
    return 2.0 * math.log2(d) - shannon_entropy(mixed)


def _check_unit(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


def alpha_eigenvalues(alpha: float, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Spectra for ``|phi_alpha>`` through the two-sided qubit depolarizing channel.

    Returns ``(gamma, xi)``: the four eigenvalues of the joint output and the
    two eigenvalues of Bob's reduced output.
    """
    _check_unit("alpha", alpha)
    _check_unit("p", p)
    root = math.sqrt(max(1.0 - 4.0 * p * alpha * (2.0 - p) * (1.0 - alpha), 0.0))
    base = 1.0 - p * (1.0 - p / 2.0)
    g3 = p / 2.0 * (1.0 - p / 2.0)
    gamma = np.array([0.5 * (base + (1.0 - p) * root), 0.5 * (base - (1.0 - p) * root), g3, g3])
    xi1 = alpha - p * alpha + p / 2.0
    xi = np.array([xi1, 1.0 - xi1])
    return np.clip(gamma, 0.0, None), np.clip(xi, 0.0, None)


def capacity_alpha(alpha: float, p: float) -> float:
    """Capacity of ``sqrt(1-a)|00> + sqrt(a)|11>`` over two-sided qubit depolarizing noise.

    ``alpha`` is accepted on ``[0, 1]``; ``alpha`` and ``1 - alpha`` describe
    locally equivalent states.
    """
    gamma, xi = alpha_eigenvalues(alpha, p)
    return 1.0 - sum(_xlog2x(x) for x in xi) + sum(_xlog2x(g) for g in gamma)


def capacity_bell_two_sided_dep2(p: float) -> float:
    _check_unit("p", p)
    a = (1.0 + 3.0 * (1.0 - p) ** 2) / 4.0
    b = (1.0 - (1.0 - p) ** 2) / 4.0
    return 2.0 + _xlog2x(a) + 3.0 * _xlog2x(b)


def classical_dep2_capacity(p: float) -> float:
    """Classical capacity of the qubit depolarizing channel; equals the product-state capacity."""
    _check_unit("p", p)
    return 1.0 + _xlog2x(p / 2.0) + _xlog2x((2.0 - p) / 2.0)


def capacity_bell_one_sided_dep2(p: float) -> float:
    _check_unit("p", p)
    return 2.0 + _xlog2x((4.0 - 3.0 * p) / 4.0) + 3.0 * _xlog2x(p / 4.0)


# --- brute-force adversary -------------------------------------------------


def _fast_entropy(mat: np.ndarray) -> float:
    # inner-loop entropy without the validation layer of von_neumann_entropy
    ev = np.linalg.eigvalsh(mat)
    ev = ev[ev > 0.0]
    return float(-np.sum(ev * np.log2(ev)))


class _ChiObjective:
    """``chi(p) = S(sum p_i sigma_i) - sum p_i s_i`` for fixed output states."""

    def __init__(self, sigmas: np.ndarray):
        self.sigmas = sigmas
        self.s = np.array([_fast_entropy(x) for x in sigmas])

    def value(self, w: np.ndarray) -> float:
        avg = np.tensordot(w, self.sigmas, axes=1)
        return _fast_entropy(avg) - float(w @ self.s)

    def values(self, ws: np.ndarray) -> np.ndarray:
        avgs = np.tensordot(ws, self.sigmas, axes=1)
        ev = np.clip(np.linalg.eigvalsh(avgs), 0.0, None)
        ent = -np.sum(np.where(ev > 0.0, ev * np.log2(np.where(ev > 0.0, ev, 1.0)), 0.0), axis=1)
        return ent - ws @ self.s

    def gradient(self, w: np.ndarray) -> np.ndarray:
        avg = np.einsum("i,ijk->jk", w, self.sigmas)
        ev, vec = np.linalg.eigh(0.5 * (avg + avg.conj().T))
        log_avg = (vec * np.log2(np.clip(ev, 1e-300, None))) @ vec.conj().T
        cross = np.einsum("ijk,kj->i", self.sigmas, log_avg).real
        return -cross - self.s


def _line_max(obj: "_ChiObjective", w: np.ndarray, step: np.ndarray, t_max: float, rounds: int = 5, points: int = 17):
    """Maximise the concave ``t -> chi(w + t step)`` on ``[0, t_max]`` by nested grids."""
    lo, hi = 0.0, t_max
    best_t, best_v = 0.0, obj.value(w)
    for _ in range(rounds):
        ts = np.linspace(lo, hi, points)
        vals = obj.values(w[None, :] + ts[:, None] * step[None, :])
        k = int(np.argmax(vals))
        if vals[k] > best_v:
            best_t, best_v = float(ts[k]), float(vals[k])
        h = (hi - lo) / (points - 1)
        lo, hi = max(0.0, ts[k] - h), min(t_max, ts[k] + h)
    return best_t, best_v


def _optimize_weights(obj: _ChiObjective, w: np.ndarray, sweeps: int = 40, gap_tol: float = 1e-9):
    """Pairwise coordinate ascent on the probability simplex.

    Each step moves mass from the support coordinate with the smallest
    partial derivative to the one with the largest, with an exact line search.
    """
    w = w.copy()
    best = obj.value(w)
    for _ in range(sweeps):
        g = obj.gradient(w)
        i = int(np.argmax(g))
        support = np.flatnonzero(w > 0.0)
        j = int(support[np.argmin(g[support])])
        if i == j or g[i] - g[j] < gap_tol:
            break
        step = np.zeros_like(w)
        step[i], step[j] = 1.0, -1.0
        t, val = _line_max(obj, w, step, w[j])
        if val <= best:
            break
        w = w + t * step
        w[j] = max(w[j], 0.0)
        w /= w.sum()
        best = val
    return w, best


@dataclass
class BruteForceReport:
    best_chi: float
    best_scheme: EncodingScheme
    best_restart: int
    weyl_chi: float
    restarts: int
    chis: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "best_chi_bits": self.best_chi,
            "weyl_chi_bits": self.weyl_chi,
            "best_restart": self.best_restart,
            "restarts": self.restarts,
            "best_probabilities": [float(x) for x in self.best_scheme.probabilities],
        }


def _small_unitary(d: int, scale: float, rng: np.random.Generator) -> np.ndarray:
    h = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = 0.5 * (h + h.conj().T)
    ev, vec = np.linalg.eigh(h)
    return (vec * np.exp(1j * scale * ev)) @ vec.conj().T


def _one_restart(rho, ch, ensemble_size, refine_steps, seed_seq):
    rng = np.random.default_rng(seed_seq)
    da, db = rho.dims
    us = [random_unitary(da, rng) for _ in range(ensemble_size)]
    outs = np.array([apply(ch, _encode_a(u, rho.mat, db)) for u in us])
    obj = _ChiObjective(outs)
    w, chi = _optimize_weights(obj, np.full(ensemble_size, 1.0 / ensemble_size))
    scale = 0.3
    for _ in range(refine_steps):
        k = int(rng.integers(ensemble_size))
        u_new = _small_unitary(da, scale, rng) @ us[k]
        trial = outs.copy()
        trial[k] = apply(ch, _encode_a(u_new, rho.mat, db))
        trial_obj = _ChiObjective(trial)
        val = trial_obj.value(w)
        if val > chi:
            us[k], outs, obj, chi = u_new, trial, trial_obj, val
        else:
            scale *= 0.7
    w, chi = _optimize_weights(obj, w)
    return chi, us, w


def brute_force_best_encoding(
    rho: DensityMatrix,
    ch,
    ensemble_size: int = 4,
    restarts: int = 100,
    seed=0,
    refine_steps: int = 6,
) -> BruteForceReport:
    """Search for unitary encodings with large Holevo quantity.

    Every restart draws ``ensemble_size`` Haar-random unitaries, optimises
    their weights on the simplex, hill-climbs the unitaries with small random
    perturbations and re-optimises the weights. Restart ``r`` is seeded by
    ``SeedSequence([seed, r])`` so the result does not depend on execution
    order; ties are broken by the lower restart index.
    """
    _require_bipartite(rho)
    ch = _as_bipartite(ch, rho)
    da = rho.dims[0]
    if da != 2:
        raise DenseCodingError("brute-force search is limited to qubit senders (d = 2)")
    if ensemble_size < da * da:
        raise DenseCodingError(f"ensemble_size must be at least d**2 = {da * da}")
    best = None
    chis = []
    for r in range(restarts):
        chi, us, w = _one_restart(rho, ch, ensemble_size, refine_steps, np.random.SeedSequence([int(seed), r]))
        chis.append(chi)
        if best is None or chi > best[0]:
            best = (chi, r, us, w)
    weyl = holevo(weyl_scheme(da).ensemble(rho, ch))
    chi, r, us, w = best
    scheme = EncodingScheme(EncodingKind.UNITARY_CUSTOM, us, w)
    return BruteForceReport(chi, scheme, r, weyl, restarts, chis)


# --- pre-processing --------------------------------------------------------


def default_preprocessing_candidates(d: int) -> list[tuple[str, KrausChannel]]:
    """Alice-side maps searched by :func:`preprocessing_capacity`.

    * ``identity``
    * ``measure``: projective measurement in the computational basis
    * ``measure-V<m><n>``: the measurement followed by ``V_mn``
    * ``measure-reset-<t>``: the measurement followed by the outcome-dependent
      shift ``V_{k-t,0}`` that maps every outcome ``k`` to ``|t>``
    """
    proj = [np.outer(np.eye(d)[k], np.eye(d)[k]).astype(complex) for k in range(d)]
    out = [("identity", KrausChannel(d, np.eye(d, dtype=complex)[None])), ("measure", KrausChannel(d, np.array(proj)))]
    for m in range(d):
        for n in range(d):
            if (m, n) != (0, 0):
                v = weyl_operator(m, n, d)
                out.append((f"measure-V{m}{n}", KrausChannel(d, np.array([v @ pk for pk in proj]))))
    for t in range(d):
        ops = [weyl_operator((k - t) % d, 0, d) @ proj[k] for k in range(d)]
        out.append((f"measure-reset-{t}", KrausChannel(d, np.array(ops))))
    return out


def _is_identity_map(ch: KrausChannel) -> bool:
    d = ch.local_dim
    fidelity = sum(abs(np.trace(k)) ** 2 for k in ch.kraus_ops)
    return abs(fidelity - d * d) < 1e-9


@dataclass(frozen=True)
class PreprocessingResult:
    value: float
    chosen: int
    label: str
    output_entropies: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "value_bits": self.value,
            "chosen": self.chosen,
            "label": self.label,
            "output_entropies_bits": list(self.output_entropies),
        }


def preprocessing_capacity(
    rho: DensityMatrix,
    ch: BipartiteChannel,
    candidates: Sequence | None = None,
) -> PreprocessingResult:
    """Dense coding capacity with a pre-processing map chosen from ``candidates``.

    Evaluates ``log d + S(Lambda_b(rho_b)) - min_G S(Lambda((G (x) 1)(rho)))``
    over the candidate maps ``G``. For a two-sided Pauli channel this value
    is reached by applying the minimising map and then the equiprobable Weyl
    encoding. ``candidates`` is a list of maps or ``(label, map)`` pairs and
    must contain the identity.
    """
    _require_bipartite(rho)
    if not isinstance(ch, BipartiteChannel) or ch.pauli is None:
        raise ChannelError("pre-processing bound applies to two-sided Pauli channels only")
    da, db = rho.dims
    if candidates is None:
        candidates = default_preprocessing_candidates(da)
    labelled = [c if isinstance(c, tuple) else (f"candidate-{i}", c) for i, c in enumerate(candidates)]
    if not any(_is_identity_map(g) for _, g in labelled):
        raise DenseCodingError("candidate set must include the identity map")
    s_b = von_neumann_entropy(partial_trace(apply(ch, rho), "B"))
    entropies = []
    for _, g in labelled:
        if g.local_dim != da:
            raise DenseCodingError("candidate map dimension does not match Alice's system")
        pre = apply(lift(g, "A", db), rho)
        entropies.append(von_neumann_entropy(apply(ch, pre.mat)))
    # ties within round-off go to the earliest candidate (identity first by default)
    chosen = int(np.flatnonzero(np.asarray(entropies) <= min(entropies) + 1e-12)[0])
    value = math.log2(da) + s_b - entropies[chosen]
    return PreprocessingResult(value, chosen, labelled[chosen][0], tuple(entropies))
