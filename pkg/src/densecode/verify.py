"""Registry of numerical property checks run by ``densecode verify``.

Every check returns a :class:`PropertyResult` carrying the worst residual
observed over its random trials. Checks are grouped by the module whose
behaviour they exercise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analysis
from .capacity import (
    EncodingKind,
    EncodingScheme,
    alpha_eigenvalues,
    capacity_alpha,
    capacity_bell_one_sided_dep2,
    capacity_bell_two_sided_dep2,
    capacity_unital,
    holevo,
    preprocessing_capacity,
)
from .channels import (
    apply,
    depolarizing_channel,
    lift,
    compose,
    one_sided_pauli,
    depolarizing_spec,
    random_unital_channel,
    two_sided_depolarizing,
    verify_covariance,
)
from .linalg import (
    DensityMatrix,
    hermitian_eigenvalues,
    log2m,
    partial_trace,
    relative_entropy,
    tensor,
    von_neumann_entropy,
)
from .qops import (
    bell_density,
    bell_state,
    random_density_matrix,
    random_unitary,
    schmidt_density,
    su_generators,
    weyl_operator,
    weyl_operators,
)

__all__ = ["PropertyResult", "REGISTRY", "register", "run_all", "run_property"]


@dataclass(frozen=True)
class PropertyResult:
    name: str
    module: str
    passed: bool
    residual: float
    tol: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "module": self.module,
            "passed": self.passed,
            "residual": self.residual,
            "tol": self.tol,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class _Entry:
    name: str
    module: str
    tol: float
    func: Callable[..., tuple[float, str]]


REGISTRY: dict[str, _Entry] = {}


def register(module: str, name: str, tol: float):
    """Decorator adding a check ``f(seed, **kw) -> (residual, detail)``."""

    def deco(func):
        if name in REGISTRY:
            raise ValueError(f"duplicate property {name!r}")
        REGISTRY[name] = _Entry(name, module, tol, func)
        return func

    return deco


def run_property(name: str, seed: int = 0, **kw) -> PropertyResult:
    entry = REGISTRY[name]
    residual, detail = entry.func(seed=seed, **kw)
    residual = float(residual)
    return PropertyResult(entry.name, entry.module, residual < entry.tol, residual, entry.tol, detail)


def run_all(seed: int = 0) -> list[PropertyResult]:
    return [run_property(name, seed) for name in REGISTRY]


def _rng(seed, salt: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), salt]))


def _encode_a(u, rho: np.ndarray, db: int) -> np.ndarray:
    w = np.kron(u, np.eye(db))
    return w @ rho @ w.conj().T


# --- linalg ----------------------------------------------------------------


@register("linalg", "eigenvalue_oracle", 1e-6)
def _eigenvalue_oracle(seed=0, trials=1000, max_dim=16, method="lapack"):
    # Frobenius scaling keeps every |lambda - lambda_j| <= 2, so the
    # determinant below is a meaningful residual at dim 16.
    rng = _rng(seed, 1)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, max_dim + 1))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = a + a.conj().T
        h = h / np.linalg.norm(h)
        for lam in hermitian_eigenvalues(h, method=method):
            worst = max(worst, abs(np.linalg.det(lam * np.eye(n) - h)))
    return worst, f"{trials} matrices, dim <= {max_dim}, max |det(lambda I - M)|"


@register("linalg", "entropy_additivity", 1e-8)
def _entropy_additivity(seed=0, trials=100):
    rng = _rng(seed, 2)
    worst = 0.0
    for _ in range(trials):
        ra = random_density_matrix((int(rng.integers(2, 5)),), rng)
        rb = random_density_matrix((int(rng.integers(2, 5)),), rng)
        lhs = von_neumann_entropy(tensor(ra, rb))
        worst = max(worst, abs(lhs - von_neumann_entropy(ra) - von_neumann_entropy(rb)))
    return worst, f"{trials} random product states"


@register("linalg", "entropy_unitary_invariance", 1e-8)
def _unitary_invariance(seed=0, trials=100):
    rng = _rng(seed, 3)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 9))
        rho = random_density_matrix((n,), rng)
        u = random_unitary(n, rng)
        worst = max(worst, abs(von_neumann_entropy(u @ rho.mat @ u.conj().T) - von_neumann_entropy(rho)))
    return worst, f"{trials} random states and unitaries"


@register("linalg", "donald_decomposition", 1e-7)
def _donald(seed=0, trials=50):
    rng = _rng(seed, 4)
    worst = 0.0
    for _ in range(trials):
        k = int(rng.integers(2, 6))
        probs = rng.dirichlet(np.ones(k))
        sigmas = [random_density_matrix((2, 2), rng) for _ in range(k)]
        ref = random_density_matrix((2, 2), rng)
        avg = sum(p * s.mat for p, s in zip(probs, sigmas))
        lhs = sum(p * relative_entropy(s, ref) for p, s in zip(probs, sigmas))
        rhs = sum(p * relative_entropy(s, avg) for p, s in zip(probs, sigmas)) + relative_entropy(avg, ref)
        worst = max(worst, abs(lhs - rhs))
    return worst, f"{trials} random ensembles"


@register("linalg", "klein_nonnegativity", 1e-9)
def _klein(seed=0, trials=200):
    rng = _rng(seed, 5)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(2, 7))
        s = random_density_matrix((n,), rng, rank=int(rng.integers(1, n + 1)))
        r = random_density_matrix((n,), rng)
        worst = max(worst, -relative_entropy(s, r))
    return max(worst, 0.0), f"{trials} random pairs, largest negative part"


# --- qops ------------------------------------------------------------------


@register("qops", "weyl_group_law", 1e-10)
def _weyl_group_law(seed=0, max_d=5):
    worst = 0.0
    for d in range(2, max_d + 1):
        ops = {(m, n): weyl_operator(m, n, d) for m in range(d) for n in range(d)}
        for (m, n), v in ops.items():
            for (mt, nt), vt in ops.items():
                phase = np.exp(2j * np.pi * nt * m / d)
                rhs = phase * ops[((m + mt) % d, (n + nt) % d)]
                worst = max(worst, np.max(np.abs(v @ vt - rhs)))
    return worst, f"all index pairs, d = 2..{max_d}"


@register("qops", "rotated_bell_overlap", 1e-9)
def _rotated_bell_overlap(seed=0, trials=50, dims=(2, 3)):
    rng = _rng(seed, 6)
    worst = 0.0
    for d in dims:
        psi = bell_state(d)
        ops = weyl_operators(d)
        for _ in range(trials):
            u = random_unitary(d, rng)
            for i, v in enumerate(ops):
                for j, vt in enumerate(ops):
                    if i == j:
                        continue
                    a = np.kron(u.conj().T @ v.conj().T @ vt @ u, np.eye(d))
                    worst = max(worst, abs(np.vdot(psi, a @ psi)))
    return worst, f"{trials} unitaries per d in {dims}"


@register("qops", "encoded_projector_orthogonality", 1e-9)
def _projector_orthogonality(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 7)
    worst = 0.0
    for d in dims:
        rho00 = bell_density(d).mat
        for _ in range(trials):
            u = random_unitary(d, rng)
            pis = [_encode_a(v @ u, rho00, d) for v in weyl_operators(d)]
            for i, a in enumerate(pis):
                for j, b in enumerate(pis):
                    if i != j:
                        worst = max(worst, np.linalg.norm(a @ b))
    return worst, f"{trials} unitaries per d in {dims}"


@register("qops", "weyl_twirl_average", 1e-9)
def _weyl_twirl(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 8)
    worst = 0.0
    for d in dims:
        for _ in range(trials):
            rho = random_density_matrix((d, d), rng)
            avg = sum(_encode_a(v, rho.mat, d) for v in weyl_operators(d)) / d**2
            target = np.kron(np.eye(d) / d, partial_trace(rho, "B").mat)
            worst = max(worst, np.max(np.abs(avg - target)))
    return worst, f"{trials} random states per d in {dims}"


# --- channels ----------------------------------------------------------------


@register("channels", "rotated_generator_contraction", 1e-9)
def _rotated_generators(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 9)
    worst = 0.0
    for d in dims:
        lams = su_generators(d)
        for _ in range(trials):
            p = float(rng.uniform())
            ch = depolarizing_channel(d, p)
            u = random_unitary(d, rng)
            for lam in lams:
                x = u @ lam @ u.conj().T
                worst = max(worst, np.max(np.abs(apply(ch, x) - (1.0 - p) * x)))
    return worst, f"{trials} unitaries per d in {dims}, all generators"


@register("channels", "generator_contraction", 1e-9)
def _generator_contraction(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 10)
    worst = 0.0
    for d in dims:
        for _ in range(trials):
            p = float(rng.uniform())
            ch = depolarizing_channel(d, p)
            for lam in su_generators(d):
                worst = max(worst, np.max(np.abs(apply(ch, lam) - (1.0 - p) * lam)))
    return worst, f"{trials} noise values per d in {dims}"


def _random_product_unital(d, rng):
    a = random_unital_channel(d, int(rng.integers(1, 5)), rng)
    b = random_unital_channel(d, int(rng.integers(1, 5)), rng)
    return a, b, compose(lift(a, "A", d), lift(b, "B", d))


def _weyl_average(rho: np.ndarray, ch, d: int) -> np.ndarray:
    return sum(apply(ch, _encode_a(v, rho, d)) for v in weyl_operators(d)) / d**2


@register("channels", "weyl_average_output", 1e-9)
def _weyl_average_output(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 11)
    worst = 0.0
    for d in dims:
        for _ in range(trials):
            rho = random_density_matrix((d, d), rng)
            _, b, ch = _random_product_unital(d, rng)
            target = np.kron(np.eye(d), apply(b, partial_trace(rho, "B").mat / d))
            worst = max(worst, np.max(np.abs(_weyl_average(rho.mat, ch, d) - target)))
    return worst, f"{trials} random states and unital channels per d in {dims}"


@register("channels", "log_average_trace", 1e-7)
def _log_average_trace(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 12)
    worst = 0.0
    for d in dims:
        for _ in range(trials):
            rho = random_density_matrix((d, d), rng)
            _, _, ch = _random_product_unital(d, rng)
            avg = _weyl_average(rho.mat, ch, d)
            tau = apply(ch, _encode_a(random_unitary(d, rng), rho.mat, d))
            lhs = np.trace(tau @ log2m(avg)).real
            worst = max(worst, abs(lhs + von_neumann_entropy(avg)))
    return worst, f"{trials} random encodings per d in {dims}"


@register("channels", "holevo_relative_entropy_gap", 1e-7)
def _relative_entropy_gap(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 13)
    worst = 0.0
    for d in dims:
        for _ in range(trials):
            rho = random_density_matrix((d, d), rng)
            _, _, ch = _random_product_unital(d, rng)
            avg = _weyl_average(rho.mat, ch, d)
            tau = apply(ch, _encode_a(random_unitary(d, rng), rho.mat, d))
            rel = relative_entropy(tau, avg)
            worst = max(worst, abs(rel - (von_neumann_entropy(avg) - von_neumann_entropy(tau))))
    return worst, f"{trials} random encodings per d in {dims}"


@register("channels", "local_unitary_covariance", 1e-9)
def _covariance(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 14)
    worst = 0.0
    for d in dims:
        for _ in range(trials):
            ch = two_sided_depolarizing(d, float(rng.uniform()))
            worst = max(worst, verify_covariance(ch, trials=1, seed=rng).max_difference)
    return worst, f"{trials} random (p, U_a, U_b, rho) per d in {dims}"


@register("channels", "channel_linearity", 1e-10)
def _linearity(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 15)
    worst = 0.0
    for d in dims:
        for _ in range(trials):
            _, _, ch = _random_product_unital(d, rng)
            k = int(rng.integers(2, 5))
            probs = rng.dirichlet(np.ones(k))
            states = [random_density_matrix((d, d), rng).mat for _ in range(k)]
            lhs = apply(ch, sum(p * s for p, s in zip(probs, states)))
            rhs = sum(p * apply(ch, s) for p, s in zip(probs, states))
            worst = max(worst, np.max(np.abs(lhs - rhs)))
    return worst, f"{trials} random mixtures per d in {dims}"


# --- dense coding --------------------------------------------------------------


@register("dense_coding", "weyl_encoding_dominance", 1e-7)
def _dominance(seed=0, trials=200, noise=(0.1, 0.5, 0.9)):
    rng = _rng(seed, 16)
    rho = bell_density(2)
    worst = -math.inf
    for p in noise:
        ch = one_sided_pauli(depolarizing_spec(2, p))
        cap = capacity_bell_one_sided_dep2(p)
        for _ in range(trials):
            k = int(rng.integers(4, 9))
            us = [random_unitary(2, rng) for _ in range(k)]
            scheme = EncodingScheme(EncodingKind.UNITARY_CUSTOM, us, rng.dirichlet(np.ones(k)))
            worst = max(worst, holevo(scheme.ensemble(rho, ch)) - cap)
    return max(worst, 0.0), f"{trials} random encodings per p in {noise}; largest chi - C"


def _alpha_grid(n=21):
    return np.linspace(0.0, 0.5, n), np.linspace(0.0, 1.0, n)


@register("dense_coding", "cross_path_alpha", 1e-8)
def _cross_path(seed=0, n=21, samples=8):
    alphas, ps = _alpha_grid(n)
    worst = 0.0
    for a in alphas:
        rho = schmidt_density(float(a))
        for p in ps:
            res = capacity_unital(rho, two_sided_depolarizing(2, float(p)), samples=samples, seed=seed)
            worst = max(worst, abs(res.value - capacity_alpha(float(a), float(p))))
    return worst, f"{n}x{n} (alpha, p) grid"


@register("dense_coding", "gamma_spectrum", 1e-9)
def _gamma_spectrum(seed=0, n=21):
    alphas, ps = _alpha_grid(n)
    worst = 0.0
    for a in alphas:
        rho = schmidt_density(float(a)).mat
        for p in ps:
            out = apply(two_sided_depolarizing(2, float(p)), rho)
            numeric = np.sort(hermitian_eigenvalues(out).eigenvalues)
            gamma, _ = alpha_eigenvalues(float(a), float(p))
            worst = max(worst, np.max(np.abs(numeric - np.sort(gamma))))
    return worst, f"{n}x{n} (alpha, p) grid"


@register("dense_coding", "xi_spectrum", 1e-10)
def _xi_spectrum(seed=0, n=21):
    alphas, ps = _alpha_grid(n)
    worst = 0.0
    for a in alphas:
        rho_b = partial_trace(schmidt_density(float(a)), "B").mat
        for p in ps:
            out = apply(depolarizing_channel(2, float(p)), rho_b)
            numeric = np.sort(hermitian_eigenvalues(out).eigenvalues)
            _, xi = alpha_eigenvalues(float(a), float(p))
            worst = max(worst, np.max(np.abs(numeric - np.sort(xi))))
    return worst, f"{n}x{n} (alpha, p) grid"


@register("dense_coding", "local_unitary_invariance", 1e-8)
def _lu_invariance(seed=0, trials=20, dims=(2, 3)):
    rng = _rng(seed, 17)
    worst = 0.0
    for d in dims:
        for _ in range(trials):
            ch = two_sided_depolarizing(d, float(rng.uniform()))
            rho = random_density_matrix((d, d), rng)
            u = np.kron(random_unitary(d, rng), random_unitary(d, rng))
            moved = DensityMatrix(u @ rho.mat @ u.conj().T, (d, d))
            c0 = capacity_unital(rho, ch, samples=4, seed=rng).value
            c1 = capacity_unital(moved, ch, samples=4, seed=rng).value
            worst = max(worst, abs(c0 - c1))
    return worst, f"{trials} random states per d in {dims}"


@register("dense_coding", "mixed_state_bound", 1e-7)
def _mixed_bound(seed=0, trials=100, noise=(0.2, 0.5)):
    rng = _rng(seed, 18)
    worst = -math.inf
    for p in noise:
        ch = two_sided_depolarizing(2, p)
        bound = max(capacity_alpha(0.5, p), capacity_alpha(0.0, p))
        for _ in range(trials):
            rho = random_density_matrix((2, 2), rng, rank=int(rng.integers(1, 5)))
            worst = max(worst, capacity_unital(rho, ch, samples=4, seed=rng).value - bound)
    return max(worst, 0.0), f"{trials} random states per p in {noise}; largest excess"


@register("dense_coding", "preprocessing_never_hurts", 1e-9)
def _preprocessing(seed=0, trials=30):
    rng = _rng(seed, 19)
    worst = -math.inf
    for _ in range(trials):
        ch = two_sided_depolarizing(2, float(rng.uniform()))
        rho = random_density_matrix((2, 2), rng, rank=int(rng.integers(1, 5)))
        base = capacity_unital(rho, ch, samples=4, seed=rng).value
        worst = max(worst, base - preprocessing_capacity(rho, ch).value)
    return max(worst, 0.0), f"{trials} random states; largest shortfall"


# --- analysis ------------------------------------------------------------------


@register("analysis", "bisection_convergence", 1e-9)
def _bisection(seed=0):
    worst = 0.0
    notes = []
    for rep in (analysis.find_threshold_alpha(), analysis.find_classical_limit_crossing()):
        width = rep.bracket[1] - rep.bracket[0]
        if width >= 1e-10 or rep.iterations > 60:
            worst = math.inf
        worst = max(worst, rep.residual)
        notes.append(f"root {rep.root:.6f} in {rep.iterations} steps")
    return worst, "; ".join(notes)


@register("analysis", "sweep_series_range", 1e-12)
def _sweep_range(seed=0):
    worst = 0.0
    for sweep in (analysis.sweep_figure3(), analysis.sweep_figure4(), analysis.sweep_figure5()):
        for vals in sweep.series.values():
            v = np.asarray(vals)
            if not np.all(np.isfinite(v)):
                return math.inf, "non-finite value"
            worst = max(worst, float(np.max(-v)), float(np.max(v - 2.0)))
    return max(worst, 0.0), "largest excursion outside [0, 2]"


@register("analysis", "capacity_monotonicity", 1e-12)
def _monotone(seed=0, step=1e-3):
    grid = np.arange(0.0, 1.0 + step / 2, step)
    grid[-1] = min(grid[-1], 1.0)
    worst = 0.0
    for f in (capacity_bell_one_sided_dep2, capacity_bell_two_sided_dep2):
        vals = np.array([f(float(p)) for p in grid])
        worst = max(worst, float(np.max(np.diff(vals))))
    return max(worst, 0.0), f"largest increase on a grid of step {step}"
