"""Dense complex linear algebra and entropy functionals.

Matrices are plain ``numpy.ndarray`` objects of complex dtype. States carry
their subsystem dimensions in :class:`DensityMatrix`. All logarithms are
base 2, so every entropy is in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidStateError, NotHermitianError

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
MAX_DIM = 64

__all__ = [
    "DensityMatrix",
    "Spectrum",
    "tensor",
    "partial_trace",
    "hermitian_eigenvalues",
    "hermitian_eigh",
    "jacobi_eigh",
    "von_neumann_entropy",
    "shannon_entropy",
    "relative_entropy",
    "log2m",
]


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues sorted in descending order."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.sort(np.asarray(self.eigenvalues, dtype=float))[::-1].copy()
        object.__setattr__(self, "eigenvalues", ev)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __len__(self):
        return len(self.eigenvalues)

    def clipped(self) -> np.ndarray:
        """Eigenvalues with round-off negatives in ``[-PSD_TOL, 0)`` set to zero."""
        ev = self.eigenvalues
        if ev.size and ev[-1] < -PSD_TOL:
            raise InvalidStateError(f"eigenvalue {ev[-1]:.3e} below PSD tolerance")
        return np.where(ev < 0.0, 0.0, ev)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix on a product space.

    Parameters
    ----------
    mat : array_like
        Square complex matrix.
    dims : sequence of int, optional
        Subsystem dimensions; their product must equal the matrix size.
        Defaults to a single system.
    validate : bool
        Check the state invariants (Hermiticity, trace, PSD).
    """

    mat: np.ndarray
    dims: tuple[int, ...] = field(default=())
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidStateError(f"expected a square matrix, got shape {mat.shape}")
        dims = tuple(int(x) for x in self.dims) if self.dims else (mat.shape[0],)
        object.__setattr__(self, "dims", dims)
        if math.prod(dims) != mat.shape[0]:
            raise InvalidStateError(f"dims {dims} do not match matrix size {mat.shape[0]}")
        if mat.shape[0] > MAX_DIM:
            raise InvalidStateError(f"dimension {mat.shape[0]} exceeds {MAX_DIM}")
        if self.validate:
            herm = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
            if herm > HERMITIAN_TOL:
                raise NotHermitianError(f"not Hermitian (deviation {herm:.3e})")
            tr = np.trace(mat).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise InvalidStateError(f"trace {tr!r} differs from 1")
            low = np.linalg.eigvalsh(mat)[0]
            if low < -PSD_TOL:
                raise InvalidStateError(f"negative eigenvalue {low:.3e}")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_pure(cls, psi, dims: Sequence[int] = ()) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        norm = np.vdot(psi, psi).real
        if abs(norm - 1.0) > HERMITIAN_TOL:
            raise InvalidStateError(f"state vector has squared norm {norm!r}")
        return cls(np.outer(psi, psi.conj()), dims)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> "DensityMatrix":
        n = math.prod(dims)
        return cls(np.eye(n) / n, dims)


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, DensityMatrix):
        return m.mat
    return np.asarray(m, dtype=complex)


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``.

    If both arguments are :class:`DensityMatrix` the result is one too, with
    concatenated subsystem dimensions.
    """
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.mat, b.mat), a.dims + b.dims, validate=False)
    return np.kron(_as_matrix(a), _as_matrix(b))


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced state of a bipartite density matrix.

    ``keep`` names the surviving subsystem: ``"A"``/``0`` or ``"B"``/``1``.
    """
    if len(rho.dims) != 2:
        raise InvalidStateError(f"partial_trace needs a bipartite state, got dims {rho.dims}")
    side = {"A": 0, "a": 0, 0: 0, "B": 1, "b": 1, 1: 1}.get(keep)
    if side is None:
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    da, db = rho.dims
    t = rho.mat.reshape(da, db, da, db)
    if side == 0:
        red = np.einsum("ijkj->ik", t)
    else:
        red = np.einsum("ijil->jl", t)
    return DensityMatrix(red, (rho.dims[side],), validate=False)


def _check_hermitian(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > HERMITIAN_TOL:
        raise NotHermitianError(f"matrix is not Hermitian (deviation {dev:.3e})")


def jacobi_eigh(m, tol: float = 1e-14, max_sweeps: int = 60):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each pivot ``(p, q)`` is annihilated by a unitary that first removes the
    phase of ``a[p, q]`` and then applies a real Givens rotation.

    Returns
    -------
    w : ndarray
        Eigenvalues, ascending.
    v : ndarray
        Unitary whose columns are the matching eigenvectors.
    """
    a = np.array(_as_matrix(m), dtype=complex)
    _check_hermitian(a)
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        # measured directly: |A|^2 - |diag A|^2 cancels catastrophically near convergence
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300 * scale:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    # theta**2 would overflow; t ~ 1/(2 theta) to full precision
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # phase removal diag(1, conj(phase)) times a real Givens rotation
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
    w = np.diag(a).real.copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def hermitian_eigh(m, method: str = "lapack"):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian matrix."""
    a = _as_matrix(m)
    _check_hermitian(a)
    if method == "jacobi":
        return jacobi_eigh(a)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    return np.linalg.eigh(0.5 * (a + a.conj().T))


def hermitian_eigenvalues(m, method: str = "lapack") -> Spectrum:
    """Spectrum of a Hermitian matrix, sorted descending.

    ``method="lapack"`` delegates to ``numpy.linalg.eigvalsh``;
    ``method="jacobi"`` uses :func:`jacobi_eigh`.
    """
    a = _as_matrix(m)
    _check_hermitian(a)
    if method == "jacobi":
        w = jacobi_eigh(a)[0]
    elif method == "lapack":
        w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return Spectrum(w[::-1].copy())


def _entropy_of(probs: np.ndarray) -> float:
    nz = probs[probs > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def von_neumann_entropy(rho) -> float:
    """``S(rho) = -tr(rho log2 rho)`` in bits, with ``0 log 0 = 0``."""
    spec = hermitian_eigenvalues(_as_matrix(rho))
    ev = spec.clipped()
    s = _entropy_of(ev)
    return max(s, 0.0)


def shannon_entropy(p) -> float:
    """Shannon entropy of a probability vector in bits."""
    p = np.asarray(p, dtype=float).ravel()
    if p.size and p.min() < -PSD_TOL:
        raise ValueError(f"negative probability {p.min()!r}")
    if abs(p.sum() - 1.0) > 1e-6:
        raise ValueError(f"probabilities sum to {p.sum()!r}")
    return max(_entropy_of(np.clip(p, 0.0, None)), 0.0)


def log2m(rho) -> np.ndarray:
    """Base-2 matrix logarithm of a positive-definite Hermitian matrix."""
    w, v = hermitian_eigh(_as_matrix(rho))
    if w[0] <= 0.0:
        raise InvalidStateError("matrix logarithm of a singular matrix")
    return (v * np.log2(w)) @ v.conj().T


def relative_entropy(sigma, rho, support_tol: float = PSD_TOL) -> float:
    """``S(sigma || rho) = tr(sigma log sigma) - tr(sigma log rho)`` in bits.

    Evaluated in the eigenbasis of ``rho``. Returns ``math.inf`` when the
    support of ``sigma`` is not contained in the support of ``rho``.
    """
    s = _as_matrix(sigma)
    r = _as_matrix(rho)
    w, v = hermitian_eigh(r)
    # diagonal of sigma in rho's eigenbasis
    sdiag = np.einsum("ji,jk,ki->i", v.conj(), s, v).real
    null = w <= support_tol
    if np.any(sdiag[null] > support_tol):
        return math.inf
    keep = ~null
    cross = float(np.sum(sdiag[keep] * np.log2(w[keep])))
    return -von_neumann_entropy(s) - cross
