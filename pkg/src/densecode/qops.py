"""Operator and state families: Weyl-Heisenberg unitaries, SU(d) generators,
Bell, Werner and Schmidt states, Haar-random unitaries."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .linalg import DensityMatrix

__all__ = [
    "WeylIndex",
    "weyl_operator",
    "weyl_operators",
    "weyl_index",
    "su_generators",
    "bloch_decompose",
    "bloch_synthesize",
    "bell_state",
    "bell_density",
    "werner_state",
    "schmidt_state",
    "schmidt_density",
    "random_unitary",
    "random_density_matrix",
    "as_generator",
]


class WeylIndex(NamedTuple):
    """Index ``(m, n)`` of the Weyl operator ``V_mn`` on a ``d``-level system."""

    m: int
    n: int
    d: int

    def validate(self) -> "WeylIndex":
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        if not (0 <= self.m < self.d and 0 <= self.n < self.d):
            raise ValueError(f"Weyl index ({self.m}, {self.n}) out of range for d={self.d}")
        return self

    @property
    def flat(self) -> int:
        """Flat position ``m*d + n`` in the enumeration of all ``d**2`` operators."""
        return self.m * self.d + self.n


def weyl_index(i: int, d: int) -> WeylIndex:
    """Inverse of :attr:`WeylIndex.flat`."""
    return WeylIndex(*divmod(int(i), d), d).validate()


def weyl_operator(m: int, n: int, d: int) -> np.ndarray:
    """``V_mn = sum_k exp(2 pi i k n / d) |k><k+m mod d|``.

    Acting on kets, ``V_mn |j> = exp(2 pi i n (j - m) / d) |j - m>``; for
    ``n = 0`` it is a cyclic shift.
    """
    WeylIndex(m, n, d).validate()
    k = np.arange(d)
    v = np.zeros((d, d), dtype=complex)
    v[k, (k + m) % d] = np.exp(2j * np.pi * k * n / d)
    return v


def weyl_operators(d: int) -> list[np.ndarray]:
    """All ``d**2`` Weyl operators in flat order ``i = m*d + n``."""
    return [weyl_operator(m, n, d) for m in range(d) for n in range(d)]


def su_generators(d: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices normalised to ``tr(l_i l_j) = 2 delta_ij``.

    Ordered as the symmetric family, the antisymmetric family, then the
    ``d - 1`` diagonal matrices. For ``d = 2`` this gives X, Y, Z.
    """
    if d < 2:
        raise ValueError(f"SU(d) generators need d >= 2, got {d}")
    sym, anti, diag = [], [], []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            sym.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            anti.append(a)
    for l in range(1, d):
        entries = np.zeros(d)
        entries[:l] = 1.0
        entries[l] = -l
        diag.append(np.diag(entries * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    return sym + anti + diag


def bloch_decompose(rho: DensityMatrix):
    """Hilbert-Schmidt coefficients of a bipartite ``d x d`` state.

    Returns ``(rho_b, r, t)`` with

        rho = 1 (x) rho_b / d + (sum_i r_i l_i (x) 1 + sum_ik t_ik l_i (x) l_k) / d**2
    """
    da, db = rho.dims
    if da != db:
        raise ValueError("decomposition assumes equal subsystem dimensions")
    d = da
    lam = su_generators(d)
    eye = np.eye(d)
    mat = rho.mat
    rho_b = np.einsum("ijil->jl", mat.reshape(d, d, d, d))
    # tr(l_i l_k) = 2 delta_ik fixes the d**2 / 2 and d**2 / 4 scalings
    r = np.array([np.trace(mat @ np.kron(l, eye)).real * d / 2.0 for l in lam])
    t = np.array(
        [[np.trace(mat @ np.kron(li, lk)).real * d * d / 4.0 for lk in lam] for li in lam]
    )
    return rho_b, r, t


def bloch_synthesize(rho_b, r, t) -> np.ndarray:
    """Inverse of :func:`bloch_decompose`; returns the bare matrix."""
    rho_b = np.asarray(rho_b, dtype=complex)
    d = rho_b.shape[0]
    lam = su_generators(d)
    eye = np.eye(d)
    out = np.kron(eye, rho_b) / d
    for i, li in enumerate(lam):
        out = out + r[i] * np.kron(li, eye) / d**2
        for k, lk in enumerate(lam):
            out = out + t[i][k] * np.kron(li, lk) / d**2
    return out


def bell_state(d: int, m: int = 0, n: int = 0) -> np.ndarray:
    """Amplitudes of ``|psi_mn> = (V_mn (x) 1)|psi_00>``, with ``|psi_00> = sum_j |jj> / sqrt(d)``."""
    psi00 = np.eye(d, dtype=complex).ravel() / np.sqrt(d)
    return np.kron(weyl_operator(m, n, d), np.eye(d)) @ psi00


def bell_density(d: int, m: int = 0, n: int = 0) -> DensityMatrix:
    return DensityMatrix.from_pure(bell_state(d, m, n), (d, d))


def werner_state(d: int, eta: float) -> DensityMatrix:
    """``(1 - eta)/d**2 * 1 + eta * |psi_00><psi_00|`` for ``0 <= eta <= 1``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    psi = bell_state(d)
    mat = (1.0 - eta) / d**2 * np.eye(d * d) + eta * np.outer(psi, psi.conj())
    return DensityMatrix(mat, (d, d))


def schmidt_state(alpha: float) -> np.ndarray:
    """Two-qubit state ``sqrt(1 - alpha)|00> + sqrt(alpha)|11>``.

    The natural range is ``[0, 1/2]``. Values in ``(1/2, 1]`` are accepted;
    they describe the same state up to the local swap ``|0> <-> |1>`` on both
    sides, i.e. ``alpha`` and ``1 - alpha`` give equal capacities.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    psi = np.zeros(4, dtype=complex)
    psi[0] = np.sqrt(1.0 - alpha)
    psi[3] = np.sqrt(alpha)
    return psi


def schmidt_density(alpha: float) -> DensityMatrix:
    return DensityMatrix.from_pure(schmidt_state(alpha), (2, 2))


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``; integers
    give bit-identical output on repeated calls.
    """
    rng = as_generator(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    return q


def random_density_matrix(dims, seed=None, rank: int | None = None) -> DensityMatrix:
    """Random mixed state ``G G^dag / tr(G G^dag)`` from a Ginibre matrix ``G``."""
    rng = as_generator(seed)
    dims = tuple(dims)
    n = int(np.prod(dims))
    k = n if rank is None else rank
    g = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    mat = g @ g.conj().T
    mat = mat / np.trace(mat).real
    return DensityMatrix(0.5 * (mat + mat.conj().T), dims)
