"""Truncated fixed-particle-number Fock sectors and exact checks of the quadratic bounds.

Mode 0 is the condensate; excited modes are orthonormal, so the pair
operators ``b_j = a_0^* a_j`` act on occupation vectors directly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._util import max_workers

MAX_SECTOR = 5000


def _compositions(n: int, m: int):
    # occupation vectors of length m summing to n, descending lexicographic
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class FockBasis:
    """Occupation basis of the ``n``-particle sector over ``m`` modes."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 0:
            raise ValueError("need m >= 1 and n >= 0")
        if self.size > MAX_SECTOR:
            raise ValueError(f"sector size {self.size} exceeds the dense cap {MAX_SECTOR}")

    @property
    def size(self) -> int:
        return math.comb(self.n + self.m - 1, self.m - 1)

    @cached_property
    def states(self) -> list[tuple[int, ...]]:
        return list(_compositions(self.n, self.m))

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.states)}

    def number(self, j: int) -> np.ndarray:
        """Diagonal matrix of ``a_j^* a_j``."""
        return np.diag([float(s[j]) for s in self.states])

    def n0(self) -> np.ndarray:
        return self.number(0)

    def n_plus(self) -> np.ndarray:
        return np.diag([float(self.n - s[0]) for s in self.states])


@dataclass(frozen=True)
class OperatorMatrix:
    matrix: np.ndarray
    basis: FockBasis
    hermitian: bool = False

    def __post_init__(self):
        if self.matrix.shape != (self.basis.size, self.basis.size):
            raise ValueError("matrix shape does not match the basis")
        if self.hermitian and not np.allclose(self.matrix, self.matrix.conj().T, atol=1e-12, rtol=0):
            raise ValueError("matrix flagged hermitian is not")


def b_operator(basis: FockBasis, j: int) -> OperatorMatrix:
    """Matrix of ``a_0^* a_j`` on the sector: ``|.., n_0, .., n_j, ..> -> sqrt(n_j (n_0+1)) |.., n_0+1, .., n_j-1, ..>``."""
    if not 1 <= j < basis.m:
        raise ValueError(f"mode {j} out of range 1..{basis.m - 1}")
    out = np.zeros((basis.size, basis.size), dtype=complex)
    for col, s in enumerate(basis.states):
        if s[j] == 0:
            continue
        t = list(s)
        t[j] -= 1
        t[0] += 1
        out[basis.index[tuple(t)], col] = math.sqrt(s[j] * (s[0] + 1))
    return OperatorMatrix(out, basis)


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def quadratic_hamiltonian(basis: FockBasis, A: float, B: float, kappa: complex,
                          plus: int = 1, minus: int = 2) -> OperatorMatrix:
    """``A(b+^* b+ + b-^* b-) + B(b+^* b-^* + b+ b-) + kappa(b+^* + b-) + conj(kappa)(b+ + b-^*)``."""
    if basis.m < 3:
        raise ValueError("need at least three modes (condensate, +, -)")
    bp = b_operator(basis, plus).matrix
    bm = b_operator(basis, minus).matrix
    bpd, bmd = bp.conj().T, bm.conj().T
    k = complex(kappa)
    H = A * (bpd @ bp + bmd @ bm) + B * (bpd @ bmd + bp @ bm) + k * (bpd + bm) + k.conjugate() * (bp + bmd)
    H = 0.5 * (H + H.conj().T)
    return OperatorMatrix(H, basis, hermitian=True)


def verify_bogolubov_operator_inequality(basis: FockBasis, A: float, B: float, kappa: complex,
                                         plus: int = 1, minus: int = 2) -> float:
    """Smallest eigenvalue of ``H - RHS`` where RHS is the Bogolubov lower bound operator.

    ``RHS = -(A - sqrt(A^2 - B^2))([b+, b+^*] + [b-, b-^*])/2 - 2|kappa|^2/(A+B)``.
    ``B = -A`` is admitted when ``kappa = 0``.
    """
    k = complex(kappa)
    if not (-A < B <= A or (B == -A and k == 0 and A > 0)):
        raise ValueError(f"need -A < B <= A, got A={A}, B={B}")
    H = quadratic_hamiltonian(basis, A, B, k, plus, minus).matrix
    bp = b_operator(basis, plus).matrix
    bm = b_operator(basis, minus).matrix
    comm = commutator(bp, bp.conj().T) + commutator(bm, bm.conj().T)
    root = math.sqrt(max(A * A - B * B, 0.0))
    gap = B * B / (A + root)
    linear = 0.0 if k == 0 else 2.0 * abs(k) ** 2 / (A + B)
    D = H + 0.5 * gap * comm + linear * np.eye(basis.size)
    return float(np.linalg.eigvalsh(0.5 * (D + D.conj().T))[0])


# ------------------------------------------------------ matrix localization


def band(A: np.ndarray, k: int) -> np.ndarray:
    """The ``k``-th supra- and infra-diagonal of ``A`` (the diagonal for ``k = 0``)."""
    A = np.asarray(A)
    if k == 0:
        return np.diag(np.diag(A))
    return np.diag(np.diag(A, k), k) + np.diag(np.diag(A, -k), -k)


def diag_band_expectations(A: np.ndarray, psi: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """``d_k = <psi, A^(k) psi>`` for ``k = 0..N``; real for hermitian ``A``."""
    A = np.asarray(A)
    psi = np.asarray(psi)
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise ValueError("psi must be normalized")
    N1 = A.shape[0]
    d = np.empty(N1)
    c = psi.conj()
    for k in range(N1):
        if k == 0:
            d[0] = float(np.real(np.sum(c * np.diag(A) * psi)))
        else:
            up = np.sum(c[:-k] * np.diag(A, k) * psi[k:])
            lo = np.sum(c[k:] * np.diag(A, -k) * psi[:-k])
            d[k] = float(np.real(up + lo))
    return d


@dataclass
class LocalizationWitness:
    start: int
    phi: np.ndarray
    energy: float
    excess: float
    denominator: float
    measured_C: float
    vacuous: bool = False


def localize_matrix(A: np.ndarray, psi: np.ndarray, MM: int) -> LocalizationWitness:
    """Best window state of length ``MM`` by exhaustive search.

    Every window ``[n, n + MM)`` is tried with the ground state of the
    restricted matrix; ``excess = <phi, A phi> - <psi, A psi>`` and
    ``measured_C = excess / (MM^-2 sum_{k<MM} k^2 |d_k| + sum_{k>=MM} |d_k|)``.
    """
    A = np.asarray(A)
    N1 = A.shape[0]
    if not 1 <= MM <= N1:
        raise ValueError("MM must lie in 1..N+1")
    d = diag_band_expectations(A, psi)
    lam = float(d.sum())
    ks = np.arange(N1)
    den = float(np.sum(ks[1:MM] ** 2 * np.abs(d[1:MM])) / MM**2 + np.sum(np.abs(d[MM:])))
    best = None
    for n in range(N1 - MM + 1):
        w, v = np.linalg.eigh(A[n : n + MM, n : n + MM])
        if best is None or w[0] < best[0]:
            best = (float(w[0]), n, v[:, 0])
    e, n, vec = best
    phi = np.zeros(N1, dtype=np.result_type(A, vec))
    phi[n : n + MM] = vec
    excess = e - lam
    if den > 0:
        C, vacuous = excess / den, False
    else:
        C, vacuous = (math.inf if excess > 0 else 0.0), excess > 0
    return LocalizationWitness(n, phi, e, excess, den, float(C), vacuous)


# ------------------------------------------------------------- trials


def _rngs(seed: int, count: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(count)]


@dataclass
class BogolubovTrial:
    n: int
    A: float
    B: float
    kappa: complex
    margin: float


def random_bogolubov_trials(trials: int, seed: int = 0, n_max: int = 6, m: int = 3,
                            boundary_every: int = 10) -> list[BogolubovTrial]:
    """Seeded random ``(A, B, kappa)`` with ``-A < B <= A``; every ``boundary_every``-th trial has ``B = A``."""
    gens = _rngs(seed, trials)

    def one(i):
        g = gens[i]
        n = int(g.integers(1, n_max + 1))
        A = float(g.uniform(0.1, 3.0))
        B = A if boundary_every and i % boundary_every == 0 else float(A * (1.0 - 2.0 * g.uniform(0.0, 1.0)))
        if B <= -A:
            B = A
        kappa = complex(g.normal(), g.normal())
        return BogolubovTrial(n, A, B, kappa, verify_bogolubov_operator_inequality(FockBasis(m, n), A, B, kappa))

    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        return list(pool.map(one, range(trials)))


def random_pentadiagonal(g: np.random.Generator, N: int) -> np.ndarray:
    """Random complex hermitian ``(N+1) x (N+1)`` matrix with bandwidth 2."""
    N1 = N + 1
    A = np.diag(g.normal(size=N1)).astype(complex)
    for k in (1, 2):
        off = g.normal(size=N1 - k) + 1j * g.normal(size=N1 - k)
        A += np.diag(off, k) + np.diag(off.conj(), -k)
    return A


def matrix_localization_trials(trials: int, seed: int = 0, N: int = 40, MM: int = 8) -> list[LocalizationWitness]:
    """Localize random pentadiagonal matrices against the normalized all-ones vector."""
    gens = _rngs(seed, trials)
    psi = np.ones(N + 1) / math.sqrt(N + 1)

    def one(i):
        return localize_matrix(random_pentadiagonal(gens[i], N), psi, MM)

    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        return list(pool.map(one, range(trials)))
