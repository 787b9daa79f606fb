"""Scattering length from the zero-energy radial equation and from the Born series.

With ``nu = 1`` the scattering solution obeys ``-Lap f + v f / 2 = 0``; for
``u = r f`` this is ``u'' = v u / 2`` and outside the range ``u`` is linear,
``u(r) = c (r - a)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .potentials import (
    RadialFunction,
    RadialPotential,
    chebyshev_nodes,
    fourier_radial_grid,
    scale_to_range,
)
from ._util import max_workers


class ScatteringError(RuntimeError):
    pass


@dataclass
class ScatteringResult:
    a: float
    born_terms: list[float] = field(default_factory=list)
    born_sum: float | None = None
    ode_residual: float = 0.0
    r_match: float = 0.0
    ratios: list[float] = field(default_factory=list)
    diverged: bool = False


def scattering_length_ode(
    v: RadialPotential, tol: float = 1e-10, max_step: float | None = None, n_segments: int = 32
) -> ScatteringResult:
    """Integrate ``u'' = v u / 2`` from ``u(0)=0, u'(0)=1`` out to ``2 R0``.

    The interval inside the support is split into ``n_segments`` pieces and
    ``(u, u')`` is renormalised at each boundary so that steep potentials
    cannot overflow.  The scattering length is read off at ``1.5 R0`` and the
    spread of ``r - u/u'`` over ``[R0, 2 R0]`` is the residual.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    R0 = v.range
    if v.amplitude == 0.0:
        return ScatteringResult(a=0.0, r_match=1.5 * R0)
    rtol = max(min(1e-6, tol * 1e-3), 1e-13)
    hmax = max_step if max_step is not None else R0 / 16
    y = np.array([0.0, 1.0])
    edges = np.linspace(0.0, R0, n_segments + 1)

    def rhs(r, y):
        return [y[1], 0.5 * v(r) * y[0]]

    for lo, hi in zip(edges[:-1], edges[1:]):
        sol = solve_ivp(rhs, (lo, hi), y, method="DOP853", rtol=rtol, atol=rtol * 1e-3 * np.max(np.abs(y)),
                        max_step=hmax)
        if not sol.success:
            raise ScatteringError(f"integration failed on [{lo}, {hi}]: {sol.message}")
        y = sol.y[:, -1]
        y = y / np.max(np.abs(y))
    # outside the support the solution is linear; integrate anyway so the
    # spread of r - u/u' measures the integration error
    sol = solve_ivp(lambda r, y: [y[1], 0.0], (R0, 2 * R0), y, method="DOP853", rtol=rtol,
                    atol=rtol * 1e-3, dense_output=True, max_step=hmax)
    rs = np.linspace(R0, 2 * R0, 33)
    u, up = sol.sol(rs)
    if np.any(up <= 0):
        raise ScatteringError("u' vanished in the exterior; potential is not repulsive")
    a_vals = rs - u / up
    um, upm = sol.sol(1.5 * R0)
    a = 1.5 * R0 - um / upm
    residual = float(np.max(a_vals) - np.min(a_vals))
    if residual >= tol:
        raise ScatteringError(f"ODE residual {residual:.2e} exceeds tol {tol:.2e}")
    return ScatteringResult(a=float(a), ode_residual=residual, r_match=1.5 * R0)


def scattering_length_phase(v: RadialPotential, rtol: float = 1e-12) -> float:
    """Scattering length from the variable-phase form ``a' = v (r - a)^2 / 2``.

    Independent of :func:`scattering_length_ode`; it never overflows and is
    used as a cross-check.
    """
    if v.amplitude == 0.0:
        return 0.0
    sol = solve_ivp(lambda r, a: 0.5 * v(r) * (r - a) ** 2, (0.0, v.range), [0.0], method="Radau",
                    rtol=rtol, atol=rtol * 1e-3 * v.range)
    return float(sol.y[0, -1])


def uniform_ball_scattering_length(V0: float, R0: float) -> float:
    """Closed form ``R0 (1 - tanh(k R0) / (k R0))`` with ``k = sqrt(V0 / 2)``."""
    x = math.sqrt(V0 / 2.0) * R0
    return R0 * (1.0 - math.tanh(x) / x) if x > 0 else 0.0


class _NewtonGrid:
    """Chebyshev discretisation of ``g -> v(r) int g(y) / |x - y| dy`` on ``[0, R0]``."""

    def __init__(self, v: RadialPotential, n: int):
        self.v = v
        self.n = n
        self.r = chebyshev_nodes(v.range, n)
        self.vr = v(self.r)

    def function(self, values: np.ndarray) -> RadialFunction:
        return RadialFunction(self.r, values, "chebyshev", self.v.range)

    def apply(self, g: RadialFunction) -> np.ndarray:
        return self.vr * newton_potential(g, self.r)


def newton_potential(g: RadialFunction, r) -> np.ndarray:
    """``int g(y) / |x - y| dy`` at ``|x| = r`` for radial ``g``.

    Uses ``4 pi [ r^-1 int_0^r g s^2 ds + int_r^inf g s ds ]``.
    """
    r = np.asarray(r, dtype=float)
    inner = g.moment_integral(r, 2)
    outer = g.moment_integral(g.r_max, 1) - g.moment_integral(r, 1)
    safe = np.where(r > 0, r, 1.0)
    first = np.where(r > 0, inner / safe, 0.0)
    return 4.0 * math.pi * (first + outer)


def newton_kernel_apply(v: RadialPotential, g: RadialFunction, n: int = 64) -> RadialFunction:
    """Apply ``L_v(g)(x) = v(x) int |x - y|^-1 g(y) dy``.

    The output is supported in the support of ``v`` and returned on a
    Chebyshev grid of ``[0, R0]``.
    """
    grid = _NewtonGrid(v, n)
    return grid.function(grid.apply(g))


def born_terms(v: RadialPotential, K: int, n: int = 64) -> ScatteringResult:
    """Born terms ``a_1 ... a_K``.

    ``a_1 = (8 pi)^-1 int v`` and ``a_k = -(-8 pi)^-k int L_v^(k-1)(v)``.
    Divergence is declared once the scaled norms ``||L_v^k v||_1 / (8 pi)^k``
    grow three times in a row; terms are still returned.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    grid = _NewtonGrid(v, n)
    f = grid.function(grid.vr)
    terms = [f.volume_integral() / (8.0 * math.pi)]
    norms = [f.l1_norm()]
    growth = 0
    diverged = False
    for k in range(2, K + 1):
        f = grid.function(grid.apply(f))
        terms.append(-((-8.0 * math.pi) ** (-k)) * f.volume_integral())
        norms.append(f.l1_norm() / (8.0 * math.pi) ** (k - 1))
        growth = growth + 1 if norms[-1] > norms[-2] else 0
        if growth >= 3:
            diverged = True
    ratios = [abs(terms[i + 1] / terms[i]) if terms[i] != 0 else math.inf for i in range(len(terms) - 1)]
    return ScatteringResult(a=math.nan, born_terms=terms, born_sum=float(sum(terms)), ratios=ratios,
                            diverged=diverged)


def self_interaction(v: RadialPotential, n: int = 64) -> float:
    """``int int v(x) v(y) / |x - y| dx dy`` via the radial Newton formula."""
    grid = _NewtonGrid(v, n)
    return grid.function(grid.apply(grid.function(grid.vr))).volume_integral()


def fourier_k2_integral(v: RadialPotential, k_max_factor: float = 400.0, nodes: int = 24):
    """``int v^(k)^2 / |k|^2 dk`` over R^3 together with the tail estimate.

    Returns ``(value, tail)``.  The radial integral ``4 pi int_0^K v^2 dk``
    uses Gauss-Legendre panels of a quarter period; beyond ``K`` the
    integrand is extrapolated as ``C k^-p`` with ``C, p`` fitted to the
    period-averaged envelope over the last decade.
    """
    R0 = v.range
    K = k_max_factor / R0
    width = 0.5 * math.pi / R0
    n_panels = int(math.ceil(K / width))
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.arange(n_panels + 1) * width
    half = 0.5 * width
    k = (edges[:-1, None] + half * (x[None, :] + 1.0)).ravel()
    wk = np.tile(half * w, n_panels)
    vh = fourier_radial_grid(v, k)
    body = 4.0 * math.pi * float(np.sum(wk * vh**2))
    # envelope over whole periods near K and K/4
    def avg(end_panel):
        sl = slice((end_panel - 4) * nodes, end_panel * nodes)
        return float(np.sum(wk[sl] * vh[sl] ** 2) / np.sum(wk[sl])), float(np.mean(k[sl]))

    m_hi, k_hi = avg(n_panels)
    m_lo, k_lo = avg(max(4, n_panels // 4))
    if m_hi > 0 and m_lo > 0 and k_hi > k_lo:
        p = math.log(m_lo / m_hi) / math.log(k_hi / k_lo)
        p = max(p, 2.5)
        tail = 4.0 * math.pi * m_hi * k_hi**p * K ** (1.0 - p) / (p - 1.0)
    else:
        tail = 0.0
    return body + tail, tail


def a2_fourier(v: RadialPotential, k_max_factor: float = 400.0) -> float:
    """Second Born term from the Fourier side, ``-(4pi)^-1 (2pi)^-3 int v^2 / (4 k^2) dk``."""
    if v.amplitude == 0.0:
        return 0.0
    val, _ = fourier_k2_integral(v, k_max_factor)
    return -val / (4.0 * math.pi * (2.0 * math.pi) ** 3 * 4.0)


@dataclass
class BornStudyRow:
    R: float
    a_ode: float
    born_sum: float
    a1_plus_a2: float
    gap_two_term: float
    gap_series: float
    diverged: bool
    ratios: list[float]


@dataclass
class BornStudy:
    rows: list[BornStudyRow]
    exponent: float | None
    prefactor: float | None


def born_convergence_study(v1: RadialPotential, R_list, K: int = 8, tol: float = 1e-10) -> BornStudy:
    """Compare the ODE scattering length with the Born series for ``v_R``.

    Fits ``|a - a_1 - a_2| ~ C R^p`` over the rows by least squares in log-log
    coordinates; the constant ``C`` is reported, not asserted.
    """
    R_list = sorted(float(R) for R in R_list)

    def row(R):
        vR = scale_to_range(v1, R)
        ode = scattering_length_ode(vR, tol=tol)
        born = born_terms(vR, K)
        two = born.born_terms[0] + (born.born_terms[1] if K >= 2 else 0.0)
        return BornStudyRow(R, ode.a, born.born_sum, two, abs(ode.a - two), abs(ode.a - born.born_sum),
                            born.diverged, born.ratios)

    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        rows = list(pool.map(row, R_list))
    good = [r for r in rows if r.gap_two_term > 0 and not r.diverged]
    exponent = prefactor = None
    if len(good) >= 2:
        x = np.log([r.R for r in good])
        y = np.log([r.gap_two_term for r in good])
        exponent, logc = np.polyfit(x, y, 1)
        exponent, prefactor = float(exponent), float(math.exp(logc))
    return BornStudy(rows, exponent, prefactor)
