"""Localization functions, box geometries, localized potentials and kinetic multipliers.

The cutoff is ``chi(x) = C_M prod_i cos(pi x_i)^(M+1)`` on the unit cube
``[-1/2, 1/2]^3``.  Everything here is separable per axis, so Fourier
transforms, autocorrelations and box integrals are products of
one-dimensional quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize
from scipy.special import comb

from .potentials import RadialPotential

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _binomial_ft(e: int, q) -> np.ndarray:
    """``int_{-1/2}^{1/2} cos(pi y)^e exp(-i q y) dy`` by binomial expansion."""
    q = np.asarray(q, dtype=float)
    if e == 0:
        return np.sinc(q / (2.0 * math.pi))
    out = np.zeros_like(q)
    for j in range(e + 1):
        w = math.pi * (e - 2 * j) - q
        out = out + comb(e, j, exact=True) * np.sinc(w / (2.0 * math.pi))
    return out / 2.0**e


def cos_power_integral(e: int) -> float:
    """``int_{-1/2}^{1/2} cos(pi y)^(2e) dy = binom(2e, e) / 4^e``."""
    return comb(2 * e, e, exact=True) / 4.0**e


@dataclass(frozen=True)
class LocalizationProfile:
    """Separable cutoff ``chi = C_M (zeta(x1) zeta(x2) zeta(x3))^(M+1)``.

    ``exponent`` is ``M + 1``; the indicator ``theta`` of the unit cube is the
    profile with exponent 0.
    """

    M: int
    C_M: float
    exponent: int

    @property
    def axis_constant(self) -> float:
        return self.C_M ** (1.0 / 3.0)

    def zeta(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.where(np.abs(y) <= 0.5, np.cos(math.pi * np.clip(y, -0.5, 0.5)), 0.0)

    def axis(self, y) -> np.ndarray:
        """One-dimensional factor ``C_M^(1/3) zeta(y)^(M+1)``."""
        y = np.asarray(y, dtype=float)
        inside = np.abs(y) <= 0.5
        if self.exponent == 0:
            return np.where(inside, self.axis_constant, 0.0)
        return self.axis_constant * self.zeta(y) ** self.exponent

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.axis(x[..., 0]) * self.axis(x[..., 1]) * self.axis(x[..., 2])

    def axis_hat(self, q) -> np.ndarray:
        return self.axis_constant * _binomial_ft(self.exponent, q)

    def hat(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return self.axis_hat(p[..., 0]) * self.axis_hat(p[..., 1]) * self.axis_hat(p[..., 2])

    def square_hat(self, p) -> np.ndarray:
        """Fourier transform of ``chi^2``."""
        p = np.asarray(p, dtype=float)
        c = self.axis_constant**2
        out = np.ones(p.shape[:-1])
        for i in range(3):
            out = out * c * _binomial_ft(2 * self.exponent, p[..., i])
        return out

    def axis_autocorrelation(self, t, nodes: int = 64) -> np.ndarray:
        """``int a(y) a(y + t) dy`` for the per-axis factor ``a``."""
        t = np.abs(np.asarray(t, dtype=float))
        x, w = _gauss(nodes)
        lo = -0.5
        hi = np.maximum(0.5 - t, lo)
        half = 0.5 * (hi - lo)
        y = lo + half[..., None] * (x + 1.0)
        vals = self.axis(y) * self.axis(y + t[..., None])
        return np.sum(vals * w, axis=-1) * half

    def convolution(self, z, nodes: int = 64) -> np.ndarray:
        """``(chi * chi)(z)``; equals the autocorrelation since ``chi`` is even."""
        z = np.asarray(z, dtype=float)
        return (
            self.axis_autocorrelation(z[..., 0], nodes)
            * self.axis_autocorrelation(z[..., 1], nodes)
            * self.axis_autocorrelation(z[..., 2], nodes)
        )

    def gradient_energy(self) -> float:
        """``int |grad chi|^2``."""
        e = self.exponent
        if e == 0:
            return math.inf
        x, w = _gauss(128)
        y = 0.5 * x
        a = self.axis(y)
        da = -self.axis_constant * e * math.pi * np.sin(math.pi * y) * np.cos(math.pi * y) ** (e - 1)
        one_d = 0.5 * float(np.sum(w * da**2))
        norm = 0.5 * float(np.sum(w * a**2))
        return 3.0 * one_d * norm**2


def chi_profile(M: int) -> LocalizationProfile:
    """Normalised cutoff with ``int chi^2 = 1``; ``C_0 = 2 sqrt 2``."""
    if M < 0 or int(M) != M:
        raise ValueError("M must be a non-negative integer")
    e = int(M) + 1
    return LocalizationProfile(int(M), cos_power_integral(e) ** -1.5, e)


def indicator_profile() -> LocalizationProfile:
    """Indicator ``theta`` of the unit cube centred at the origin."""
    return LocalizationProfile(-1, 1.0, 0)


def theta_hat(p) -> np.ndarray:
    """``prod_i 2 sin(p_i / 2) / p_i``."""
    p = np.asarray(p, dtype=float)
    return np.prod(np.sinc(p / (2.0 * math.pi)), axis=-1)


# ---------------------------------------------------------------- geometry


@dataclass(frozen=True)
class BoxGeometry:
    """Big box ``B(u) = l (u + [-1/2, 1/2]^3)`` or small box ``B(u) cap B~(u')``."""

    kind: str
    ell: float
    d: float = 1.0
    u: tuple[float, float, float] = (0.0, 0.0, 0.0)
    u_prime: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.kind not in ("big", "small"):
            raise ValueError("kind must be 'big' or 'small'")
        if not self.ell > 0:
            raise ValueError("ell must be positive")
        if self.kind == "small":
            if self.u_prime is None or not 0 < self.d <= 1:
                raise ValueError("small boxes need u_prime and 0 < d <= 1")
            if min(self.sides) <= 0:
                raise ValueError("small box does not intersect the big box")

    @classmethod
    def big(cls, ell: float, u=(0.0, 0.0, 0.0)) -> "BoxGeometry":
        return cls("big", float(ell), 1.0, tuple(float(c) for c in u))

    @classmethod
    def small(cls, ell: float, d: float, u=(0.0, 0.0, 0.0), u_prime=(0.0, 0.0, 0.0)) -> "BoxGeometry":
        return cls("small", float(ell), float(d), tuple(float(c) for c in u), tuple(float(c) for c in u_prime))

    def interval(self, i: int) -> tuple[float, float]:
        lo, hi = self.ell * (self.u[i] - 0.5), self.ell * (self.u[i] + 0.5)
        if self.kind == "small":
            dl = self.d * self.ell
            lo = max(lo, dl * (self.u_prime[i] - 0.5))
            hi = min(hi, dl * (self.u_prime[i] + 0.5))
        return lo, hi

    @property
    def sides(self) -> list[float]:
        return [self.interval(i)[1] - self.interval(i)[0] for i in range(3)]

    @property
    def lambdas(self) -> list[float]:
        return sorted(self.sides)

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    def axis_factor(self, i: int, x, profile: LocalizationProfile) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = profile.axis(x / self.ell - self.u[i])
        if self.kind == "small":
            out = out * profile.axis(x / (self.d * self.ell) - self.u_prime[i])
        return out

    def chi_B(self, x, profile: LocalizationProfile) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (
            self.axis_factor(0, x[..., 0], profile)
            * self.axis_factor(1, x[..., 1], profile)
            * self.axis_factor(2, x[..., 2], profile)
        )

    def axis_max_sq(self, i: int, profile: LocalizationProfile) -> float:
        lo, hi = self.interval(i)
        y = np.linspace(lo, hi, 2001)
        f = self.axis_factor(i, y, profile) ** 2
        j = int(np.argmax(f))
        a, b = y[max(j - 1, 0)], y[min(j + 1, len(y) - 1)]
        res = optimize.minimize_scalar(lambda t: -float(self.axis_factor(i, t, profile)) ** 2, bounds=(a, b),
                                       method="bounded", options={"xatol": 1e-14 * max(1.0, abs(b - a))})
        return max(float(f[j]), -float(res.fun))

    def max_chi_sq(self, profile: LocalizationProfile) -> float:
        return float(np.prod([self.axis_max_sq(i, profile) for i in range(3)]))

    def axis_autocorrelation(self, i: int, t, profile: LocalizationProfile, nodes: int = 64) -> np.ndarray:
        """``int f_i(y) f_i(y + t) dy`` over the box interval."""
        t = np.abs(np.asarray(t, dtype=float))
        lo, hi = self.interval(i)
        x, w = _gauss(nodes)
        top = np.maximum(hi - t, lo)
        half = 0.5 * (top - lo)
        y = lo + half[..., None] * (x + 1.0)
        vals = self.axis_factor(i, y, profile) * self.axis_factor(i, y + t[..., None], profile)
        return np.sum(vals * w, axis=-1) * half

    def overlap(self, z, profile: LocalizationProfile, nodes: int = 64) -> np.ndarray:
        """``A_B(z) = int chi_B(y + z) chi_B(y) dy``."""
        z = np.asarray(z, dtype=float)
        return (
            self.axis_autocorrelation(0, z[..., 0], profile, nodes)
            * self.axis_autocorrelation(1, z[..., 1], profile, nodes)
            * self.axis_autocorrelation(2, z[..., 2], profile, nodes)
        )


# ------------------------------------------------------------- identities


@dataclass
class PartitionResidual:
    unit: float
    convolution: float
    marginal: float | None = None


def partition_identity_residual(
    profile: LocalizationProfile, x, ell: float = 1.0, y=None, d: float | None = None, nodes: int = 96
) -> PartitionResidual:
    """Residuals of ``int chi_u(x)^2 du = 1`` and of the convolution identity.

    ``chi_u(x) = chi(x / l - u)``.  The ``u`` integral runs over the cube where
    ``chi_u(x)`` can be non-zero, one axis at a time.  With ``y`` given, the
    second residual compares ``(chi * chi)((x - y) / l)`` against
    ``int chi_u(x) chi_u(y) du``.  With ``d`` given, the third compares
    ``int chi_{B(u,u')}(x)^2 du'`` against ``chi_u(x)^2`` at ``u = 0``.
    """
    x = np.asarray(x, dtype=float)
    gx, gw = _gauss(nodes)
    xs = x / ell
    unit = 1.0
    for i in range(3):
        # u ranges over xs_i + [-1/2, 1/2]
        u = xs[i] + 0.5 * gx
        unit *= 0.5 * float(np.sum(gw * profile.axis(xs[i] - u) ** 2))
    conv = 0.0
    if y is not None:
        ys = np.asarray(y, dtype=float) / ell
        lhs = float(profile.convolution(xs - ys, nodes))
        rhs = 1.0
        for i in range(3):
            lo = max(xs[i], ys[i]) - 0.5
            hi = min(xs[i], ys[i]) + 0.5
            if hi <= lo:
                rhs = 0.0
                break
            u = lo + 0.5 * (hi - lo) * (gx + 1.0)
            rhs *= 0.5 * (hi - lo) * float(np.sum(gw * profile.axis(xs[i] - u) * profile.axis(ys[i] - u)))
        conv = abs(lhs - rhs)
    marginal = None
    if d is not None:
        target = float(profile(xs)) ** 2
        lhs = target
        zs = x / (d * ell)
        for i in range(3):
            u = zs[i] + 0.5 * gx
            lhs *= 0.5 * float(np.sum(gw * profile.axis(zs[i] - u) ** 2))
        marginal = abs(lhs - target)
    return PartitionResidual(abs(unit - 1.0), conv, marginal)


# --------------------------------------------------- localized potentials


class LocalizationError(ValueError):
    pass


@dataclass
class SelfEnergy:
    """Localized interaction on a box together with its measured constants."""

    U_B: float
    geometry: BoxGeometry
    profile: LocalizationProfile
    v: RadialPotential
    sandwich_constant: float = math.nan
    bounds: dict = field(default_factory=dict)

    def W(self, x) -> np.ndarray:
        return localized_W(self.v, self.geometry, self.profile, x)

    def w_B(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.geometry.chi_B(x, self.profile) * self.W(x - y) * self.geometry.chi_B(y, self.profile)


def localized_W(v: RadialPotential, geometry: BoxGeometry, profile: LocalizationProfile, x) -> np.ndarray:
    """``W_b = v_R / (chi*chi)(x/l)``; small boxes also divide by ``(chi*chi)(x/(d l))``."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    num = v(r)
    den = profile.convolution(x / geometry.ell)
    if geometry.kind == "small":
        den = den * profile.convolution(x / (geometry.d * geometry.ell))
    bad = (num > 0) & (den <= 0)
    if np.any(bad):
        raise LocalizationError("denominator vanishes inside the support of v_R; range too large for the box")
    return np.where(num > 0, num / np.where(den > 0, den, 1.0), 0.0)


def _ball_rule(R: float, n_r: int = 32, n_mu: int = 32, n_phi: int = 48):
    """Product rule on the ball of radius ``R``: points ``(n, 3)`` and weights."""
    xr, wr = _gauss(n_r)
    r = 0.5 * R * (xr + 1.0)
    wr = 0.5 * R * wr * r**2
    mu, wmu = _gauss(n_mu)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    wphi = np.full(n_phi, 2.0 * math.pi / n_phi)
    sin_t = np.sqrt(1.0 - mu**2)
    pts = np.stack(
        np.broadcast_arrays(
            r[:, None, None] * sin_t[None, :, None] * np.cos(phi)[None, None, :],
            r[:, None, None] * sin_t[None, :, None] * np.sin(phi)[None, None, :],
            r[:, None, None] * mu[None, :, None] * np.ones_like(phi)[None, None, :],
        ),
        axis=-1,
    ).reshape(-1, 3)
    w = (wr[:, None, None] * wmu[None, :, None] * wphi[None, None, :]).ravel()
    return pts, w


def _ball_nodes(v: RadialPotential, geometry: BoxGeometry, profile: LocalizationProfile, n_r: int = 24,
                n_mu: int = 24, n_phi: int = 32):
    """Ball quadrature nodes with ``W`` already evaluated; weights include ``W``."""
    pts, w = _ball_rule(v.range, n_r, n_mu, n_phi)
    return pts, w * localized_W(v, geometry, profile, pts)


def sandwich_constant(v: RadialPotential, geometry: BoxGeometry, profile: LocalizationProfile, n: int = 2000):
    """Smallest ``C`` with ``v_R <= W <= (1 + C (R / L)^2) v_R`` on sampled points.

    ``L`` is ``l`` for big boxes and ``d l`` for small ones.  Returns
    ``(C, lower_ok)``.
    """
    rng = np.random.Generator(np.random.Philox(12345))
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = v.range * rng.random(n) ** (1.0 / 3.0)
    x = d * r[:, None]
    x = np.concatenate([x, np.zeros((1, 3))])
    vr = v(np.linalg.norm(x, axis=1))
    W = localized_W(v, geometry, profile, x)
    mask = vr > 0
    L = geometry.ell if geometry.kind == "big" else geometry.d * geometry.ell
    ratio = W[mask] / vr[mask]
    C = float(np.max(ratio - 1.0)) / (v.range / L) ** 2
    lower_ok = bool(np.all(W >= vr * (1.0 - 1e-14)))
    return C, lower_ok


def self_energy(
    geometry: BoxGeometry,
    v: RadialPotential,
    profile: LocalizationProfile,
    a: float | None = None,
    check_bounds: bool = True,
    n_x: int = 3,
) -> SelfEnergy:
    """``U_B = |B|^-2 / 2 int int w_B(x, y) dx dy``.

    Reduced to ``|B|^-2 / 2 int W(z) A_B(z) dz`` with the separable overlap
    ``A_B``; the remaining integral runs over the ball of radius ``R``.
    With ``check_bounds`` the three self-energy bounds are evaluated and
    their constants recorded; ``a`` defaults to ``a_1``.
    """
    B = geometry.volume

    pts, wW = _ball_nodes(v, geometry, profile)
    U = 0.5 * float(np.sum(wW * geometry.overlap(pts, profile))) / B**2
    out = SelfEnergy(U, geometry, profile, v)
    if not check_bounds:
        return out
    C_sw, lower_ok = sandwich_constant(v, geometry, profile)
    out.sandwich_constant = C_sw
    if a is None:
        a = v.integral() / (8.0 * math.pi)
    R = v.range
    mx = geometry.max_chi_sq(profile)
    lam = geometry.lambdas
    # max_x int w_B(x, y) dy over a small grid of x in the box
    best = 0.0
    grids = [np.linspace(*geometry.interval(i), n_x + 2)[1:-1] for i in range(3)]
    for xv in np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, 3):
        cx = float(geometry.chi_B(xv, profile))
        if cx > 0.0:
            best = max(best, cx * float(np.sum(wW * geometry.chi_B(xv[None, :] - pts, profile))))
    lower_scale = a / (B * R**3) * mx * float(np.prod([min(l, R) for l in lam]))
    out.bounds = {
        "row_sum_constant": best / (B * U) if U > 0 else math.inf,
        "lower_constant": lower_scale / U if U > 0 else math.inf,
        "upper_R_constant": U / (a / R**3 * mx),
        "upper_B_constant": U / (a / B * mx),
        "max_chi_sq": mx,
        "sandwich_lower_holds": lower_ok,
    }
    if geometry.kind == "small":
        l1 = lam[0] / (geometry.d * geometry.ell)
        out.bounds["sliver_constant"] = mx / l1 ** (4 * (profile.M + 1)) if l1 > 0 else math.inf
    return out


def localized_potential(v: RadialPotential, geometry: BoxGeometry, profile: LocalizationProfile,
                        a: float | None = None) -> SelfEnergy:
    """Localized potential with evaluators for ``W`` and ``w_B`` and the self-energy."""
    return self_energy(geometry, v, profile, a=a, check_bounds=True)


# ------------------------------------------------------ kinetic multiplier


def shifted_square(s: float) -> Callable[[np.ndarray], np.ndarray]:
    """``K(q) = (|q| - 1/s)_+^2``."""
    if not s > 0:
        raise ValueError("s must be positive")

    def K(q):
        return np.clip(np.linalg.norm(np.asarray(q, dtype=float), axis=-1) - 1.0 / s, 0.0, None) ** 2

    return K


@dataclass
class MultiplierGrid:
    p_axis: np.ndarray
    F: np.ndarray
    F0_residual: float
    min_F: float
    tail_mass: float


def _constant_F(profile: LocalizationProfile, K: float, p) -> np.ndarray:
    # K constant: F = K (1 - 2 theta^ (chi^2)^ + theta^2), exact
    th = theta_hat(p)
    return K * (1.0 - 2.0 * th * profile.square_hat(p) + th**2)


def _tail_mass(profile: LocalizationProfile, Q: float) -> float:
    # fraction of int chi^2 carried by |q_i| > Q on some axis
    q = np.linspace(-Q, Q, 4001)
    g2 = profile.axis_hat(q) ** 2
    inside = np.trapezoid(g2, q) / (2.0 * math.pi) / profile.axis_constant**2 / cos_power_integral(profile.exponent)
    return float(max(0.0, 1.0 - inside**3))


def kinetic_multiplier_F(
    profile: LocalizationProfile, K, p, h: float = 1.0, q_max: float | None = None
) -> np.ndarray:
    """``F(p)`` for the localized multiplier ``K``.

    Evaluated as ``(2 pi)^-3 int K(q) (chi^(p - q) - theta^(p) chi^(q))^2 dq``,
    which is the expanded three-term expression rearranged, so ``F >= 0`` and
    ``F(0) = 0`` hold exactly for any quadrature.  The ``q`` integral is a
    lattice sum of spacing ``h``; for band-limited products this is exact.
    ``K`` may be a number, handled in closed form.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    if not callable(K):
        return _constant_F(profile, float(K), p)
    pmax = float(np.max(np.abs(p))) if p.size else 0.0
    if q_max is None:
        q_max = pmax + 40.0
    L = int(math.ceil(q_max / h))
    q1 = h * np.arange(-L, L + 1)
    Q = np.stack(np.meshgrid(q1, q1, q1, indexing="ij"), axis=-1)
    Kq = K(Q)
    g = profile.axis_hat(q1)
    Gq = g[:, None, None] * g[None, :, None] * g[None, None, :]
    out = np.empty(len(p))
    for j, pj in enumerate(p):
        a = [profile.axis_hat(pj[i] - q1) for i in range(3)]
        Gpq = a[0][:, None, None] * a[1][None, :, None] * a[2][None, None, :]
        th = float(theta_hat(pj))
        out[j] = float(np.sum(Kq * (Gpq - th * Gq) ** 2))
    return out * h**3 / (2.0 * math.pi) ** 3


def _separable_apply(T: np.ndarray, A: np.ndarray) -> np.ndarray:
    # contract each axis of T with the same matrix A (rows: outputs)
    out = np.tensordot(A, T, axes=(1, 0))
    out = np.tensordot(A, out, axes=(1, 1)).transpose(1, 0, 2)
    return np.tensordot(A, out, axes=(1, 2)).transpose(1, 2, 0)


def kinetic_multiplier_grid(
    profile: LocalizationProfile, K, n_p: int = 64, h: float = 1.0, margin: float = 40.0
) -> MultiplierGrid:
    """``F`` on the lattice ``h * {-n_p/2, ..., n_p/2 - 1}^3``.

    ``F = T1 - 2 theta^ T2 + theta^2 T3`` with ``T1 = K * chi^2`` and
    ``T2 = chi^ * (K chi^)``.  The ``q`` lattice extends ``margin`` beyond the
    ``p`` lattice, and because ``chi^`` is a product over axes both
    convolutions reduce to three matrix contractions.  All terms share one
    ``q`` lattice, so the result is exactly the lattice sum of
    ``K (chi^(p - q) - theta^ chi^(q))^2``.
    """
    P = n_p // 2
    L = P + int(math.ceil(margin / h))
    q1 = h * np.arange(-L, L + 1)
    p1 = h * np.arange(-P, n_p - P)
    g_q = profile.axis_hat(q1)
    Q = np.stack(np.meshgrid(q1, q1, q1, indexing="ij"), axis=-1)
    Kq = K(Q) if callable(K) else np.full(Q.shape[:-1], float(K))
    del Q
    G_q = g_q[:, None, None] * g_q[None, :, None] * g_q[None, None, :]
    diff = p1[:, None] - q1[None, :]
    A = profile.axis_hat(diff)
    T1 = _separable_apply(Kq, A**2)
    T2 = _separable_apply(Kq * G_q, A)
    T3 = float(np.sum(Kq * G_q**2))
    Pg = np.stack(np.meshgrid(p1, p1, p1, indexing="ij"), axis=-1)
    th = theta_hat(Pg)
    F = (T1 - 2.0 * th * T2 + th**2 * T3) * h**3 / (2.0 * math.pi) ** 3
    return MultiplierGrid(p1, F, abs(float(F[P, P, P])), float(F.min()), _tail_mass(profile, margin))


@dataclass
class FsReport:
    s: float
    M: int
    measured_C: float
    max_ratio_outer: float
    violations: list = field(default_factory=list)
    F_at_zero: float = 0.0


def _directions() -> np.ndarray:
    dirs = [(1, 0, 0), (1, 1, 0), (1, 1, 1), (2, 1, 0), (3, 2, 1), (1, 2, 2)]
    d = np.array(dirs, dtype=float)
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def F_s_bound_check(
    profile: LocalizationProfile, s: float, n_radial: int = 24, p_max_factor: float = 2.0, h: float = 1.0
) -> FsReport:
    """Check ``F <= F_s`` for ``K = (|q| - 1/s)_+^2`` along a fan of rays.

    For ``|p| >= 5/(6s)`` the bound ``(|p| - 1/(2s))^2`` is checked directly and
    violations are listed; below that the smallest ``C`` with
    ``F <= C s^(M-2) p^2`` is measured.
    """
    K = shifted_square(s)
    radii = np.linspace(0.0, p_max_factor / s, n_radial + 1)[1:]
    radii = np.union1d(radii, [5.0 / (6.0 * s), 2.0 / s])
    pts = (_directions()[:, None, :] * radii[None, :, None]).reshape(-1, 3)
    F = kinetic_multiplier_F(profile, K, pts, h=h)
    F0 = float(kinetic_multiplier_F(profile, K, np.zeros((1, 3)), h=h)[0])
    norm = np.linalg.norm(pts, axis=1)
    outer = norm >= 5.0 / (6.0 * s) * (1 - 1e-12)
    bound = (norm - 0.5 / s) ** 2
    violations = [tuple(map(float, x)) for x, f, b in zip(pts[outer], F[outer], bound[outer]) if f > b]
    inner = ~outer
    C = float(np.max(F[inner] / (s ** (profile.M - 2) * norm[inner] ** 2))) if inner.any() else 0.0
    ratio = float(np.max(F[outer] / bound[outer])) if outer.any() else 0.0
    return FsReport(s, profile.M, C, ratio, violations, abs(F0))


def spectral_tail(profile: LocalizationProfile, s: float, n: int, r_max: float = 4000.0, n_ang: int = 256) -> float:
    """``int_{|q| > 1/s} |q|^n chi^(q)^2 dq`` in spherical coordinates.

    Uses the octant symmetry of ``chi^2``.  The radial range is cut into
    geometric panels from ``1/s`` to ``r_max``; the remainder beyond ``r_max``
    is negligible for the orders used here.
    """
    mu, wmu = _gauss(n_ang)
    mu = 0.5 * (mu + 1.0)
    wmu = 0.5 * wmu
    ph, wph = _gauss(n_ang)
    ph = 0.25 * math.pi * (ph + 1.0)
    wph = 0.25 * math.pi * wph
    st = np.sqrt(1.0 - mu**2)
    dirs = np.stack(
        [st[:, None] * np.cos(ph)[None, :], st[:, None] * np.sin(ph)[None, :], mu[:, None] * np.ones_like(ph)[None, :]],
        axis=-1,
    )
    wang = wmu[:, None] * wph[None, :]
    x, w = _gauss(16)
    edges = [1.0 / s]
    while edges[-1] < r_max:
        edges.append(min(edges[-1] * 1.5, max(r_max, edges[-1] * 1.5)))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        r = lo + 0.5 * (hi - lo) * (x + 1.0)
        for ri, wi in zip(r, 0.5 * (hi - lo) * w):
            total += wi * ri ** (n + 2) * float(np.sum(wang * profile.hat(ri * dirs) ** 2))
    return 8.0 * total


def spectral_decay_constants(profile: LocalizationProfile, s_values: Sequence[float], n: int) -> list[float]:
    """Measured ``C(s) = tail / s^(2M - n)`` for each ``s``."""
    return [spectral_tail(profile, s, n) / s ** (2 * profile.M - n) for s in s_values]
