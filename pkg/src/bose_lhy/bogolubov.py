"""Per-mode Bogolubov coefficients, the quadratic lower bound and the LHY constant."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

LHY_COEFFICIENT = 128.0 / (15.0 * math.sqrt(math.pi))
LHY_INTEGRAL = 32.0 * math.pi * math.sqrt(2.0) / 15.0


@dataclass(frozen=True)
class TauParams:
    """Kinetic multiplier data for a box.

    ``kind`` is ``"big"`` or ``"small"``; ``eps0`` and ``eps_T`` are the kinetic
    energy fractions set aside, ``s`` and ``d`` the cutoff scales and ``ell``
    the big-box side.
    """

    kind: str
    eps0: float
    eps_T: float
    s: float
    d: float
    ell: float

    def __post_init__(self):
        if self.kind not in ("big", "small"):
            raise ValueError("kind must be 'big' or 'small'")
        if not 0.0 <= self.eps0 <= 0.5:
            raise ValueError("eps0 must lie in [0, 1/2]")
        if not 0.0 < self.eps_T < 1.0:
            raise ValueError("eps_T must lie in (0, 1)")
        if not (0.0 < self.s < 1.0 and 0.0 < self.d < 1.0):
            raise ValueError("s and d must lie in (0, 1)")
        if not self.ell > 0:
            raise ValueError("ell must be positive")


def tau_B(k, params: TauParams):
    """Kinetic multiplier ``tau_B`` at wavenumber ``|k|``.

    Big box: ``(1-eps0)[(1-eps_T)(|k| - (s l)^-1/2)_+^2 + eps_T(|k| - (d s l)^-1/2)_+^2]``.
    Small box: ``(1-eps0)(|k| - (d s l)^-1)_+^2``.
    """
    k = np.abs(np.asarray(k, dtype=float))
    p = params
    if p.kind == "big":
        out = (1.0 - p.eps_T) * np.clip(k - 0.5 / (p.s * p.ell), 0.0, None) ** 2
        out = out + p.eps_T * np.clip(k - 0.5 / (p.d * p.s * p.ell), 0.0, None) ** 2
    else:
        out = np.clip(k - 1.0 / (p.d * p.s * p.ell), 0.0, None) ** 2
    out = (1.0 - p.eps0) * out
    return float(out) if out.ndim == 0 else out


def neumann_gaps(eps_T: float, d: float, ell: float, b: float = 1.0) -> dict:
    """Gap constants above the condensate: small box ``eps_T (1+pi^-2)^-1 (d l)^-2``, big box ``b l^-2``."""
    return {
        "small": eps_T / (1.0 + math.pi**-2) / (d * ell) ** 2,
        "big": b / ell**2,
    }


@dataclass(frozen=True)
class QuadraticCoefficients:
    A: float
    B: float
    kappa: complex
    valid: bool = True

    def algebraic_ok(self) -> bool:
        return -self.A < self.B <= self.A


def coefficients(
    k,
    n: int,
    volume: float,
    rho: float,
    W_hat: float,
    chi_hat_B: float,
    sigma: float,
    params: TauParams,
    R: float | None = None,
    a: float | None = None,
    c: float | None = None,
) -> QuadraticCoefficients:
    """``A = tau_B/n + W^/|B|``, ``B = W^/|B|``, ``kappa = sigma (n - rho|B|) W^ |B|^-3/2 chi^_B``.

    The flag requires ``-A < B <= A``; when ``R``, ``a`` and ``c`` are given
    and ``|k| >= 1/R`` it also requires ``n/|B| <= c / (a R^2)``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    kk = float(np.linalg.norm(np.atleast_1d(np.asarray(k, dtype=float))))
    tau = tau_B(kk, params)
    A = tau / n + W_hat / volume
    B = W_hat / volume
    kappa = complex(sigma * (n - rho * volume) * W_hat * volume**-1.5 * chi_hat_B)
    valid = -A < B <= A
    if valid and R is not None and kk >= 1.0 / R and a is not None and c is not None:
        valid = n / volume <= c / (a * R**2)
    return QuadraticCoefficients(A, B, kappa, bool(valid))


def validity_constant(W_hat, params: TauParams, R: float, a: float, k_max_factor: float = 200.0,
                      n_k: int = 4000, strong: bool = False) -> float:
    """Largest ``c`` such that ``n/|B| <= c/(a R^2)`` forces ``A >= |B|`` for ``|k| >= 1/R``.

    ``W_hat`` is a callable in ``|k|``.  Where ``W^ >= 0`` the condition is
    automatic; elsewhere it reads ``n/|B| <= tau / (2|W^|)``.  With ``strong``
    the target is ``A + B >= 2|B|``, which needs ``tau / (4|W^|)``.
    """
    k = np.geomspace(1.0 / R, k_max_factor / R, n_k)
    w = np.asarray(W_hat(k), dtype=float)
    tau = np.asarray(tau_B(k, params))
    neg = w < 0
    if not neg.any():
        return math.inf
    factor = 4.0 if strong else 2.0
    return float(np.min(a * R**2 * tau[neg] / (factor * np.abs(w[neg]))))


def bogolubov_lower_bound(A: float | QuadraticCoefficients, B: float | None = None, kappa: complex = 0.0,
                          c_plus: float = 1.0, c_minus: float = 1.0) -> float:
    """``-(A - sqrt(A^2 - B^2))(c+ + c-)/2 - 2|kappa|^2 / (A + B)``."""
    if isinstance(A, QuadraticCoefficients):
        A, B, kappa = A.A, A.B, A.kappa
    if B is None:
        raise TypeError("B is required")
    if not -A < B <= A:
        raise ValueError(f"need -A < B <= A, got A={A}, B={B}")
    if c_plus < 0 or c_minus < 0:
        raise ValueError("commutator bounds must be non-negative")
    root = math.sqrt(max(A * A - B * B, 0.0))
    # A - root written without cancellation
    gap = B * B / (A + root) if A + root > 0 else 0.0
    return -0.5 * gap * (c_plus + c_minus) - 2.0 * abs(kappa) ** 2 / (A + B)


def h0_gap_integrand(k, n: int, n0: float, volume: float, W_hat: float, params: TauParams,
                     chi_sq_integral: float = 1.0) -> float:
    """``-(tau/n + W^/|B| - sqrt(tau^2/n^2 + 2 tau W^/(n|B|))) n0 int chi_B^2``."""
    tau = tau_B(float(np.linalg.norm(np.atleast_1d(k))), params)
    t = tau / n
    w = W_hat / volume
    arg = t * (t + 2.0 * w)
    if arg < 0:
        raise ValueError("kinetic term too small for this W^; outside the valid regime")
    root = math.sqrt(arg)
    paren = (t + w) - root
    if t + w + root > 0:
        paren = w * w / (t + w + root)
    return -paren * n0 * chi_sq_integral


def sigma_correction(n: float, rho: float, volume: float, W_hat: float, chi_hat_B: float, a: float,
                     R: float, ell: float, M: int, sigma: float = 1.0, C: float = 1.0) -> tuple[float, float]:
    """``(-sigma^2 (n - rho|B|)^2 |B|^-2 |chi^_B|^2 |W^|, C sigma^2 |B|^-1 a (n - rho|B|)^2 (R/l)^(2M))``."""
    dev = (n - rho * volume) ** 2
    main = -(sigma**2) * dev * abs(chi_hat_B) ** 2 * abs(W_hat) / volume**2
    remainder = C * sigma**2 * a * dev * (R / ell) ** (2 * M) / volume
    return main, remainder


def z_penalty(n_plus: float, a: float, R: float, volume: float, max_chi_sq: float, C: float = 1.0) -> float:
    """``C n_+ a min(R^-3, |B|^-1) max chi_B^2``."""
    return C * n_plus * a * min(R**-3, 1.0 / volume) * max_chi_sq


# ------------------------------------------------------------------ LHY


def _lhy_integrand(k):
    # (-k^2 - 1 + k^2 sqrt(1 + 2/k^2) + 1/(2k^2)) k^2 without cancellation
    k = np.asarray(k, dtype=float)
    root = np.sqrt(k * k + 2.0)
    return (1.0 + 2.0 * k / (root + k)) / (2.0 * (k * root + k * k + 1.0))


def _lhy_tail(u):
    # integrand at k = 1/u times the Jacobian 1/u^2
    u = np.asarray(u, dtype=float)
    s = np.sqrt(1.0 + 2.0 * u * u)
    D = 1.0 + u * u + s
    return (1.0 + 2.0 / (s + 1.0)) / (2.0 * D)


def lhy_integrand(k):
    """``(-k^2 - 1 + k^2 sqrt(1 + 2 k^-2) + k^-2/2) k^2``."""
    return _lhy_integrand(k)


def lhy_dimensionless_integral(tol: float = 1e-10) -> float:
    """``4 pi int_0^inf (-k^2 - 1 + k^2 sqrt(1 + 2/k^2) + 1/(2 k^2)) k^2 dk = 32 pi sqrt(2) / 15``.

    The range ``k > 1`` is mapped to ``u = 1/k`` in ``(0, 1]``, where the
    integrand times the Jacobian is bounded, so no truncation is needed.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    head, e1 = integrate.quad(_lhy_integrand, 0.0, 1.0, epsabs=tol / 100, epsrel=1e-14)
    tail, e2 = integrate.quad(_lhy_tail, 0.0, 1.0, epsabs=tol / 100, epsrel=1e-14)
    if e1 + e2 > tol:
        raise ArithmeticError(f"LHY quadrature error estimate {e1 + e2:.2e} exceeds tol {tol:.2e}")
    return 4.0 * math.pi * (head + tail)


def lhy_energy(rho: float, a: float) -> float:
    """``4 pi rho^2 a (1 + 128/(15 sqrt pi) sqrt(rho a^3))``."""
    if rho < 0 or a < 0:
        raise ValueError("rho and a must be non-negative")
    return 4.0 * math.pi * rho**2 * a * (1.0 + LHY_COEFFICIENT * math.sqrt(rho * a**3))


def e0_lower(rho: float, a: float, a2: float) -> float:
    """``4 pi rho^2 (a_2 + 128/(15 sqrt pi) a sqrt(rho a^3))``."""
    if rho < 0 or a < 0:
        raise ValueError("rho and a must be non-negative")
    return 4.0 * math.pi * rho**2 * (a2 + LHY_COEFFICIENT * a * math.sqrt(rho * a**3))


def lhy_consistency(I: float | None = None) -> tuple[float, float]:
    """Both sides of ``(2pi)^-3 (8pi)^(5/2) I / 2 = 4 pi 128/(15 sqrt pi)``."""
    if I is None:
        I = lhy_dimensionless_integral()
    return 0.5 * (2.0 * math.pi) ** -3 * (8.0 * math.pi) ** 2.5 * I, 4.0 * math.pi * LHY_COEFFICIENT


def sqrt_bounds(x) -> dict:
    """Check ``1 + x/2 - x^2/8 <= sqrt(1+x) <= 1 + x/2`` on ``x >= 0``.

    Also reports the smallest ``C`` with ``1 + x/2 - C x^2 <= sqrt(1+x)`` on the grid.
    """
    x = np.asarray(x, dtype=float)
    r = np.sqrt(1.0 + x)
    upper = bool(np.all(r <= 1.0 + 0.5 * x + 1e-15))
    lower = bool(np.all(1.0 + 0.5 * x - x * x / 8.0 <= r + 1e-15))
    pos = x > 0
    # 1 + x/2 - sqrt(1+x) = x^2 / (4 (1 + x/2 + sqrt(1+x)))
    gap = x[pos] ** 2 / (4.0 * (1.0 + 0.5 * x[pos] + r[pos]))
    C = float(np.max(gap / x[pos] ** 2)) if pos.any() else 0.0
    return {"upper": upper, "lower_eighth": lower, "measured_C": C}
