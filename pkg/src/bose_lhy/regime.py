"""Parameter selection, the list of conditions and the error ledger.

Every quantity is carried as a natural logarithm so that densities far
below the floating-point range (``rho a^3 ~ 1e-12000``) can be examined.
Unspecified universal constants are set to 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ._util import max_workers


def _exp(x: float) -> float:
    if x > 709.0:
        return math.inf
    if x < -745.0:
        return 0.0
    return math.exp(x)


def _log_add(*xs: float) -> float:
    m = max(xs)
    return m + math.log(sum(math.exp(x - m) for x in xs))


class RegimeError(ValueError):
    pass


@dataclass(frozen=True)
class ParameterRegime:
    """Chosen parameters; fields prefixed ``log_`` are natural logarithms."""

    log_rho: float
    log_a: float
    log_R: float
    delta: float
    N: int
    M: int
    log_X: float
    log_d: float
    log_s: float
    log_ell: float
    log_eps_T: float
    log_eps3: float
    log_eps0: float
    log_MM: float
    eta: float = 1.0 / 40.0

    # convenience values (may under/overflow for extreme densities)
    def value(self, name: str) -> float:
        return _exp(getattr(self, "log_" + name))

    @property
    def rho(self) -> float:
        return self.value("rho")

    @property
    def a(self) -> float:
        return self.value("a")

    @property
    def R(self) -> float:
        return self.value("R")

    @property
    def X(self) -> float:
        return self.value("X")

    @property
    def d(self) -> float:
        return self.value("d")

    @property
    def s(self) -> float:
        return self.value("s")

    @property
    def ell(self) -> float:
        return self.value("ell")

    @property
    def eps_T(self) -> float:
        return self.value("eps_T")

    @property
    def eps0(self) -> float:
        return self.value("eps0")

    @property
    def eps3(self) -> float:
        return self.value("eps3")

    @property
    def MM(self) -> float:
        return self.value("MM")

    @property
    def log_rho_a3(self) -> float:
        return self.log_rho + 3.0 * self.log_a

    @property
    def log_rho_a(self) -> float:
        return self.log_rho + self.log_a

    @property
    def log_S(self) -> float:
        """``S = rho a l^2 (sqrt(rho a) d s l)^-3``."""
        return self.log_rho_a + 2.0 * self.log_ell - 3.0 * (0.5 * self.log_rho_a + self.log_d + self.log_s + self.log_ell)

    @property
    def log_volume(self) -> float:
        return 3.0 * self.log_ell

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["log_S"] = self.log_S
        return out


def select_parameters_log(log_rho_a3: float, log_R_over_a: float, N: int = 100, delta: float = 0.1,
                          log_a: float = 0.0, M: int = 20, eta: float = 1.0 / 40.0) -> ParameterRegime:
    """:func:`select_parameters` with ``rho a^3`` and ``R/a`` given as logarithms."""
    if not log_rho_a3 < 0:
        raise RegimeError("need rho a^3 < 1")
    if N < 1:
        raise RegimeError("N must be positive")
    if not 0 < delta < 1:
        raise RegimeError("delta must lie in (0, 1)")
    log_R = log_a + log_R_over_a
    log_rho = log_rho_a3 - 3.0 * log_a
    log_X = max(-0.3 * log_rho_a3 - log_R_over_a, log_R_over_a + 0.5 * log_rho_a3)
    if log_X >= 0:
        raise RegimeError(f"X = exp({log_X:.3g}) >= 1: outside the asymptotic regime")
    log_rho_a = log_rho + log_a
    log_d = 4.0 * log_X / N
    log_s = 1.5 * log_X / N
    log_ell = -0.5 * log_rho_a - 2.0 * log_X / N
    log_eps_T = 4.0 * log_X / N - math.log(delta)
    log_eps3 = -15.5 * log_X / N
    log_MM = log_R_over_a / 3.0
    # eps0 at its lower limit eps3 (a/R) MM, with unit constant
    log_eps0 = log_eps3 - log_R_over_a + log_MM
    return ParameterRegime(log_rho, log_a, log_R, delta, N, M, log_X, log_d, log_s, log_ell, log_eps_T,
                           log_eps3, log_eps0, log_MM, eta)


def select_parameters(rho: float, a: float, R: float, N: int = 100, delta: float = 0.1, M: int = 20) -> ParameterRegime:
    """Parameters as functions of ``X = max{(rho a^3)^(-3/10) a/R, R sqrt(rho a)}``.

    ``d = X^(4/N)``, ``s = X^(3/(2N))``, ``l = (rho a)^(-1/2) X^(-2/N)``,
    ``delta eps_T = X^(4/N)``, ``eps_3 = X^(-31/(2N))``, ``MM = (R/a)^(1/3)`` and
    ``eps_0 = eps_3 (a/R) MM``.
    """
    if not (rho > 0 and a > 0 and R > 0):
        raise RegimeError("rho, a and R must be positive")
    return select_parameters_log(math.log(rho * a**3), math.log(R / a), N, delta, math.log(a), M)


# ------------------------------------------------------------- conditions


@dataclass(frozen=True)
class Margin:
    name: str
    log_margin: float
    strict: bool = True

    @property
    def margin(self) -> float:
        return _exp(self.log_margin)

    @property
    def satisfied(self) -> bool:
        return self.log_margin > 0 if self.strict else self.log_margin >= -1e-12


def _m(name, log_lhs, log_rhs, strict=True):
    return Margin(name, log_rhs - log_lhs, strict)


def check_conditions(reg: ParameterRegime, delta_eta: float = 1.0) -> dict[str, Margin]:
    """Margins ``RHS/LHS`` (``LHS/RHS`` for lower bounds); above 1 means satisfied.

    Conditions that hold with equality by construction report a margin of
    exactly 1 and are non-strict.
    """
    ld = math.log(reg.delta)
    a, R, rho = reg.log_a, reg.log_R, reg.log_rho
    ra, ra3 = reg.log_rho_a, reg.log_rho_a3
    d, s, ell = reg.log_d, reg.log_s, reg.log_ell
    dsl = d + s + ell
    S = reg.log_S
    B = reg.log_volume
    out = [
        _m("C1.a_over_R", a - R, ld),
        _m("C1.rho_a3", ra3, ld),
        _m("C1.interparticle_over_dsl", -rho / 3.0 - dsl, ld),
        _m("C1.s", s, ld),
        _m("C1.dl_sqrt_rho_a", d + ell + 0.5 * ra, ld),
        _m("C1.R_over_dsl", R - dsl, ld),
        _m("C1.healing_over_sl", -0.5 * ra - s - ell, ld),
        _m("C1.d_lt_s_delta2", d, s + 2.0 * ld),
        _m("C2.eps_T", reg.log_eps_T, ld),
        _m("C2.M_decay", _log_add(-2.0 * s, -3.0 * d) - 2.0 * (d + s) + reg.M * s, ld, strict=False),
        # (sqrt(rho a) d l)^2 <= delta eps_T holds with equality by construction
        Margin("C3.eps_T_lower", 0.0, strict=False),
    ]
    log_ln = math.log(dsl - R) if dsl > R else -math.inf
    lhs_log = reg.log_eps_T + log_ln
    out.append(_m("C3.log", lhs_log, ld + dsl + 0.5 * ra))
    out.append(_m("C3.log_delta_eta", lhs_log, math.log(delta_eta) + dsl + 0.5 * ra))
    out.append(_m("C3.eps0", reg.log_eps0 + a - R, ld + 0.5 * ra3))
    out.append(_m("C5.S", 0.5 * ra3 + S, ld + a - R))
    MM = reg.log_MM
    out.append(_m("C6.i", a - R - 2.0 * MM, 0.5 * ra3 - 3.0 * (0.5 * ra + dsl)))
    out.append(_m("C6.ii", a - R - 2.0 * MM, ld + 0.5 * ra3))
    out.append(_m("C6.iii_lower", rho + B + 0.5 * ra3 + S, MM, strict=False))
    out.append(_m("C6.iii_upper", MM, ld + rho + B))
    out.append(Margin("C7.eps0", 0.0, strict=False))
    out.append(Margin("M_ge_8", math.log(reg.M / 8.0), strict=False))
    out.append(Margin("M_ge_13", math.log(reg.M / 13.0), strict=False))
    return {m.name: m for m in out}


def assumption_values(reg: ParameterRegime) -> dict[str, float]:
    """Logs of the two quantities in the admissible-range assumption.

    ``(R/a) sqrt(rho a^3)`` must tend to 0 and ``R rho^(1/3) (rho a^3)^(-eta)``
    to infinity.
    """
    return {
        "log_R_over_a_sqrt_rho_a3": reg.log_R - reg.log_a + 0.5 * reg.log_rho_a3,
        "log_eta_window": reg.log_R + reg.log_rho / 3.0 - reg.eta * reg.log_rho_a3,
    }


# ----------------------------------------------------------------- ledger


@dataclass
class ErrorLedger:
    """Ledger entries as logarithms.

    ``lhy`` entries are energies divided by ``rho^2 a sqrt(rho a^3) |B|``;
    ``relative`` entries are divided by the quantity they bound.
    """

    log_S: float
    quad_terms: dict[str, float]
    log_E_quad: float
    log_K_B: float
    log_L: float
    lhy: dict[str, float] = field(default_factory=dict)
    relative: dict[str, float] = field(default_factory=dict)
    margins: dict[str, Margin] = field(default_factory=dict)

    def values(self) -> dict[str, float]:
        """All entries exponentiated."""
        out = {"S": _exp(self.log_S), "E_quad": _exp(self.log_E_quad), "K_B": _exp(self.log_K_B),
               "L": _exp(self.log_L)}
        out.update({"quad." + k: _exp(v) for k, v in self.quad_terms.items()})
        out.update({"lhy." + k: _exp(v) for k, v in self.lhy.items()})
        out.update({"rel." + k: _exp(v) for k, v in self.relative.items()})
        return out


def error_ledger(reg: ParameterRegime) -> ErrorLedger:
    """Scalar remainder terms of the lower bound for the given regime."""
    a, R, rho = reg.log_a, reg.log_R, reg.log_rho
    ra, ra3 = reg.log_rho_a, reg.log_rho_a3
    d, s, ell = reg.log_d, reg.log_s, reg.log_ell
    sl = s + ell
    dsl = d + sl
    B = reg.log_volume

    def log_of_log(x):
        return math.log(x) if x > 0 else -math.inf

    quad = {
        "kinetic_cutoff": -3.0 * (0.5 * ra + sl),
        "range": 0.5 * ra3 + R - a,
        "eps0": reg.log_eps0 - 0.5 * ra3 + a - R,
        "log_big": -(0.5 * ra + sl) + log_of_log(sl - R),
        "log_small": reg.log_eps_T - (0.5 * ra + dsl) + log_of_log(dsl - R),
    }
    E_quad = _log_add(*[v for v in quad.values() if v > -math.inf])
    small_cube = 3.0 * (d + ell)
    K_B = small_cube + max(-3.0 * R, rho)
    L = B + max(rho, -3.0 * R) + a - 3.0 * R + 2 * reg.M * (-rho / 3.0 - ell)
    lhy_scale = 2.0 * rho + a + 0.5 * ra3 + B
    S = reg.log_S
    lhy = {
        "E_quad": E_quad,
        "L": L - lhy_scale,
        "window": a - R - 2.0 * reg.log_MM - 0.5 * ra3,
        "sigma_remainder": S + 2 * reg.M * (R - ell),
    }
    relative = {
        "n_plus": 0.5 * ra3 + S,
        "n_dev": 0.25 * ra3 + 0.5 * S,
        "K_B": K_B - (rho + small_cube),
    }
    return ErrorLedger(S, quad, E_quad, K_B, L, lhy, relative, check_conditions(reg))


def scale_chain(reg: ParameterRegime) -> dict[str, float]:
    """Log ratios of successive scales ``a << R``, ``rho^-1/3 << dsl << dl << (rho a)^-1/2 << sl << l``."""
    chain = [
        ("a", reg.log_a),
        ("R", reg.log_R),
        ("interparticle", -reg.log_rho / 3.0),
        ("dsl", reg.log_d + reg.log_s + reg.log_ell),
        ("dl", reg.log_d + reg.log_ell),
        ("healing", -0.5 * reg.log_rho_a),
        ("sl", reg.log_s + reg.log_ell),
        ("l", reg.log_ell),
    ]
    out = {"R/a": chain[1][1] - chain[0][1]}
    for (n1, v1), (n2, v2) in zip(chain[2:-1], chain[3:]):
        out[f"{n2}/{n1}"] = v2 - v1
    return out


# ------------------------------------------------------------------ sweep


@dataclass
class SweepRow:
    log10_rho_a3: float
    regime: ParameterRegime
    ledger: ErrorLedger
    chain: dict[str, float]
    assumptions: dict[str, float]


@dataclass
class Sweep:
    rows: list[SweepRow]
    shrink: dict[str, float]
    chain_ok: bool
    eta_window_grows: bool
    all_margins_ok: bool
    quad_below_S: bool


def asymptotic_sweep(log10_rho_a3_list, beta: float = 0.4, N: int = 100, delta: float = 0.1, a: float = 1.0,
                     M: int = 20) -> Sweep:
    """Regimes along ``R/a = (rho a^3)^(-beta)`` for decreasing ``rho a^3``.

    ``shrink`` gives, per LHY-normalized entry, the ratio first row / last row.
    """
    xs = [float(x) for x in log10_rho_a3_list]
    if any(b >= c for c, b in zip(xs, xs[1:])):
        raise RegimeError("rho a^3 sequence must be strictly decreasing")
    if not 0.3 < beta < 0.5:
        raise RegimeError("beta must lie in (3/10, 1/2)")
    ln10 = math.log(10.0)

    def row(x):
        lr3 = x * ln10
        reg = select_parameters_log(lr3, -beta * lr3, N, delta, math.log(a), M)
        return SweepRow(x, reg, error_ledger(reg), scale_chain(reg), assumption_values(reg))

    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        rows = list(pool.map(row, xs))
    first, last = rows[0].ledger.lhy, rows[-1].ledger.lhy
    shrink = {k: _exp(first[k] - last[k]) for k in first}
    chain_ok = all(v > 0 for r in rows for v in r.chain.values())
    eta = [r.assumptions["log_eta_window"] for r in rows]
    grows = all(b > c for c, b in zip(eta, eta[1:]))
    margins_ok = all(m.satisfied for r in rows for m in r.ledger.margins.values())
    quad_ok = all(r.ledger.log_E_quad < r.ledger.log_S for r in rows)
    return Sweep(rows, shrink, chain_ok, grows, margins_ok, quad_ok)


def optimal_window(R_over_a: float) -> float:
    """Minimiser of ``(a/R) MM^-2 + (a/R)^2 MM`` by golden-section search (``= (2R/a)^(1/3)``)."""
    t = 1.0 / R_over_a

    def f(log_mm):
        mm = math.exp(log_mm)
        return t / mm**2 + t * t * mm

    guess = math.log(R_over_a) / 3.0
    res = optimize.minimize_scalar(f, bracket=(guess - 2.0, guess, guess + 2.0), method="golden",
                                   options={"xtol": 1e-10})
    return float(np.exp(res.x))
