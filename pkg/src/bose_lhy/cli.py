"""Command-line front end: ``bose-lhy <subcommand> [flags]``.

Exit codes: 0 success, 2 when a checked inequality fails (the offending
check is named on stderr), 1 on usage errors.  JSON output carries
``schema_version`` and wraps every number as ``{"value": x, "tol": t}``.

CSV columns
  scattering        family,amplitude,range,a,a1,a2_born,a2_fourier
                    (with --R-list: R,a_ode,born_sum,a1_plus_a2,gap_two_term,gap_series,diverged)
  lhy               rho_a3,e_over_4pi_rho2a,lhy_term
  regime            log10_rho_a3,X,d,s,ell,eps_T,S,E_quad,all_margins_ok,min_margin_name,log10_min_margin
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any

import numpy as np

from . import bogolubov, fock, localization, potentials, regime, scattering

SCHEMA_VERSION = 1
SUBCOMMANDS = ("scattering", "lhy", "localize-check", "bogolubov-verify", "matrix-localize", "regime")

# suite thresholds (engineering choices, not from the analysis)
PARTITION_TOL = 1e-7
MULTIPLIER_TOL = 1e-7
BIG_BOX_TOL = 1e-8
BOGOLUBOV_TOL = 1e-9
LHY_TOL = 1e-6
MATRIX_C_THRESHOLD = 1.0


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Num:
    value: float
    tol: float = 0.0


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tol: float


@dataclass
class Outcome:
    result: dict
    checks: list[Check] = field(default_factory=list)
    csv_rows: list[dict] | None = None


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    options: dict
    seed: int | None
    out_format: str
    output: str | None


def _number(x) -> Any:
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def _jsonable(obj):
    if isinstance(obj, Num):
        return {"value": _number(obj.value), "tol": float(obj.tol)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, float, np.integer, np.floating)):
        return {"value": _number(obj), "tol": 0.0}
    if isinstance(obj, complex):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, Check):
        return {"name": obj.name, "passed": bool(obj.passed), "value": _jsonable(Num(obj.value, obj.tol)),
                "tol": float(obj.tol)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    return obj


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"malformed number list {text!r}") from exc


def _log10_list(text) -> list[float]:
    # Decimal keeps densities like 1e-12000 that underflow a float
    items = text if isinstance(text, (list, tuple)) else [x for x in str(text).split(",") if x.strip()]
    out = []
    for x in items:
        try:
            d = Decimal(str(x).strip())
        except InvalidOperation as exc:
            raise UsageError(f"malformed number {x!r}") from exc
        if not d > 0:
            raise UsageError("rho a^3 values must be positive")
        out.append(float(d.log10()))
    return out


# ---------------------------------------------------------------- commands


def _cmd_scattering(o: dict) -> Outcome:
    v = potentials.parse_potential(o["potential"])
    tol = float(o["tol"])
    K = int(o["born_K"])
    if o["R_list"]:
        study = scattering.born_convergence_study(v, _floats(o["R_list"]), K=K, tol=tol)
        rows = [{"R": r.R, "a_ode": r.a_ode, "born_sum": r.born_sum, "a1_plus_a2": r.a1_plus_a2,
                 "gap_two_term": r.gap_two_term, "gap_series": r.gap_series, "diverged": r.diverged}
                for r in study.rows]
        result = {
            "potential": v.to_dict(),
            "rows": [{k: (Num(x, tol) if isinstance(x, float) else x) for k, x in row.items()} for row in rows],
            "exponent": None if study.exponent is None else Num(study.exponent, 0.3),
            "prefactor": None if study.prefactor is None else Num(study.prefactor, math.inf),
        }
        return Outcome(result, [], rows)
    ode = scattering.scattering_length_ode(v, tol=tol)
    born = scattering.born_terms(v, max(K, 2))
    a2f = scattering.a2_fourier(v)
    a1, a2 = born.born_terms[0], born.born_terms[1]
    checks = [
        Check("ode_residual", ode.ode_residual < tol, ode.ode_residual, tol),
        Check("a2_born_vs_fourier", abs(a2 - a2f) <= 1e-6 * max(1.0, abs(a2)), abs(a2 - a2f), 1e-6),
    ]
    result = {
        "potential": v.to_dict(),
        "a": Num(ode.a, tol),
        "a1": Num(a1, 1e-10),
        "a2_born": Num(a2, 1e-8),
        "a2_fourier": Num(a2f, 1e-8),
        "born_sum": None if born.born_sum is None else Num(born.born_sum, 1e-8),
        "born_terms": [Num(t, 1e-8) for t in born.born_terms],
        "born_diverged": born.diverged,
        "ode_residual": Num(ode.ode_residual, tol),
    }
    if v.family == "uniform-ball":
        result["a_closed_form"] = Num(scattering.uniform_ball_scattering_length(v.amplitude, v.range), 1e-15)
    row = {"family": v.family, "amplitude": v.amplitude, "range": v.range, "a": ode.a, "a1": a1,
           "a2_born": a2, "a2_fourier": a2f}
    return Outcome(result, checks, [row])


def _cmd_lhy(o: dict) -> Outcome:
    I = bogolubov.lhy_dimensionless_integral()
    lhs, rhs = bogolubov.lhy_consistency(I)
    a = float(o["a"])
    rows = []
    for lr in _log10_list(o["rho_a3_list"]):
        term = bogolubov.LHY_COEFFICIENT * 10.0 ** (0.5 * lr)
        rows.append({"rho_a3": 10.0**lr, "log10_rho_a3": lr, "e_over_4pi_rho2a": 1.0 + term, "lhy_term": term})
    checks = [
        Check("lhy_integral", abs(I - bogolubov.LHY_INTEGRAL) <= LHY_TOL, abs(I - bogolubov.LHY_INTEGRAL), LHY_TOL),
        Check("coefficient_identity", abs(lhs / rhs - 1.0) <= 1e-9, abs(lhs / rhs - 1.0), 1e-9),
    ]
    result = {
        "I": Num(I, LHY_TOL),
        "I_exact": Num(bogolubov.LHY_INTEGRAL, 1e-15),
        "coefficient": Num(bogolubov.LHY_COEFFICIENT, 1e-15),
        "consistency": {"lhs": Num(lhs, 1e-9 * rhs), "rhs": Num(rhs, 1e-15)},
        "a": a,
        "table": [{k: Num(x, 1e-12 * abs(x)) for k, x in r.items()} for r in rows],
    }
    csv_rows = [{k: r[k] for k in ("rho_a3", "e_over_4pi_rho2a", "lhy_term")} for r in rows]
    return Outcome(result, checks, csv_rows)


def _cmd_localize(o: dict) -> Outcome:
    M, s, grid = int(o["M"]), float(o["s"]), int(o["grid"])
    if M < 0 or not 0 < s < 1 or grid < 2:
        raise UsageError("need M >= 0, 0 < s < 1 and grid >= 2")
    profile = localization.chi_profile(M)
    v = potentials.parse_potential(o["potential"])
    ell = float(o["ell"])
    g = np.random.Generator(np.random.Philox(int(o["seed"])))
    worst_unit = worst_conv = worst_marg = 0.0
    for _ in range(int(o["points"])):
        x = g.uniform(-0.5, 0.5, 3) * ell
        y = x + g.uniform(-0.5, 0.5, 3) * ell
        r = localization.partition_identity_residual(profile, x, ell=ell, y=y, d=float(o["d"]))
        worst_unit = max(worst_unit, r.unit)
        worst_conv = max(worst_conv, r.convolution)
        worst_marg = max(worst_marg, r.marginal or 0.0)
    checks = [
        Check("partition_unit", worst_unit < PARTITION_TOL, worst_unit, PARTITION_TOL),
        Check("partition_convolution", worst_conv < PARTITION_TOL, worst_conv, PARTITION_TOL),
        Check("small_box_marginal", worst_marg < PARTITION_TOL, worst_marg, PARTITION_TOL),
    ]
    if o["geometry"] == "big":
        geo = localization.BoxGeometry.big(ell)
    else:
        geo = localization.BoxGeometry.small(ell, float(o["d"]))
    se = localization.self_energy(geo, v, profile)
    a1 = v.integral() / (8.0 * math.pi)
    energy = {"U_B": Num(se.U_B, 1e-8 * se.U_B), "volume": geo.volume,
              "bounds": {k: x for k, x in se.bounds.items()}, "sandwich_constant": se.sandwich_constant}
    if geo.kind == "big":
        target = 4.0 * math.pi * a1 / ell**3
        rel = abs(se.U_B / target - 1.0)
        energy["U_B_big_box_target"] = Num(target, 1e-15 * target)
        checks.append(Check("big_box_self_energy", rel <= BIG_BOX_TOL, rel, BIG_BOX_TOL))
    mg = localization.kinetic_multiplier_grid(profile, localization.shifted_square(s), n_p=grid)
    checks.append(Check("F_at_zero", mg.F0_residual < MULTIPLIER_TOL, mg.F0_residual, MULTIPLIER_TOL))
    checks.append(Check("F_nonnegative", mg.min_F >= -MULTIPLIER_TOL, mg.min_F, MULTIPLIER_TOL))
    fs = localization.F_s_bound_check(profile, s)
    result = {
        "M": M,
        "s": s,
        "geometry": geo.kind,
        "potential": v.to_dict(),
        "C_M": profile.C_M,
        "partition": {"unit": Num(worst_unit, PARTITION_TOL), "convolution": Num(worst_conv, PARTITION_TOL),
                      "marginal": Num(worst_marg, PARTITION_TOL)},
        "self_energy": energy,
        "multiplier": {"grid": grid, "F0_residual": Num(mg.F0_residual, MULTIPLIER_TOL),
                       "min_F": Num(mg.min_F, MULTIPLIER_TOL), "tail_mass": mg.tail_mass},
        "F_s": {"measured_C": fs.measured_C, "max_ratio_outer": fs.max_ratio_outer,
                "violations": len(fs.violations), "F_at_zero": Num(fs.F_at_zero, MULTIPLIER_TOL)},
    }
    return Outcome(result, checks)


def _cmd_bogolubov(o: dict) -> Outcome:
    trials = fock.random_bogolubov_trials(int(o["trials"]), seed=int(o["seed"]), n_max=int(o["n"]),
                                          m=int(o["modes"]))
    worst = min((t.margin for t in trials), default=math.inf)
    checks = [Check("bogolubov_margin", worst >= -BOGOLUBOV_TOL, worst, BOGOLUBOV_TOL)] if trials else []
    result = {
        "trials": [{"n": t.n, "A": t.A, "B": t.B, "kappa": t.kappa, "margin": Num(t.margin, BOGOLUBOV_TOL)}
                   for t in trials],
        "min_margin": None if not trials else Num(worst, BOGOLUBOV_TOL),
    }
    return Outcome(result, checks)


def _cmd_matrix(o: dict) -> Outcome:
    ws = fock.matrix_localization_trials(int(o["trials"]), seed=int(o["seed"]), N=int(o["n"]), MM=int(o["MM"]))
    Cs = [w.measured_C for w in ws]
    worst = max(Cs, default=-math.inf)
    checks = []
    if ws:
        ok = all(math.isfinite(c) for c in Cs) and worst <= MATRIX_C_THRESHOLD
        checks.append(Check("matrix_localization_C", ok, worst, MATRIX_C_THRESHOLD))
    result = {
        "trials": [{"start": w.start, "energy": Num(w.energy, 1e-10), "excess": Num(w.excess, 1e-10),
                    "denominator": w.denominator, "measured_C": Num(w.measured_C, 1e-9)} for w in ws],
        "max_measured_C": None if not ws else Num(worst, 1e-9),
        "threshold": MATRIX_C_THRESHOLD,
    }
    return Outcome(result, checks)


def _cmd_regime(o: dict) -> Outcome:
    try:
        sw = regime.asymptotic_sweep(_log10_list(o["rho_a3_list"]), beta=float(o["beta"]), N=int(o["N"]),
                                     delta=float(o["delta"]), M=int(o["M"]))
    except regime.RegimeError as exc:
        raise UsageError(str(exc)) from exc
    ln10 = math.log(10.0)
    rows, csv_rows = [], []
    for r in sw.rows:
        reg, led = r.regime, r.ledger
        margins = {k: {"log10_margin": m.log_margin / ln10, "satisfied": m.satisfied, "strict": m.strict}
                   for k, m in led.margins.items()}
        worst = min(led.margins.values(), key=lambda m: m.log_margin)
        params = {k: getattr(reg, "log_" + k) / ln10 for k in ("X", "d", "s", "ell", "eps_T", "eps0", "eps3", "MM")}
        rows.append({
            "log10_rho_a3": r.log10_rho_a3,
            "log10_params": params,
            "margins": margins,
            "log10_ledger": {
                "S": led.log_S / ln10, "E_quad": led.log_E_quad / ln10, "K_B": led.log_K_B / ln10,
                "L": led.log_L / ln10,
                "quad": {k: x / ln10 for k, x in led.quad_terms.items()},
                "lhy": {k: x / ln10 for k, x in led.lhy.items()},
                "relative": {k: x / ln10 for k, x in led.relative.items()},
            },
            "log10_chain": {k: x / ln10 for k, x in r.chain.items()},
            "log10_assumptions": {k: x / ln10 for k, x in r.assumptions.items()},
        })
        csv_rows.append({"log10_rho_a3": r.log10_rho_a3, "X": reg.X, "d": reg.d, "s": reg.s, "ell": reg.ell,
                         "eps_T": reg.eps_T, "S": math.exp(led.log_S), "E_quad": math.exp(led.log_E_quad),
                         "all_margins_ok": all(m.satisfied for m in led.margins.values()),
                         "min_margin_name": worst.name, "log10_min_margin": worst.log_margin / ln10})
    shrink_ok = all(v >= 10.0 for v in sw.shrink.values())
    checks = [
        Check("condition_margins", sw.all_margins_ok, 0.0, 0.0),
        Check("E_quad_below_S", sw.quad_below_S, 0.0, 0.0),
        Check("scale_chain", sw.chain_ok, 0.0, 0.0),
        Check("eta_window_grows", sw.eta_window_grows, 0.0, 0.0),
        Check("lhy_entries_shrink_10x", shrink_ok, min(sw.shrink.values()), 10.0),
    ]
    result = {
        "beta": float(o["beta"]), "N": int(o["N"]), "delta": float(o["delta"]), "M": int(o["M"]),
        "constants_set_to_one": ["C", "C0", "C1", "b", "c", "delta_eta"],
        "rows": rows,
        "shrink": sw.shrink,
        "flags": {"all_margins_ok": sw.all_margins_ok, "E_quad_below_S": sw.quad_below_S,
                  "scale_chain": sw.chain_ok, "eta_window_grows": sw.eta_window_grows,
                  "lhy_entries_shrink_10x": shrink_ok},
    }
    return Outcome(result, checks, csv_rows)


COMMANDS = {
    "scattering": _cmd_scattering,
    "lhy": _cmd_lhy,
    "localize-check": _cmd_localize,
    "bogolubov-verify": _cmd_bogolubov,
    "matrix-localize": _cmd_matrix,
    "regime": _cmd_regime,
}


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with flag values (keys use underscores)")
    common.add_argument("--out", choices=("json", "csv"), default="json", help="output format")
    common.add_argument("--output", help="write to this path instead of stdout")
    common.add_argument("--no-fail", action="store_true", help="exit 0 even when a check fails")

    p = _Parser(prog="bose-lhy", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)

    s = sub.add_parser("scattering", parents=[common], help="scattering length by ODE and Born series")
    s.add_argument("--potential", default="tent:1,1", help="family:amplitude,range or a JSON file")
    s.add_argument("--R-list", dest="R_list", default=None, help="comma-separated ranges for a Born study")
    s.add_argument("--born-K", dest="born_K", type=int, default=8)
    s.add_argument("--tol", type=float, default=1e-10)

    s = sub.add_parser("lhy", parents=[common], help="LHY integral, coefficient and e(rho) table")
    s.add_argument("--rho-a3-list", dest="rho_a3_list", default="1e-6,1e-8,1e-10")
    s.add_argument("--a", type=float, default=1.0)

    s = sub.add_parser("localize-check", parents=[common], help="localization identities and multipliers")
    s.add_argument("--M", type=int, default=5)
    s.add_argument("--s", type=float, default=0.05)
    s.add_argument("--grid", type=int, default=64, help="points per axis of the multiplier grid")
    s.add_argument("--geometry", choices=("big", "small"), default="big")
    s.add_argument("--potential", default="tent:1,1")
    s.add_argument("--ell", type=float, default=10.0)
    s.add_argument("--d", type=float, default=0.5)
    s.add_argument("--points", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)

    for name, helptext, n_default, trials_default in (
        ("bogolubov-verify", "exact check of the Bogolubov operator inequality", 6, 200),
        ("matrix-localize", "window localization of random pentadiagonal matrices", 40, 500),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--n", type=int, default=n_default, help="max particle number / matrix size N")
        s.add_argument("--modes", type=int, default=3)
        s.add_argument("--trials", type=int, default=trials_default)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--MM", type=int, default=8)

    s = sub.add_parser("regime", parents=[common], help="parameter regime, conditions and error ledger")
    s.add_argument("--rho-a3-list", dest="rho_a3_list", default="1e-8,1e-10,1e-12,1e-14,1e-16")
    s.add_argument("--beta", type=float, default=0.4)
    s.add_argument("--N", type=int, default=100)
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--M", type=int, default=20)
    return p


def _load_config(argv: list[str]) -> dict:
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        cfg = json.loads(Path(known.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in cfg.items()}


def parse_config(argv: list[str]) -> RunConfig:
    cfg = _load_config(argv)
    parser = build_parser()
    if not any(a in SUBCOMMANDS for a in argv) and "subcommand" in cfg:
        argv = [cfg["subcommand"]] + list(argv)
    cfg.pop("subcommand", None)
    sub = next((a for a in argv if a in SUBCOMMANDS), None)
    if sub is None and ("-h" in argv or "--help" in argv):
        parser.parse_args(["--help"])
    if sub is None:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    if cfg:
        subparser = parser._subparsers._group_actions[0].choices[sub]
        known = {a.dest for a in subparser._actions}
        unknown = set(cfg) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        subparser.set_defaults(**cfg)
    ns = parser.parse_args(argv)
    opts = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "out", "output", "config")}
    return RunConfig(ns.subcommand, opts, opts.get("seed"), ns.out, ns.output)


def render(cfg: RunConfig, outcome: Outcome) -> str:
    if cfg.out_format == "csv":
        if outcome.csv_rows is None:
            raise UsageError(f"{cfg.subcommand} has no CSV form; use --out json")
        buf = io.StringIO()
        if outcome.csv_rows:
            w = csv.DictWriter(buf, fieldnames=list(outcome.csv_rows[0]), lineterminator="\n")
            w.writeheader()
            for row in outcome.csv_rows:
                w.writerow({k: (repr(float(x)) if isinstance(x, float) else x) for k, x in row.items()})
        return buf.getvalue()
    doc = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": cfg.subcommand,
        "config": {k: v for k, v in cfg.options.items() if k != "no_fail"},
        "checks": outcome.checks,
        "passed": all(c.passed for c in outcome.checks),
        "result": outcome.result,
    }
    body = _jsonable(doc)
    body["schema_version"] = SCHEMA_VERSION
    return json.dumps(body, sort_keys=True, indent=2, allow_nan=False) + "\n"


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        outcome = COMMANDS[cfg.subcommand](cfg.options)
        text = render(cfg, outcome)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    except scattering.ScatteringError as exc:
        print(f"check failed: scattering: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    failed = [c.name for c in outcome.checks if not c.passed]
    if failed:
        print("check failed: " + ", ".join(failed), file=sys.stderr)
        if not cfg.options.get("no_fail"):
            return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
