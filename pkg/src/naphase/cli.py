"""Command-line front end.

Every command prints JSON lines (or CSV with ``--csv`` for the sweeps) and
exits with 0 on success, 1 when a verification finds a mismatch and 2 on
bad input.  Options come from ``--config FILE`` (JSON) and flags; flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .charfun import Region, StepFunction
from .cyclotomic import CycloNum
from .errors import NAPhaseError
from .grid import double_fourier_check, fourier
from .integrate import DEFAULT_BUDGET, gauss_brute, gauss_closed, oscillatory_brute
from .localfield import LAURENT, PADIC, FieldConfig, LocalNum, is_prime
from .morse import find_critical_points, morse_normal_form, verify_morse
from .motivic import check_uniform
from .polynomial import parse_phase
from .series import MultiSeries, rational_reconstruct
from .stationary import stationary_phase, verify_certificate

COMMANDS = ("critical", "morse", "gauss", "fourier", "integrate", "phase-verify", "uniform")
DEFAULTS = {
    "field": PADIC,
    "p": 5,
    "n": None,
    "precision": 24,
    "degree": 12,
    "f": "x1^2",
    "phi_file": None,
    "omega_file": None,
    "lambda_ord": None,
    "budget": DEFAULT_BUDGET,
    "csv": False,
}


class UsageError(Exception):
    pass


@dataclass
class JobConfig:
    command: str
    field: str
    p: int
    n: int | None
    precision: int
    degree: int
    f: str
    phi: dict | None
    omega: dict | None
    lambda_ord: tuple | None
    budget: int
    csv: bool
    options: dict = field(default_factory=dict)

    def validate(self):
        if self.field not in (PADIC, LAURENT):
            raise UsageError(f"--field must be padic or laurent, not {self.field!r}")
        if not is_prime(self.p) or self.p == 2:
            raise UsageError(f"--p must be an odd prime, not {self.p}")
        if self.precision < 2:
            raise UsageError("--precision must be at least 2")
        if self.degree < 2:
            raise UsageError("--degree must be at least 2")
        if self.budget <= 0:
            raise UsageError("--budget must be positive")
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be positive")
        return self

    @property
    def cfg(self) -> FieldConfig:
        return FieldConfig(self.field, self.p, self.precision)


def parse_ord_range(text):
    """``"a..b"`` (inclusive) or a single integer."""
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        lo, hi = (int(x) for x in text)
    else:
        s = str(text).strip()
        try:
            if ".." in s:
                a, b = s.split("..", 1)
                lo, hi = int(a), int(b)
            else:
                lo = hi = int(s)
        except ValueError as exc:
            raise UsageError(f"bad λ-order range {text!r}; expected a..b") from exc
    if lo > hi:
        lo, hi = hi, lo
    return lo, hi


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON job file; flags override its entries")
    common.add_argument("--field", choices=(PADIC, LAURENT), default=None)
    common.add_argument("--p", type=int, default=None)
    common.add_argument("--n", type=int, default=None)
    common.add_argument("--precision", type=int, default=None)
    common.add_argument("--degree", type=int, default=None, help="series degree cutoff")
    common.add_argument("--f", default=None, help="phase, e.g. 'x1^2 + x1*x2 + x2^2'")
    common.add_argument("--phi-file", default=None)
    common.add_argument("--omega-file", default=None)
    common.add_argument("--lambda-ord", default=None, help="inclusive range a..b (write --lambda-ord=-4..-1)")
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--csv", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="naphase", description="Exact nonarchimedean stationary phase")
    parser.add_argument("--version", action="version", version=f"naphase {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("critical", parents=[common], help="critical points in the region")
    m = sub.add_parser("morse", parents=[common], help="diagonal normal form at each critical point")
    m.add_argument("--alpha", type=int, default=None)
    m.add_argument("--samples", type=int, default=None)
    g = sub.add_parser("gauss", parents=[common], help="closed form against enumeration")
    g.add_argument("--ord-c", type=int, default=None)
    g.add_argument("--alpha", type=int, default=None)
    g.add_argument("--unit", type=int, default=None, help="angular class (default: all)")
    sub.add_parser("fourier", parents=[common], help="Fourier transform of the amplitude")
    sub.add_parser("integrate", parents=[common], help="exact oscillatory integral")
    sub.add_parser("phase-verify", parents=[common], help="certificate and exact sweep")
    u = sub.add_parser("uniform", parents=[common], help="uniform formula across primes")
    u.add_argument("--primes", default=None, help="comma separated, default 3,5,7,11,13")
    u.add_argument("--kinds", default=None, help="comma separated field kinds")
    return parser


def make_job(ns: argparse.Namespace) -> JobConfig:
    conf = dict(_load_json(ns.config)) if ns.config else {}
    conf = {k.replace("-", "_"): v for k, v in conf.items()}

    def pick(key):
        v = getattr(ns, key, None)
        if v is not None:
            return v
        if key in conf:
            return conf[key]
        return DEFAULTS.get(key)

    phi_file, omega_file = pick("phi_file"), pick("omega_file")
    phi = _load_json(phi_file) if phi_file else conf.get("phi")
    omega = _load_json(omega_file) if omega_file else conf.get("omega")
    options = {}
    for key in ("alpha", "samples", "ord_c", "unit", "primes", "kinds"):
        v = pick(key)
        if v is not None:
            options[key] = v
    try:
        job = JobConfig(
            command=ns.command,
            field=str(pick("field")),
            p=int(pick("p")),
            n=None if pick("n") is None else int(pick("n")),
            precision=int(pick("precision")),
            degree=int(pick("degree")),
            f=str(pick("f")),
            phi=phi,
            omega=omega,
            lambda_ord=parse_ord_range(pick("lambda_ord")),
            budget=int(pick("budget")),
            csv=bool(pick("csv")),
            options=options,
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return job.validate()


# ---------------------------------------------------------------------------
# output helpers


def num_text(x: LocalNum) -> str:
    """Short exact text: a rational when one is recognisable, else digit form."""
    cfg = x.cfg
    if x.is_zero:
        return "0" if x.abs_prec >= cfg.precision else x.to_text()
    if cfg.kind == PADIC and x.prec >= 4:
        frac = rational_reconstruct(x.unit, cfg.p ** x.prec)
        if frac is not None and max(abs(frac.numerator), frac.denominator) < 10 ** 6:
            return str(frac * Fraction(cfg.p) ** x.valuation)
    if cfg.kind == LAURENT and x.unit < cfg.p and x.valuation == 0:
        return str(x.unit)
    return x.to_text()


def cyclo(v: CycloNum) -> dict:
    return v.to_json()


class Emitter:
    def __init__(self, out, as_csv: bool):
        self.out = out
        self.as_csv = as_csv
        self.rows = []

    def record(self, rec: dict):
        if self.as_csv:
            self.rows.append(_flatten(rec))
        else:
            self.out.write(json.dumps(rec, sort_keys=True, ensure_ascii=True) + "\n")

    def close(self):
        if not self.as_csv or not self.rows:
            return
        cols = sorted({k for r in self.rows for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r)
        self.out.write(buf.getvalue())


def _flatten(rec, prefix=""):
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


# ---------------------------------------------------------------------------
# commands


def _phase(job: JobConfig):
    poly = parse_phase(job.f, job.n)
    n = job.n or poly.n
    cfg = job.cfg
    if poly.degree() > job.degree:
        raise UsageError(f"phase degree {poly.degree()} exceeds --degree {job.degree}")
    return poly, n, MultiSeries.from_poly(cfg, poly, n=n, D=job.degree)


def _phi(job: JobConfig, n: int) -> StepFunction:
    cfg = job.cfg
    if job.phi is None:
        return Region.full(cfg, n).indicator()
    phi = StepFunction.from_json(cfg, job.phi)
    if phi.n != n:
        raise UsageError(f"amplitude has {phi.n} variables, phase has {n}")
    return phi


def _omega(job: JobConfig, n: int) -> Region:
    cfg = job.cfg
    if job.omega is None:
        return Region.full(cfg, n)
    omega = Region.from_json(cfg, job.omega)
    if omega.n != n:
        raise UsageError(f"region has {omega.n} variables, phase has {n}")
    return omega


def _units(job: JobConfig):
    return range(1, job.p)


def cmd_critical(job, emit):
    _, n, f = _phase(job)
    pts = find_critical_points(f, _omega(job, n))
    for pt in pts:
        val, _ = f.eval(pt)
        emit.record({"point": [num_text(x) for x in pt], "value": num_text(val)})
    emit.record({"count": len(pts)})
    return 0


def cmd_morse(job, emit):
    _, n, f = _phase(job)
    alpha = int(job.options.get("alpha", 1))
    samples = int(job.options.get("samples", 100))
    status = 0
    for pt in find_critical_points(f, _omega(job, n)):
        md = morse_normal_form(f, pt, alpha, job.degree)
        rep = verify_morse(md, f, samples)
        rec = md.to_json()
        rec["center"] = [num_text(x) for x in md.center]
        rec["units"] = [num_text(a) for a in md.units]
        rec["value"] = num_text(md.value)
        rec["verify"] = rep.to_json()
        emit.record(rec)
        if not rep.ok:
            status = 1
    return status


def cmd_gauss(job, emit):
    cfg = job.cfg
    if "ord_c" not in job.options:
        raise UsageError("gauss needs --ord-c")
    o = int(job.options["ord_c"])
    alpha = int(job.options.get("alpha", 0))
    if alpha < 0:
        raise UsageError("--alpha must be >= 0")
    units = [int(job.options["unit"])] if "unit" in job.options else list(_units(job))
    status = 0
    for u in units:
        if u % job.p == 0:
            raise UsageError("--unit must not be divisible by p")
        c = cfg.from_int(u).shift(o)
        closed = gauss_closed(c, alpha)
        brute = gauss_brute(c, alpha, budget=job.budget)
        eq = closed == brute
        status |= 0 if eq else 1
        emit.record({"ord_c": o, "alpha": alpha, "unit": u, "closed": cyclo(closed),
                     "brute": cyclo(brute), "equal": eq})
    return status


def cmd_fourier(job, emit):
    n = job.n or (job.phi or {}).get("n") or 1
    phi = _phi(job, int(n))
    hat = fourier(phi)
    check = double_fourier_check(phi)
    emit.record({"transform": _step_json(hat)})
    kappa = check["kappa"]
    emit.record({"kappa": None if kappa is None else cyclo(kappa),
                 "expected": str(check["expected"]),
                 "inversion": kappa is None or kappa == CycloNum.rational(job.p, check["expected"])})
    return 0 if kappa is None or kappa == CycloNum.rational(job.p, check["expected"]) else 1


def _step_json(phi: StepFunction) -> dict:
    return {"n": phi.n, "cells": [{"center": [num_text(x) for x in c], "depth": d, "value": cyclo(v)}
                                  for c, d, v in phi.cells]}


def cmd_integrate(job, emit):
    _, n, f = _phase(job)
    phi, omega = _phi(job, n), _omega(job, n)
    lo, hi = job.lambda_ord or (-2, 0)
    cfg = job.cfg
    for ell in range(hi, lo - 1, -1):
        for u in _units(job):
            lam = cfg.from_int(u).shift(ell)
            v = oscillatory_brute(f, phi, lam, omega, budget=job.budget)
            emit.record({"ord": ell, "unit": u, "value": cyclo(v)})
    return 0


def cmd_phase_verify(job, emit):
    _, n, f = _phase(job)
    phi, omega = _phi(job, n), _omega(job, n)
    cert = stationary_phase(f, phi, omega)
    lo, hi = job.lambda_ord or (cert.N - 3, cert.N)
    summary = {"N": cert.N, "N1": cert.N1, "N2": cert.N2, "alpha": cert.alpha, "beta": cert.betas,
               "gamma": cert.gamma, "points": [[num_text(x) for x in pt] for pt, _ in cert.critical_points],
               "units": [[num_text(a) for a in md.units] for _, md in cert.critical_points],
               "checks": cert.checks}
    emit.record({"certificate": summary})
    rep = verify_certificate(cert, f, phi, omega, range(hi, lo - 1, -1), budget=job.budget)
    for r in rep.records:
        emit.record(r)
    emit.record({"ok": rep.ok, "count": len(rep.records)})
    return 0 if rep.ok else 1


def cmd_uniform(job, emit):
    poly, n, _ = _phase(job)
    primes = job.options.get("primes", "3,5,7,11,13")
    kinds = job.options.get("kinds", "padic,laurent")
    try:
        primes = [int(x) for x in str(primes).split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --primes {primes!r}") from exc
    kinds = [k.strip() for k in str(kinds).split(",") if k.strip()]
    for p in primes:
        if not is_prime(p) or p == 2:
            raise UsageError(f"{p} is not an odd prime")
    for k in kinds:
        if k not in (PADIC, LAURENT):
            raise UsageError(f"unknown field kind {k!r}")
    phi_spec = None
    if job.phi is not None:
        phi_spec = [(cell["center"], cell["depth"], cell.get("value", 1)) for cell in job.phi["cells"]]
    rep = check_uniform(poly, phi_spec, primes, kinds=kinds, precision=job.precision, budget=job.budget)
    emit.record({"formula": rep.formula.to_json()})
    for e in rep.entries:
        emit.record(e)
    emit.record({"ok": rep.ok})
    return 0 if rep.ok else 1


HANDLERS = {
    "critical": cmd_critical,
    "morse": cmd_morse,
    "gauss": cmd_gauss,
    "fourier": cmd_fourier,
    "integrate": cmd_integrate,
    "phase-verify": cmd_phase_verify,
    "uniform": cmd_uniform,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        job = make_job(ns)
        emit = Emitter(out, job.csv)
        code = HANDLERS[job.command](job, emit)
        emit.close()
        return code
    except (UsageError, NAPhaseError, ValueError) as exc:
        out.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
