"""Acceptance suite: ten exact checks, one PASS/FAIL line each.

Run with pytest or directly (``python tests/test_acceptance.py``).
"""
from __future__ import annotations

import io
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fuzzing import fuzz_inputs  # noqa: E402
from naphase import cli  # noqa: E402
from naphase.charfun import Region, StepFunction, random_step_function  # noqa: E402
from naphase.cyclotomic import CycloNum  # noqa: E402
from naphase.errors import NAPhaseError  # noqa: E402
from naphase.grid import double_fourier_check, plancherel  # noqa: E402
from naphase.integrate import (  # noqa: E402
    gauss_brute,
    gauss_closed,
    gauss_lemma_hypotheses,
    gauss_shift_invariance,
    oscillatory_brute,
)
from naphase.localfield import LAURENT, PADIC, FieldConfig  # noqa: E402
from naphase.morse import morse_normal_form, verify_morse  # noqa: E402
from naphase.motivic import check_uniform, uniform_normal_form  # noqa: E402
from naphase.polynomial import parse_phase  # noqa: E402
from naphase.series import MultiSeries  # noqa: E402
from naphase.stationary import nonstationary_bound, stationary_phase, verify_certificate  # noqa: E402

KINDS = (PADIC, LAURENT)
PRIMES = (3, 5, 7)

# (source, critical points used for the normal form)
MORSE_PHASES = [
    ("x1^2", [(0,)]),
    ("x1^2 + x1^3", [(0,)]),
    ("x1^2 + x1*x2 + x2^2", [(0, 0)]),
    ("x1^3 - 3*x1", [(1,), (-1,)]),
    ("x1^2 + 3*x1^2*x2 + x2^2", [(0, 0)]),
    ("x1^2 + 3*x1^2*x2 - x2^2", [(0, 0)]),
    ("x1^2 + 3*x1^2*x2 + x2^2 + x2^3", [(0, 0)]),
]
PHASE_THEOREM = ["x1^2", "x1^2 + x1^3", "x1^3 - 3*x1", "x1^2 + x1*x2 + x2^2"]


def bad_primes(src):
    f = parse_phase(src)
    out = set()
    for pts in dict(MORSE_PHASES).get(src, [(0,) * f.n]):
        out |= uniform_normal_form(f, pts).bad_primes
    return out


def one_on_O(cfg, n):
    return Region.full(cfg, n).indicator()


def sweep(cert, f, phi, omega=None):
    rep = verify_certificate(cert, f, phi, omega, range(cert.N - 3, cert.N + 1))
    return rep.ok and all(r["guaranteed"] for r in rep.records), len(rep.records)


# ---------------------------------------------------------------------------


def criterion_1():
    worst, count, kappas = 0.0, 0, set()
    for kind in KINDS:
        for p in PRIMES:
            for n in (1, 2):
                cfg = FieldConfig(kind, p, 24)
                rng = random.Random(1000 * p + n)
                t = time.perf_counter()
                for _ in range(50):
                    phi = random_step_function(cfg, n, rng, max_depth=2)
                    rep = double_fourier_check(phi)
                    expected = CycloNum.rational(p, Fraction(1, p ** n))
                    if rep["kappa"] is not None and rep["kappa"] != expected:
                        return False, f"kappa {rep['kappa']} != q^-{n} at p={p}"
                    kappas.add((p, n, str(rep["expected"])))
                    count += 1
                worst = max(worst, time.perf_counter() - t)
    ok = worst < 10
    return ok, f"{count} functions, hat-hat phi = q^-n phi(-x) exactly, slowest config {worst:.2f}s"


def criterion_2():
    worst, count = 0.0, 0
    for kind in KINDS:
        for p in PRIMES:
            for n in (1, 2):
                cfg = FieldConfig(kind, p, 24)
                rng = random.Random(2000 * p + n)
                t = time.perf_counter()
                for _ in range(50):
                    f = random_step_function(cfg, n, rng, max_depth=2)
                    g = random_step_function(cfg, n, rng, max_depth=2)
                    lhs, rhs = plancherel(f, g)
                    if lhs != rhs:
                        return False, f"pairing differs at p={p}, n={n}"
                    count += 1
                worst = max(worst, time.perf_counter() - t)
    return worst < 10, f"{count} pairs, int f^ g = int f g^ exactly, slowest config {worst:.2f}s"


def criterion_3():
    t = time.perf_counter()
    closed = shifts = 0
    for kind in KINDS:
        for p in PRIMES:
            cfg = FieldConfig(kind, p, 24)
            units = [cfg.from_int(u) for u in range(1, p)]
            for o in range(-6, 3):
                for alpha in range(3):
                    for u in units:
                        a = u.shift(o)
                        if gauss_closed(a, alpha) != gauss_brute(a, alpha):
                            return False, f"closed form wrong at p={p} ord={o} alpha={alpha}"
                        closed += 1
                        for ob in range(-6, 3):
                            for v in units:
                                b = v.shift(ob)
                                if gauss_lemma_hypotheses(a, b, alpha):
                                    if not gauss_shift_invariance(a, b, alpha):
                                        return False, f"shift changes the integral at p={p}"
                                    shifts += 1
    elapsed = time.perf_counter() - t
    return elapsed < 60, f"{closed} closed forms and {shifts} shifted integrals exact in {elapsed:.1f}s"


def criterion_4():
    t = time.perf_counter()
    done, skipped = 0, []
    for src, points in MORSE_PHASES:
        f = parse_phase(src)
        bad = bad_primes(src)
        for kind in KINDS:
            for p in PRIMES:
                if p in bad:
                    skipped.append((src, p))
                    continue
                cfg = FieldConfig(kind, p, 24)
                fs = MultiSeries.from_poly(cfg, f, n=f.n, D=12)
                for x0 in points:
                    md = morse_normal_form(fs, [cfg.coerce(Fraction(x)) for x in x0])
                    if not md.certificates.get("residual") or not all(md.certificates.values()):
                        return False, f"residual certificate failed for {src} at p={p}"
                    rep = verify_morse(md, fs, sample_count=100, seed=p)
                    if not rep.ok or rep.samples < 100:
                        return False, f"pointwise identity failed for {src} at p={p}"
                    done += 1
    elapsed = time.perf_counter() - t
    skips = len({s for s, _ in skipped})
    return elapsed < 60, (f"{done} normal forms, residual zero to degree 12 / precision 24, 100 points each; "
                          f"bad primes skipped for {skips} phases; {elapsed:.1f}s")


def criterion_5():
    worst, checks = 0.0, 0
    for src in PHASE_THEOREM:
        f = parse_phase(src)
        bad = bad_primes(src)
        t = time.perf_counter()
        for kind in KINDS:
            for p in PRIMES:
                if p in bad:
                    continue
                cfg = FieldConfig(kind, p, 24)
                phi = one_on_O(cfg, f.n)
                cert = stationary_phase(f, phi)
                ok, k = sweep(cert, f, phi)
                if not ok:
                    return False, f"closed form differs from enumeration for {src} at p={p} ({kind})"
                checks += k
        worst = max(worst, time.perf_counter() - t)
    return worst < 180, f"{checks} values of lambda exact over ord N..N-3, slowest phase {worst:.1f}s"


def criterion_6():
    t = time.perf_counter()
    f = parse_phase("x1^3 - 3*x1")
    checks = 0
    for kind in KINDS:
        for p in (5, 7, 11):
            cfg = FieldConfig(kind, p, 24)
            phi = StepFunction(cfg, 1, [((1,), 1, 2), ((-1,), 1, CycloNum.from_terms(p, 1, [(1, 1)]))])
            cert = stationary_phase(f, phi)
            if len(cert.critical_points) != 2:
                return False, f"expected two critical points at p={p}"
            ok, k = sweep(cert, f, phi)
            if not ok:
                return False, f"two-term formula differs at p={p} ({kind})"
            checks += k
    elapsed = time.perf_counter() - t
    return elapsed < 120, f"{checks} values, two-term right side exact; {elapsed:.1f}s"


def criterion_7():
    t = time.perf_counter()
    checks = shells = tight = 0
    cases = [
        ("x1^2", 0),
        ("x1^2 + x1^3", 1),
        ("x1^3 - 3*x1", 1),
        ("x1^2 + x1*x2 + x2^2", 0),
    ]
    for kind in KINDS:
        for p in PRIMES:
            cfg = FieldConfig(kind, p, 24)
            for src, k in cases:
                if p in bad_primes(src):
                    continue
                f = parse_phase(src)
                # ϖ^k O^n minus ϖ^{k+1} O^n: no critical point lies on it
                full = Region.ball(cfg, [0] * f.n, k)
                shell = full.subtract(Region.ball(cfg, [0] * f.n, k + 1))
                phi = shell.indicator()
                N1 = nonstationary_bound(f, phi, Region.full(cfg, f.n))
                for ell in (N1, N1 - 1, N1 - 2):
                    for u in range(1, p):
                        v = oscillatory_brute(f, phi, cfg.from_int(u).shift(ell))
                        if not v.is_zero():
                            return False, f"shell integral nonzero for {src} at p={p}, ord {ell}"
                        checks += 1
                shells += 1
                tight += any(not oscillatory_brute(f, phi, cfg.from_int(u).shift(N1 + 1)).is_zero()
                             for u in range(1, p))
    elapsed = time.perf_counter() - t
    return elapsed < 60, (f"{checks} shell integrals vanish for ord lambda <= N1; "
                          f"N1 is sharp on {tight}/{shells} shells; {elapsed:.1f}s")


def criterion_8():
    t = time.perf_counter()
    lines = []
    for src in ("x1^2", "x1^2 + x1*x2 + x2^2"):
        rep = check_uniform(parse_phase(src), primes=(3, 5, 7, 11, 13))
        if not rep.ok:
            bad = [e for e in rep.entries if e["status"] not in ("pass", "bad_prime")]
            return False, f"{src}: {bad[:1]}"
        good = sum(e["status"] == "pass" for e in rep.entries)
        lines.append(f"{src}: {good} good (prime, kind)")
    elapsed = time.perf_counter() - t
    return elapsed < 300, f"{'; '.join(lines)}; {elapsed:.1f}s"


def criterion_9():
    t = time.perf_counter()
    pairs = 0
    for src in PHASE_THEOREM:
        f = parse_phase(src)
        bad = bad_primes(src)
        for kind in KINDS:
            for p in PRIMES:
                if p in bad:
                    continue
                cfg = FieldConfig(kind, p, 24)
                rng = random.Random(p)
                a = one_on_O(cfg, f.n)
                # same support O^n, different values on the cells
                cells = [(c, d, rng.randint(1, 9)) for c, d in Region.full(cfg, f.n).refine(1).cells]
                b = StepFunction(cfg, f.n, cells)
                ca, cb = stationary_phase(f, a), stationary_phase(f, b)
                ua = [md.units for _, md in ca.critical_points]
                ub = [md.units for _, md in cb.critical_points]
                if ca.alpha != cb.alpha or ua != ub:
                    return False, f"normal form depends on the amplitude for {src} at p={p}"
                pairs += 1
    elapsed = time.perf_counter() - t
    return elapsed < 30, f"{pairs} amplitude pairs give identical alpha and units; {elapsed:.1f}s"


def criterion_10():
    crashes = 0
    for src in fuzz_inputs(10_000, seed=10):
        try:
            parse_phase(src)
        except NAPhaseError:
            pass
        except Exception:  # noqa: BLE001 - anything else is a crash
            crashes += 1
    from test_cli import GOLDEN, JOBS

    mismatched = []
    for name, argv in sorted(JOBS.items()):
        runs = []
        for _ in range(2):
            out = io.StringIO()
            cli.main(argv, out=out)
            runs.append(out.getvalue())
        stored = (GOLDEN / f"{name}.jsonl").read_text(encoding="utf-8")
        if not (runs[0] == runs[1] == stored):
            mismatched.append(name)
    ok = crashes == 0 and not mismatched
    return ok, f"10000 fuzzed inputs, {crashes} crashes; {len(JOBS) - len(mismatched)}/{len(JOBS)} golden files byte-identical"


CRITERIA = {
    1: ("Fourier inversion", criterion_1),
    2: ("Plancherel", criterion_2),
    3: ("Gauss oracle", criterion_3),
    4: ("Morse residual", criterion_4),
    5: ("Stationary phase formula", criterion_5),
    6: ("Several critical points", criterion_6),
    7: ("Nonstationary vanishing", criterion_7),
    8: ("Uniformity across primes", criterion_8),
    9: ("Amplitude independence", criterion_9),
    10: ("Parser and output format", criterion_10),
}


def run_criterion(k):
    name, fn = CRITERIA[k]
    try:
        ok, detail = fn()
    except NAPhaseError as exc:
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    line = f"{'PASS' if ok else 'FAIL'} [{k:2d}] {name}: {detail}"
    return ok, line


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, line = run_criterion(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
