"""Acceptance criteria, one check per criterion.

Run under pytest (the PASS/FAIL lines are repeated in the terminal summary)
or directly: ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from itertools import product
from math import comb

import pytest

from bottchern.catalog import (
    DIRECTIONS,
    LABELS,
    SigmaTuple,
    TABLE_COLUMNS,
    expected_dims,
    iwasawa,
    sample_spec,
    sigma_family,
    torus,
)
from bottchern.cohomology import aeppli, bott_chern, de_rham, dolbeault, l_cohomology
from bottchern.deformation import (
    KodairaSpencerClass,
    Source,
    extend_class,
    first_order_family,
    jump_scan,
    obstruction_first_order,
)
from bottchern.exterior import BigradedForm, FrameVector, basis, conjugate, interior, parse_form
from bottchern.scalars import GaussianRational, as_scalar
from bottchern.structure import d, dbar, ddbar, partial

SEED = 20240611
INSTANCES = 100
N = 3
GRID = [(p, q) for p in range(N + 1) for q in range(N + 1)]
T_NAMES = ("t11", "t12", "t21", "t22")

RESULTS: dict[int, tuple[bool, str]] = {}


def F(text):
    return parse_form(text, N)


# random exact instances


def rand_scalar(rng: random.Random, bound: int = 5) -> GaussianRational:
    def q():
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))

    return GaussianRational(q(), q())


def rand_form(rng: random.Random, bidegree=None, terms: int = 4) -> BigradedForm:
    p, q = bidegree if bidegree is not None else (rng.randint(0, N), rng.randint(0, N))
    monos = basis(N, p, q)
    chosen = rng.sample(monos, min(terms, len(monos)))
    return BigradedForm(N, {m: rand_scalar(rng) for m in chosen}, (p, q))


def rand_sigma_spec(rng: random.Random):
    return SigmaTuple(*(rand_scalar(rng) for _ in range(5))).spec()


def rand_kappa(rng: random.Random) -> KodairaSpencerClass:
    return KodairaSpencerClass(N, {k: rand_scalar(rng) for k in T_NAMES})


def sample_specs():
    return {label: sample_spec(label) for label in LABELS}


# criteria


def criterion_1():
    spec = iwasawa()
    want = {
        "dR": [4, 8, 10, 8, 4],
        "dbar": [3, 2, 3, 6, 2, 1, 6, 6, 1, 2, 6, 3, 2, 3],
        "BC": [2, 2, 3, 4, 3, 1, 6, 6, 1, 2, 8, 2, 3, 3],
        "A": [3, 3, 2, 8, 2, 1, 6, 6, 1, 3, 4, 3, 2, 2],
    }
    got = {
        "dR": [de_rham(spec, k).dim for k in range(1, 6)],
        "dbar": [dolbeault(spec, *pq).dim for pq in TABLE_COLUMNS],
        "BC": [bott_chern(spec, *pq).dim for pq in TABLE_COLUMNS],
        "A": [aeppli(spec, *pq).dim for pq in TABLE_COLUMNS],
    }
    bad = [k for k in want if want[k] != got[k]]
    return not bad, "all four central rows exact" if not bad else f"mismatch in {bad}: {got}"


def criterion_2():
    mismatches = []
    for label, spec in sample_specs().items():
        for table, fn in (("dbar", dolbeault), ("BC", bott_chern), ("A", aeppli)):
            for pq, want in expected_dims(label, table).items():
                got = fn(spec, *pq).dim
                if got != want:
                    mismatches.append(f"{label} {table}{pq}: {got} != {want}")
        for k, want in expected_dims(label, "dR").items():
            if de_rham(spec, k).dim != want:
                mismatches.append(f"{label} dR{k}")
    spot = {
        ("BC", (2, 0)): {"ii.a": 2, "ii.b": 2, "iii.a": 1, "iii.b": 1},
        ("BC", (2, 2)): {"ii.a": 7, "iii.a": 7, "ii.b": 6, "iii.b": 6},
        ("A", (1, 1)): {"ii.a": 7, "iii.a": 7, "ii.b": 6, "iii.b": 6},
        ("A", (3, 1)): {"ii.a": 2, "ii.b": 2, "iii.a": 1, "iii.b": 1},
    }
    for (kind, pq), row in spot.items():
        fn = bott_chern if kind == "BC" else aeppli
        for label, want in row.items():
            if fn(sample_spec(label), *pq).dim != want:
                mismatches.append(f"{label} {kind}{pq} transition")
    return not mismatches, "5 sample points match every row" if not mismatches else "; ".join(mismatches[:5])


def criterion_3():
    specs = {"iwasawa": iwasawa(), "torus3": torus(3), **sample_specs()}
    checked, bad = 0, []
    for name, spec in specs.items():
        for p, q in product(range(1, N + 1), repeat=2):
            checked += 2
            if l_cohomology(spec, p, q, p + q - 1).dim != bott_chern(spec, p, q).dim:
                bad.append(f"{name} BC({p},{q})")
            if l_cohomology(spec, p + 1, q + 1, p + q).dim != aeppli(spec, p, q).dim:
                bad.append(f"{name} A({p},{q})")
    return not bad and checked >= 7 * 9 * 2, f"{checked} identifications, {len(bad)} mismatches {bad[:3]}"


def criterion_4():
    specs = {"iwasawa": iwasawa(), "torus3": torus(3), **sample_specs()}
    rng = random.Random(SEED + 4)
    for k in range(10):
        specs[f"random{k}"] = rand_sigma_spec(rng)
    bad = []
    for name, spec in specs.items():
        for p, q in GRID:
            if aeppli(spec, p, q).dim != bott_chern(spec, N - q, N - p).dim:
                bad.append(f"{name} duality ({p},{q})")
            if bott_chern(spec, p, q).dim != bott_chern(spec, q, p).dim:
                bad.append(f"{name} conjugation ({p},{q})")
    return not bad, f"{len(specs)} specs x 16 bidegrees" if not bad else "; ".join(bad[:5])


def criterion_5():
    spec = iwasawa()
    t = {"t11": GaussianRational(2, 1), "t12": GaussianRational(Fraction(-1, 3), 0),
         "t21": GaussianRational(5, -2), "t22": GaussianRational(0, 7)}
    kappa = KodairaSpencerClass(N, t)
    tb = {k: v.conjugate() for k, v in t.items()}
    eps = -1
    checks = {}

    ob = obstruction_first_order(spec, kappa, Source("Bclass", 2, 2, 2), F("phi[3]"))
    printed = (F("phi[2]^phibar[1]") * -t["t11"] + F("phi[2]^phibar[2]") * -t["t12"]
               + F("phi[1]^phibar[1]") * t["t21"] + F("phi[1]^phibar[2]") * t["t22"])
    checks["o1(phi3)"] = ob.form == printed

    ob = obstruction_first_order(spec, kappa, Source("BC", 2, 0), F("phi[2]^phi[3]"))
    printed = F("phi[1]^phi[2]^phibar[1]") * t["t21"] + F("phi[1]^phi[2]^phibar[2]") * t["t22"]
    checks["o1(phi2^phi3)"] = ob.form == printed * eps

    ob = obstruction_first_order(spec, kappa, Source("BC", 2, 0), F("phi[1]^phi[3]"))
    printed = F("phi[1]^phi[2]^phibar[1]") * t["t11"] + F("phi[1]^phi[2]^phibar[2]") * t["t12"]
    checks["o1(phi1^phi3)"] = ob.form == printed * eps

    ob = obstruction_first_order(spec, kappa, Source("Bclass", 2, 2, 2), F("phibar[3]"))
    printed = (F("phibar[2]^phi[1]") * -tb["t11"] + F("phibar[2]^phi[2]") * -tb["t12"]
               + F("phibar[1]^phi[1]") * tb["t21"] + F("phibar[1]^phi[2]") * tb["t22"])
    checks["o1(phibar3)"] = ob.form in (printed, printed * eps)

    checks["o1(phi1^phi2)=0"] = obstruction_first_order(spec, kappa, Source("BC", 2, 0), F("phi[1]^phi[2]")).vanishes

    combo_ok = True
    for label in ("ii.a", "ii.b"):
        kk = KodairaSpencerClass(N, DIRECTIONS[label])
        e = kk.entries()
        theta = F("phi[2]^phi[3]") * e.get("t11", 0) - F("phi[1]^phi[3]") * e.get("t21", 0)
        combo_ok &= obstruction_first_order(spec, kk, Source("BC", 2, 0), theta).vanishes
    checks["o1(t11 phi2^phi3 - t21 phi1^phi3)=0"] = combo_ok

    bad = [k for k, v in checks.items() if not v]
    return not bad and len(checks) == 6, "six checks exact (eps = -1 on BC sources)" if not bad else f"failed: {bad}"


def criterion_6():
    spec = iwasawa()
    want_bc = {(2, 0), (0, 2), (2, 2)}
    want_a = {(3, 1), (1, 3), (1, 1)}
    bad = []
    for label in LABELS:
        report = jump_scan(spec, KodairaSpencerClass(N, DIRECTIONS[label]), sample=sample_spec(label))
        bc, a = set(report.flagged("BC")), set(report.flagged("A"))
        expect = (set(), set()) if label == "i" else (want_bc, want_a)
        if (bc, a) != expect:
            bad.append(f"{label}: BC {sorted(bc)} A {sorted(a)}")
        if not report.corroborated:
            bad.append(f"{label}: flag without a drop")
    return not bad, "exact flag sets, all corroborated" if not bad else "; ".join(bad)


def criterion_7():
    spec = iwasawa()
    sources = []
    for p, q in GRID:
        if p + q >= 1:
            sources += [Source("BC", p, q), Source("A", p, q)]
    sources += [Source("Bclass", p, q, 2) for p, q in product(range(1, N + 2), repeat=2) if p + q >= 4]
    agree = disagree = 0
    for label in LABELS:
        kappa = KodairaSpencerClass(N, DIRECTIONS[label])
        family = first_order_family(spec, kappa, order=1)
        for source in sources:
            for theta in source.group(spec).representatives:
                first = obstruction_first_order(spec, kappa, source, theta)
                ext = extend_class(family, source, theta, 1)
                if ext.ok == first.vanishes:
                    agree += 1
                else:
                    disagree += 1
    return disagree == 0, f"{agree} class/direction pairs agree, {disagree} disagree"


def criterion_8():
    rng = random.Random(SEED + 8)
    failures = {"differential": 0, "algebra": 0, "independence": 0, "semicontinuity": 0}

    for _ in range(INSTANCES):
        spec = rand_sigma_spec(rng)
        a = rand_form(rng)
        if (partial(partial(a, spec), spec) or dbar(dbar(a, spec), spec)
                or partial(dbar(a, spec), spec) + dbar(partial(a, spec), spec)
                or d(d(a, spec), spec)):
            failures["differential"] += 1

    for _ in range(INSTANCES):
        a, b, c = rand_form(rng, terms=3), rand_form(rng, terms=3), rand_form(rng, terms=3)
        v = FrameVector(rng.randint(1, N), rng.random() < 0.5)
        ok = ((a ^ b) ^ c) == (a ^ (b ^ c))
        ok &= (a ^ b) == (b ^ a) * (-1) ** (a.degree * b.degree) if a and b else True
        sign = (-1) ** a.degree if a else 1
        ok &= interior(v, a ^ b) == (interior(v, a) ^ b) + (a ^ interior(v, b)) * sign
        ok &= conjugate(conjugate(a)) == a and conjugate(a ^ b) == conjugate(a) ^ conjugate(b)
        if not ok:
            failures["algebra"] += 1

    spec = iwasawa()
    bc_spots = [(1, 1), (2, 1), (1, 2), (2, 2)]
    a_spots = [(1, 1), (2, 0), (0, 2), (2, 1), (1, 2)]
    for k in range(INSTANCES):
        kappa = rand_kappa(rng)
        if k % 2 == 0:
            pq = rng.choice(bc_spots)
            source = Source("BC", *pq)
            shift = ddbar(rand_form(rng, (pq[0] - 1, pq[1] - 1)), spec)
        else:
            p, q = rng.choice(a_spots)
            source = Source("A", p, q)
            shift = BigradedForm.zero(N)
            if p:
                shift = shift + partial(rand_form(rng, (p - 1, q)), spec)
            if q:
                shift = shift + dbar(rand_form(rng, (p, q - 1)), spec)
        theta = rng.choice(source.group(spec).representatives)
        base = obstruction_first_order(spec, kappa, source, theta)
        moved = obstruction_first_order(spec, kappa, source, theta + shift)
        if base.coordinates != moved.coordinates:
            failures["independence"] += 1

    central = {kind: {pq: fn(spec, *pq).dim for pq in GRID}
               for kind, fn in (("BC", bott_chern), ("A", aeppli), ("dbar", dolbeault))}
    for k in range(INSTANCES):
        label = LABELS[k % len(LABELS)]
        # a random small point along the label's direction, entries rescaled independently
        point = {}
        for name, v in DIRECTIONS[label].items():
            factor = rand_scalar(rng, 3) or GaussianRational(1)
            point[name] = as_scalar(v) * factor * Fraction(1, rng.randint(10, 40))
        moved_spec = sigma_family(point)
        for kind, fn in (("BC", bott_chern), ("A", aeppli), ("dbar", dolbeault)):
            if any(fn(moved_spec, *pq).dim > central[kind][pq] for pq in GRID):
                failures["semicontinuity"] += 1
                break

    ok = not any(failures.values())
    return ok, f"{INSTANCES} instances per suite, failures {failures}"


def criterion_9():
    t = torus(3)
    bad = []
    for p, q in GRID:
        want = comb(3, p) * comb(3, q)
        for kind, fn in (("BC", bott_chern), ("A", aeppli), ("dbar", dolbeault)):
            if fn(t, p, q).dim != want:
                bad.append(f"{kind}({p},{q})")
    rng = random.Random(SEED + 9)
    kappas = [KodairaSpencerClass.unit(3, i, lam) for i, lam in product(range(1, 4), repeat=2)]
    kappas += [KodairaSpencerClass(3, [[rand_scalar(rng) for _ in range(3)] for _ in range(3)]) for _ in range(5)]
    sources = [Source("BC", p, q) for p, q in GRID if p + q] + [Source("A", p, q) for p, q in GRID if p + q]
    count = 0
    for kappa in kappas:
        for source in sources:
            for theta in source.group(t).representatives:
                count += 1
                if not obstruction_first_order(t, kappa, source, theta).vanishes:
                    bad.append(f"{source} {kappa!r}")
    return not bad, f"dims binomial, {count} obstructions vanish" if not bad else "; ".join(bad[:5])


CRITERIA = {
    1: ("central Iwasawa tables", criterion_1),
    2: ("deformed tables at sample points", criterion_2),
    3: ("L-complex identification", criterion_3),
    4: ("duality and conjugation", criterion_4),
    5: ("obstruction formulas", criterion_5),
    6: ("jump detection", criterion_6),
    7: ("extension agrees with first order", criterion_7),
    8: ("randomized property suites", criterion_8),
    9: ("torus control", criterion_9),
}


def line(number: int) -> str:
    ok, detail = RESULTS[number]
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {CRITERIA[number][0]} -- {detail}"


def evaluate(number: int) -> bool:
    try:
        RESULTS[number] = CRITERIA[number][1]()
    except Exception as exc:  # a crash is a failed criterion, reported like one
        RESULTS[number] = (False, f"raised {type(exc).__name__}: {exc}")
    print(line(number))
    return RESULTS[number][0]


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    assert evaluate(number), line(number)


def main() -> int:
    start = time.perf_counter()
    ok = [evaluate(n) for n in sorted(CRITERIA)]
    print(f"{sum(ok)}/{len(ok)} criteria pass in {time.perf_counter() - start:.1f}s")
    return 0 if all(ok) else 1


if __name__ == "__main__":
    sys.exit(main())
