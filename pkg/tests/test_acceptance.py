"""Acceptance checks AC1-AC10.

Each check prints one ``ACn PASS/FAIL: ...`` line. Run with pytest, or
directly as ``python3 tests/test_acceptance.py`` for the summary alone.
"""

import json
import os
import random
import sys
import tempfile
import time
from fractions import Fraction
from itertools import product

import pytest

from polyhankel import numeric
from polyhankel.asymptotics import RatioExperiment, check_convergence, ratio_sequence, window_stable
from polyhankel.cli import main as cli_main
from polyhankel.counterexample import build_counterexample, hs_sum_check, no_decomposition_witness, plateau_measure
from polyhankel.hankel import (
    COMPACT,
    NOT_COMPACT,
    IndexBox,
    compactness_certificate,
    decay_limit,
    diagonal_sweep,
    hankel_gram,
    lambda_closed_form,
    norm2,
    obstruction_path,
    path_points,
)
from polyhankel.moments import Atomic, PowerWeight, ProductMeasure, kernel_diag, kernel_diag_closed_form
from polyhankel.numeric import Gaussian
from polyhankel.symbols import (
    QuasiPart,
    Symbol,
    boundary_parts,
    boundary_vanishes,
    cesaro_mean,
    fejer_weight,
    msub,
    parse_symbol,
    quasi_decompose,
)

TOL = 1e-3


# ---------------------------------------------------------------------------
# seeded generators (plain ``random`` so the module also runs as a script)


def _coeff(rng):
    re = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    im = Fraction(rng.randint(-6, 6), rng.randint(1, 4)) if rng.random() < 0.5 else Fraction(0)
    return Gaussian(re or Fraction(1), im)


def random_symbol(rng, n, terms=6, max_exp=3):
    pairs = []
    for _ in range(rng.randint(1, terms)):
        u = tuple(rng.randint(0, max_exp) for _ in range(n))
        v = tuple(rng.randint(0, max_exp) for _ in range(n))
        pairs.append(((u, v), _coeff(rng)))
    f = Symbol(n, pairs)
    return f if not f.is_zero() else Symbol.constant(n)


def random_quasi(rng, n, terms=3, max_exp=2):
    s = tuple(rng.randint(-max_exp, max_exp) for _ in range(n))
    pairs = []
    for _ in range(rng.randint(1, terms)):
        v = tuple(rng.randint(max(0, -sj), max(0, -sj) + max_exp) for sj in s)
        pairs.append(((tuple(a + b for a, b in zip(v, s)), v), _coeff(rng)))
    f = Symbol(n, pairs)
    if f.is_zero():
        v = tuple(max(0, -sj) for sj in s)
        f = Symbol(n, [((tuple(a + b for a, b in zip(v, s)), v), 1)])
    return QuasiPart(s, f)


def ac1_suite():
    """20 quasi-homogeneous symbols cycling through n and beta, covering both branches."""
    rng = random.Random(20240601)
    suite = []
    for i in range(20):
        n = (1, 2, 3)[i % 3]
        beta = (0, 1, 2)[(i // 3) % 3]
        suite.append((n, beta, random_quasi(rng, n)))
    return suite


AC5_SUITE = [
    "z1^2 z2 + 5",
    "1 - z1 zbar1 - z2 zbar2 + z1 zbar1 z2 zbar2",
    "z1 zbar1",
    "zbar1 + z2",
    "z1 zbar1 z2 zbar2 - z1 zbar1 - z2 zbar2 + 1 + z1^3",
    "zbar1 zbar2",
    "z1 zbar2",
    "z1 - z1 z2 zbar2",
    "zbar2 - z1 zbar1 zbar2",
    "z1 zbar2 - z1^2 zbar1 zbar2 - z1 z2 zbar2^2 + z1^2 zbar1 z2 zbar2^2",
]


# ---------------------------------------------------------------------------
# checks: each returns (passed, detail)


def check_ac1():
    t0 = time.perf_counter()
    bad = []
    for i, (n, beta, fs) in enumerate(ac1_suite()):
        G = hankel_gram(ProductMeasure.power_weight(n, beta), fs.symbol, IndexBox(n, 5))
        if G.offdiagonal():
            bad.append(i)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    return ok, f"20 quasi-homogeneous symbols, n in 1..3, beta in 0..2, N=5: nonzero off-diagonals in {bad or 'none'}; {dt:.1f}s (< 30s)"


def check_ac2():
    mismatches = 0
    branches = set()
    for n, beta, fs in ac1_suite():
        pm = ProductMeasure.power_weight(n, beta)
        box = IndexBox(n, 5)
        G = hankel_gram(pm, fs.symbol, box)
        for m, d in zip(box, G.diagonal()):
            branches.add(all(a + b >= 0 for a, b in zip(m, fs.s)))
            if lambda_closed_form(pm, fs, m) != d:
                mismatches += 1
    ok = mismatches == 0 and branches == {True, False}
    return ok, f"closed form vs Gram diagonal: {mismatches} mismatches; branches covered m+s>=0: {True in branches}, not: {False in branches}"


def check_ac3():
    pm = ProductMeasure.power_weight(1)
    f = parse_symbol("zbar1")
    G = hankel_gram(pm, f, IndexBox(1, 50), method="dense")
    lam = G.diagonal()[1:]
    exact = all(x == Fraction(1, (m + 1) * (m + 2)) for m, x in zip(range(1, 51), lam))
    monotone = all(a > b for a, b in zip(lam, lam[1:]))
    first = next(m for m, x in zip(range(1, 51), lam) if x < Fraction(1, 1000))
    ok = exact and monotone and first <= 31
    return ok, f"n=1, f=zbar: lambda_m == 1/((m+1)(m+2)) for m<=50: {exact}; strictly decreasing: {monotone}; first m below 1e-3: {first}"


def check_ac4():
    pm = ProductMeasure.power_weight(2)
    f = parse_symbol("zbar1", 2)
    vals = diagonal_sweep(pm, f, [(0, m2) for m2 in range(51)])
    flat = all(x == Fraction(1, 2) for x in vals)
    with tempfile.TemporaryDirectory() as d:
        out = os.path.join(d, "verdict.json")
        code = cli_main(["certify", "--n", "2", "--symbol", "zbar1", "--out", out])
        with open(out) as fh:
            doc = json.load(fh)
    ok = flat and code == 0 and doc["verdict"] == "not_compact" and doc["s"] == [-1, 0]
    return ok, f"f=zbar1: lambda_(0,m2) == 1/2 for m2<=50: {flat}; certify -> {doc['verdict']} s={doc['s']} (exit {code})"


def _compact_paths(n, cap=50):
    for r in range(1, n + 1):
        for drv in (c for c in product(range(n), repeat=r) if list(c) == sorted(set(c))):
            others = [j for j in range(n) if j not in drv]
            for fv in product((0, 1, 2), repeat=len(others)):
                yield dict(zip(others, fv)), drv


def check_ac5():
    t0 = time.perf_counter()
    pm = ProductMeasure.power_weight(2)
    failures = []
    kinds = []
    for lit in AC5_SUITE:
        f = parse_symbol(lit, 2)
        v = compactness_certificate(pm, f)
        kinds.append(v.kind)
        if v.kind == NOT_COMPACT:
            op = obstruction_path(f, v)
            vals = diagonal_sweep(pm, f, path_points(2, op.frozen, op.driven, op.start, 50))
            lim = decay_limit(pm, quasi_decompose(f)[v.witness_s], op.frozen)
            if not (window_stable(vals, TOL) and vals[-1] > TOL and lim > 0):
                failures.append(lit)
        elif v.kind == COMPACT:
            split = v.h + v.g == f and v.h.is_holomorphic()
            vanish = all(boundary_vanishes(v.g, W) for W in boundary_parts(2))
            paths_ok = True
            for frozen, drv in _compact_paths(2):
                vals = diagonal_sweep(pm, f, path_points(2, frozen, drv, 1, 50))
                paths_ok &= window_stable(vals, TOL) and abs(vals[-1]) <= TOL
            if not (split and vanish and paths_ok):
                failures.append(lit)
        else:
            failures.append(lit)
    dt = time.perf_counter() - t0
    ok = not failures and dt < 60
    nc = kinds.count(NOT_COMPACT)
    return ok, (f"10 symbols ({len(kinds) - nc} compact, {nc} not): verdict vs decay disagreements {failures or 'none'}; "
                f"compact splits f=h+g with g=0 on all 3 boundary parts; stabilised window tol 1e-3 at cap 50; {dt:.1f}s (< 60s)")


def check_ac6():
    rng = random.Random(6)
    bad = 0
    for i in range(20):
        n = 1 + i % 3
        f = random_symbol(rng, n, terms=8)
        pm = ProductMeasure.power_weight(n, i % 3)
        parts = quasi_decompose(f)
        if norm2(pm, f) != sum((norm2(pm, p.symbol) for p in parts.values()), Fraction(0)):
            bad += 1
    return bad == 0, f"||f||^2 == sum_s ||Q_s f||^2 exactly for 20 random symbols: {20 - bad}/20"


def check_ac7():
    rng = random.Random(7)
    weights_ok = kept_ok = recover_ok = fixed_ok = True
    for i in range(10):
        n = 1 + i % 3
        f = random_symbol(rng, n, terms=8)
        if i % 4 == 0:  # make sure degree-zero symbols are in the sample
            f = Symbol(n, [((u, u), a) for (u, _), a in f])
        D = max(1, f.max_abs_degree())
        for N in (1, 2, D, D + 3):
            g = cesaro_mean(f, N)
            for (u, v), a in f:
                w = Fraction(1)
                for sj in msub(u, v):
                    w *= max(Fraction(0), 1 - Fraction(abs(sj), N + 1))
                weights_ok &= g.terms.get((u, v), Gaussian(0)) == a * w and fejer_weight(msub(u, v), N) == w
            if N >= D:
                kept_ok &= set(g.terms) == set(f.terms)
                back = Symbol(n, [(k, a / fejer_weight(msub(*k), N)) for k, a in g])
                recover_ok &= back == f
                fixed_ok &= (g == f) == (f.quasi_degrees() == [(0,) * n])
    ok = weights_ok and kept_ok and recover_ok and fixed_ok
    return ok, (f"10 symbols: coefficients == a*prod(1-|s_j|/(N+1)) exactly: {weights_ok}; for N >= max degree "
                f"no part is dropped: {kept_ok}, f recovered by dividing out the weights: {recover_ok}, "
                f"Lambda_N f == f iff f has only s=0: {fixed_ok}")


def check_ac8():
    path = [(m, m) for m in range(1, 1001)]
    exp = RatioExperiment.from_symbol([PowerWeight(1)] * 2, parse_symbol("r1 r2", 2), (0, 0), (0, 0), path)
    seq = ratio_sequence(exp)
    exact = seq[-1] == Fraction(1002, 1003) ** 2
    err = float(1 - seq[-1])
    conv = check_convergence(seq, 1, 1e-2).converged
    atom = [Atomic(((Fraction(1, 2), Fraction(1)),))]
    control = RatioExperiment.from_symbol(atom, parse_symbol("r1", 1), (0,), (0,), [(m,) for m in range(1, 1001)])
    cseq = ratio_sequence(control)
    to_half = check_convergence(cseq, Fraction(1, 2), 1e-2).converged
    not_one = not check_convergence(cseq, control.alpha, 1e-2).converged
    ok = exact and err < 1e-2 and conv and to_half and not_one
    return ok, (f"phi=r1 r2, path (m,m): ratio at m=1000 == (1002/1003)^2: {exact}, |1 - ratio| = {err:.2e} (< 1e-2); "
                f"atom at 1/2 control -> {float(cseq[-1])} (converges to 1/2, not 1: {to_half and not_one})")


def check_ac9():
    t0 = time.perf_counter()
    with numeric.numeric_mode(numeric.FLOAT):
        ce = build_counterexample(ProductMeasure.power_weight(2), 8)
        sigma_ok = all(L.arcs.sigma < Fraction(1, L.k) for L in ce.layers)
        kernel_ok = all(L.kernel_integral < 1 / L.k ** 2 for L in ce.layers)
        hs = hs_sum_check(ce, tol=1e-2)
        w = no_decomposition_witness(ce)
        rows = {r["k0"]: r for r in w["decay_table"] if r["s"] == [0, 0]}
        q0_ok = all(rows[k0]["max_Q0"] <= 1 / k0 + 1e-3 for k0 in (2, 4, 8))
        plateau_ok = all(plateau_measure(L, 2) > 0 for L in ce.layers) and w["plateaus_positive"]
    dt = time.perf_counter() - t0
    ok = sigma_ok and kernel_ok and hs.passed and q0_ok and plateau_ok and dt < 120
    q0 = ", ".join(f"k0={k0}: {rows[k0]['max_Q0']:.3g}" for k0 in (2, 4, 8))
    return ok, (f"n=2, K=8: sigma(V_k) < 1/k: {sigma_ok}; kernel integral < 1/k^2: {kernel_ok}; "
                f"HS sum {hs.estimate:.4g} <= {hs.bound:.4g} + 1e-2: {hs.passed}; max Q0 beyond ring ({q0}) "
                f"<= 1/k0 + 1e-3: {q0_ok}; exact plateau measures positive: {plateau_ok}; {dt:.1f}s (< 120s)")


def check_ac10():
    worst = 0.0
    monotone = True
    for n, r in [(1, (Fraction(9, 10),)), (2, (Fraction(9, 10), Fraction(1, 2))), (2, (Fraction(9, 10),) * 2),
                 (3, (Fraction(3, 10), Fraction(7, 10), Fraction(9, 10)))]:
        pm = ProductMeasure.power_weight(n)
        target = kernel_diag_closed_form(pm, r)
        expect = 1
        for x in r:
            expect *= (1 - x * x) ** -2
        monotone &= target == expect
        seq = [kernel_diag(pm, r, N) for N in (0, 1, 2, 5, 10, 20, 50, 100, 150, 200)]
        monotone &= all(a < b for a, b in zip(seq, seq[1:])) and seq[-1] < target
        worst = max(worst, float(target - seq[-1]))
    ok = monotone and worst < 1e-6
    return ok, f"PowerWeight(1) kernel diagonal, r_j <= 0.9: increasing towards prod (1-r_j^2)^-2: {monotone}; worst gap at N=200: {worst:.2e} (< 1e-6)"


CHECKS = {f"AC{i}": globals()[f"check_ac{i}"] for i in range(1, 11)}


def _line(name, ok, detail):
    return f"{name} {'PASS' if ok else 'FAIL'}: {detail}"


@pytest.mark.parametrize("name", list(CHECKS))
def test_acceptance(name, capsys):
    ok, detail = CHECKS[name]()
    with capsys.disabled():
        print("\n" + _line(name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    numeric.set_mode(numeric.EXACT)
    failed = 0
    for name, check in CHECKS.items():
        ok, detail = check()
        failed += not ok
        print(_line(name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
