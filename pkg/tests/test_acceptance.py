"""Acceptance criteria 1-8, each timed against its budget.

Every test prints one PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section of the pytest summary.
"""

from __future__ import annotations

import random
import subprocess
import sys
import time

import pytest

from stratih.complex import Chain, boundary
from stratih.fixtures import FIXTURES
from stratih.ih import intersection_chain_complex, simplicial_chain_complex
from stratih.perversity import top_perversity, zero_perversity
from stratih.snf import homology_ranks
from stratih.verify import (suite_blowup, suite_cone, suite_duality, suite_monotone,
                            suite_product, suite_quotient, suite_subdivision)

from conftest import strat

pytestmark = pytest.mark.acceptance


def _criterion(log, number, title, budget, run):
    t = time.perf_counter()
    ok, detail = run()
    dt = time.perf_counter() - t
    passed = ok and dt < budget
    line = (f"{'PASS' if passed else 'FAIL'} criterion {number}: {title} "
            f"({detail}; {dt:.1f}s / {budget:.0f}s)")
    log.append(line)
    print(line)
    assert ok, detail
    assert dt < budget, f"over budget: {dt:.1f}s > {budget}s"


def _suite(reports):
    failed = [f"{r.fixture} {r.perversity}" for r in reports if not r.passed]
    detail = f"{len(reports) - len(failed)}/{len(reports)} checks"
    if failed:
        detail += ", failing: " + "; ".join(failed)
    return not failed, detail


def test_criterion_1_cone_formula(acceptance_log):
    def run():
        reports = suite_cone()
        ok, detail = _suite(reports)
        rp2 = {r.perversity: r.computed for r in reports if r.fixture == "rp2"}
        ok = ok and rp2["apex=0"][1] == "Z/2" and rp2["apex=1"][1] == "0"
        return ok, detail + f", cRP2 degree 1: {rp2['apex=0'][1]} / {rp2['apex=1'][1]}"
    _criterion(acceptance_log, 1, "cone formula", 30, run)


def test_criterion_2_product_invariance(acceptance_log):
    _criterion(acceptance_log, 2, "product invariance", 60, lambda: _suite(suite_product()))


def test_criterion_3_duality(acceptance_log):
    def run():
        reports = [r for r in suite_duality() if r.fixture == "sigma-t2"]
        return _suite(reports)
    _criterion(acceptance_log, 3, "duality on the suspended torus", 60, run)


def test_criterion_4_blowup(acceptance_log):
    def run():
        reports = suite_blowup()
        ok, detail = _suite(reports)
        return ok, detail + ", " + reports[0].note
    _criterion(acceptance_log, 4, "blow-up boundary formula", 30, run)


def test_criterion_5_quotients(acceptance_log):
    _criterion(acceptance_log, 5, "finite quotients", 120, lambda: _suite(suite_quotient()))


def test_criterion_6_monotone_and_extremes(acceptance_log):
    _criterion(acceptance_log, 6, "monotonicity and extremes", 30, lambda: _suite(suite_monotone()))


def test_criterion_7_subdivision(acceptance_log):
    _criterion(acceptance_log, 7, "subdivision stability (2 vs 3)", 120,
               lambda: _suite(suite_subdivision()))


def _random_boundary_checks(rng: random.Random) -> int:
    count = 0
    for name in FIXTURES:
        X = strat(name, 1).base
        for k in range(1, X.dim + 1):
            simp = X.simplices(k)
            for _ in range(20):
                c = Chain(k, {simp[rng.randrange(len(simp))]: rng.randint(-9, 9) for _ in range(8)})
                if boundary(boundary(c)).coefficients:
                    raise AssertionError(f"dd != 0 on {name} in degree {k}")
                count += 1
        # the same on the intersection complex, through its boundary matrices
        ic = intersection_chain_complex(top_perversity(strat(name, 1)))
        for k in range(2, ic.top + 1):
            for _ in range(20):
                if not ic.sizes[k]:
                    break
                col = {}
                for _ in range(5):
                    i = rng.randrange(ic.sizes[k])
                    for r, v in ic.boundaries[k][i].items():
                        col[r] = col.get(r, 0) + v
                acc = {}
                for r, v in col.items():
                    for rr, w in ic.boundaries[k - 1][r].items():
                        acc[rr] = acc.get(rr, 0) + v * w
                if any(acc.values()):
                    raise AssertionError(f"DD != 0 on IC of {name} in degree {k}")
                count += 1
    return count


def _betti_agree() -> int:
    count = 0
    for name in FIXTURES:
        st = strat(name, 1)
        for c in (simplicial_chain_complex(st.base), intersection_chain_complex(zero_perversity(st))):
            bz, _ = homology_ranks(c.sizes, c.boundaries, "Z")
            bq, _ = homology_ranks(c.sizes, c.boundaries, "Q")
            if bz != bq:
                raise AssertionError(f"{name}: Z betti {bz} vs Q rank {bq}")
            count += 1
    return count


def _cli_twice() -> bool:
    cmd = [sys.executable, "-m", "stratih", "compute", "-f", "sigma-rp2", "-p", "top", "--json"]
    runs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    listing = [subprocess.run([sys.executable, "-m", "stratih", "verify", "mv"],
                              capture_output=True, check=True).stdout for _ in range(2)]
    return runs[0] == runs[1] and listing[0] == listing[1] and bool(runs[0])


def test_criterion_8_well_formedness(acceptance_log):
    def run():
        n_dd = _random_boundary_checks(random.Random(20240601))
        n_b = _betti_agree()
        same = _cli_twice()
        return same, f"{n_dd} random dd checks, {n_b} Z/Q betti comparisons, CLI byte-identical: {same}"
    _criterion(acceptance_log, 8, "well-formedness", 60, run)
