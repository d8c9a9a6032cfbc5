"""Exit criteria.  Every comparison is exact; runtime targets are asserted
where one is stated."""
import io
import random
import time
from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest

from psiclass.arith import double_factorial as df
from psiclass.bounds import (
    delta_dilaton,
    delta_string,
    delta_virasoro,
    epsilon,
    epsilon_ones_closed_form,
    lambda_monotonicity_check,
    lambda_sqrt_bound_check,
    lambda_factor,
    verify_theorem,
    verify_two_point,
)
from psiclass.cache import cache_load, cache_save
from psiclass.cli import main
from psiclass.correlator import CorrelatorEngine, correlator_genus0_oracle
from psiclass.partitions import canonicalize, dimension_ok, enumerate_partitions

from .test_bounds import dilaton_identity_holds, string_identity_holds, virasoro_identity_holds


def one_point(g):
    return Fraction(1, 24**g * factorial(g))


@pytest.fixture(scope="module")
def engine():
    return CorrelatorEngine()


def test_criterion_01_base_data():
    e = CorrelatorEngine()
    assert e(0, (0, 0, 0)) == 1
    assert e(1, (1,)) == Fraction(1, 24)


def test_criterion_02_one_point_correlators_to_genus_50():
    e = CorrelatorEngine()
    start = time.perf_counter()
    for g in range(1, 51):
        assert e(g, (3 * g - 2,)) == one_point(g), g
    assert time.perf_counter() - start < 60


def test_criterion_03_padded_partitions(engine):
    for g in range(1, 9):
        for n in range(1, 9):
            assert engine(g, (0,) * (n - 1) + (3 * g - 3 + n,)) == one_point(g), (g, n)


def test_criterion_04_two_point_sandwich(engine):
    for g in range(1, 13):
        low = Fraction(-2, 6 * g - 1)
        assert epsilon(g, (0, 3 * g - 1), engine) == 0
        assert epsilon(g, (1, 3 * g - 2), engine) == low
        for k in range(2, (3 * g - 1) // 2 + 1):
            assert low < epsilon(g, (k, 3 * g - 1 - k), engine) < 0, (g, k)
        assert verify_two_point(g, engine).ok


def test_criterion_05_theorem_sweep_cold_cache():
    e = CorrelatorEngine()
    start = time.perf_counter()
    checked = 0
    for g in range(1, 7):
        for L in range(0, min(3, g - 1) + 1):
            s = verify_theorem(g, 5, L, e)
            assert s.complete and s.violations == [], (g, L, s.violations)
            assert s.min_epsilon >= lambda_factor(g, L) - 1
            checked += s.checked
    assert checked > 1000
    assert time.perf_counter() - start < 600


def test_criterion_06_ones_product(engine):
    for g in range(1, 7):
        for n in range(1, 7):
            d = (1,) * (n - 1) + (3 * g - 2,)
            assert epsilon(g, d, engine) == epsilon_ones_closed_form(g, n), (g, n)


def _random_instances(rng, count):
    out = []
    while len(out) < count:
        g, n, k = rng.randint(1, 4), rng.randint(1, 4), rng.randint(0, 3)
        out.append((g, n, k))
    return out


def _random_composition(rng, m, n, positive=False):
    if positive:
        if m < n:
            return None
        d = _random_composition(rng, m - n, n)
        return tuple(x + 1 for x in d)
    cuts = sorted(rng.randint(0, m) for _ in range(n - 1))
    return tuple(b - a for a, b in zip([0] + cuts, cuts + [m]))


def test_criterion_07_delta_identities():
    rng = random.Random(20200826)
    done = {"string": 0, "dilaton": 0, "virasoro": 0}
    while min(done.values()) < 200:
        g, n, k = rng.randint(1, 4), rng.randint(1, 4), rng.randint(0, 3)
        if n - k >= 1 and done["string"] < 200:
            d = _random_composition(rng, 3 * g - 2 + n, n - k, positive=True)
            if d is not None:
                assert string_identity_holds(g, n, k, d), (g, n, k, d)
                done["string"] += 1
        if done["dilaton"] < 200:
            d = _random_composition(rng, 3 * g - 3 + n, n)
            assert dilaton_identity_holds(g, n, d), (g, n, d)
            done["dilaton"] += 1
        if 3 * g - 3 + n - k >= 0 and done["virasoro"] < 200:
            d = _random_composition(rng, 3 * g - 3 + n - k, n)
            assert virasoro_identity_holds(g, n, k, d), (g, n, k, d)
            done["virasoro"] += 1
    assert delta_string(1, 2, 0) == Fraction(1, 7) and delta_dilaton(4, 2) == Fraction(-1, 25)


def test_criterion_08_delta_virasoro_lower_bound():
    admissible = 0
    for g in range(1, 21):
        floor = Fraction(-1, 6 * g + 1)
        for n in range(2, 11):
            for k in range(0, 3 * g - 3 + n + 1):
                head = (n - 2) * (k + 1)  # smallest possible d_1 + ... + d_(n-2)
                if 2 * (k + head) > 3 * g or 3 * g - 3 + n - k - head < 0:
                    continue
                admissible += 1
                assert delta_virasoro(g, n, k) >= floor, (g, n, k)
    assert admissible > 100


def test_criterion_09_lambda_structure():
    assert lambda_monotonicity_check(1000)
    assert lambda_sqrt_bound_check(10**4) == []


def test_criterion_10_property_suite(engine, tmp_path, capsys):
    # pivot independence
    for g in range(0, 4):
        for n in range(1, 4):
            for d in {canonicalize(x) for x in enumerate_partitions(max(3 * g - 3 + n, 0), n)}:
                if dimension_ok(g, d) and min(d) >= 2:
                    v = engine(g, d)
                    for i in range(n):
                        assert engine.virasoro_at(g, d, i) == v
    # permutation invariance of correlator and epsilon
    for g, d in [(2, (0, 1, 5)), (3, (2, 3, 5, 0)), (2, (3, 2, 1, 1))]:
        v, eps = engine(g, d), epsilon(g, d, engine)
        for p in permutations(d):
            assert engine(g, p) == v and epsilon(g, p, engine) == eps
    # genus-0 oracle
    for n in range(3, 9):
        for d in enumerate_partitions(n - 3, n):
            assert engine(0, d) == correlator_genus0_oracle(d)
    # cache round trip, byte-identical
    buf = io.StringIO()
    cache_save(engine.cache, buf)
    again = io.StringIO()
    cache_save(cache_load(io.StringIO(buf.getvalue())), again)
    assert again.getvalue() == buf.getvalue()
    # CLI determinism
    outs = []
    for workers in ("1", "1", "2"):
        path = tmp_path / f"run{len(outs)}.json"
        assert main(["verify-bounds", "--g", "4", "--n", "4", "--L", "2", "--format", "json",
                     "--workers", workers, "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]
