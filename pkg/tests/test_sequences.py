import math

import mpmath
import numpy as np
import pytest

from stepcat import ClassificationError, Kind, dynamic_gp, dynamic_pp, grimmer_recursion, rotaru, silver, teboulle_vaisbourd
from stepcat.analysis import RHO, gradient_bound, objective_bound
from stepcat.dp import pri_dp
from stepcat.schedule import Schedule, empty
from stepcat.sequences import grimmer_length_index

SQRT2 = math.sqrt(2.0)


def tv_direct(n):
    """Teboulle-Vaisbourd recursion as usually written, 50 digits."""
    S, out = mpmath.mpf(0), []
    for _ in range(n):
        h = (-S + mpmath.sqrt(S * S + 8 * S + 8)) / 2
        out.append(h)
        S += h
    return [float(v) for v in out]


def rotaru_direct(n):
    h, out = mpmath.mpf(3) / 2, []
    for j in range(n):
        if j:
            h = (3 - 2 * h + mpmath.sqrt(9 - 4 * h)) / (2 * (2 - h))
        out.append(h)
    return [float(v) for v in out]


def test_tv_first_steps():
    h = teboulle_vaisbourd(3)
    assert h.tolist()[:2] == pytest.approx([SQRT2, 1.601232], abs=1e-6)
    assert h.kind is Kind.PRIMITIVE


def test_tv_against_high_precision():
    np.testing.assert_allclose(teboulle_vaisbourd(300).steps, tv_direct(300), rtol=1e-13)


def test_rotaru_against_high_precision():
    np.testing.assert_allclose(rotaru(300).steps, rotaru_direct(300), rtol=1e-13)


def test_rotaru_second_step_is_sqrt3():
    assert rotaru(2).tolist() == pytest.approx([1.5, math.sqrt(3)], rel=1e-15)


@pytest.mark.parametrize("n,c", [(1, 0.261204), (2, 0.142229), (3, 0.095827), (511, 0.000492)])
def test_tv_constants(n, c):
    assert objective_bound(teboulle_vaisbourd(n)) == pytest.approx(c, abs=1e-6)


@pytest.mark.parametrize("n,c", [(1, 0.25), (2, 0.133975), (3, 0.090059), (511, 0.000491)])
def test_rotaru_constants(n, c):
    assert gradient_bound(rotaru(n)) == pytest.approx(c, abs=1e-6)


@pytest.mark.parametrize("l,c", [(1, 0.25), (2, 0.085786), (3, 0.032768), (4, 0.013082), (5, 0.005327), (9, 0.000155)])
def test_grimmer_constants(l, c):
    h = grimmer_recursion(l)
    assert len(h) == 2**l - 1
    assert h.kind is Kind.DOMINANT
    assert objective_bound(h) == pytest.approx(c, abs=1e-6)


def test_grimmer_length_index():
    assert [grimmer_length_index(n) for n in (0, 1, 2, 3, 7, 8, 511)] == [0, 1, None, 2, 3, None, 9]


def test_silver_small():
    assert len(silver(0)) == 0
    assert silver(1).tolist() == pytest.approx([SQRT2])
    np.testing.assert_allclose(silver(2).steps, [SQRT2, 2.0, SQRT2], rtol=1e-15)


@pytest.mark.parametrize("l", range(0, 15))
def test_silver_identity_and_palindrome(l):
    h = silver(l)
    assert h.total + 1 == pytest.approx(2 ** (l * RHO), rel=1e-9)
    assert np.array_equal(h.steps, h.steps[::-1])


def test_dynamic_pp_single_concat():
    s = dynamic_pp(K=1)
    assert s.steps.tolist() == pytest.approx([SQRT2])
    assert s.prefix_lengths == [0, 1]


def test_dynamic_gp_zero_blocks_returns_base():
    base = Schedule.of([1.5], "gbounded")
    s = dynamic_gp(base=base, K=0)
    assert s.steps.tolist() == [1.5]


def test_dynamic_wrong_kinds():
    with pytest.raises(ClassificationError):
        dynamic_pp(base=Schedule.of([1.5], "dominant"))
    with pytest.raises(ClassificationError):
        dynamic_gp(base=empty(Kind.PRIMITIVE))
    with pytest.raises(ClassificationError):
        dynamic_gp(block=Schedule.of([1.5], "gbounded"))


def test_dynamic_lengths_and_monotone_sums():
    block = pri_dp(3)[3]
    s = dynamic_pp(block=block, K=20)
    assert s.prefix_lengths == [4 * k for k in range(21)]
    assert np.all(np.diff(s.prefix_sums) > 0)


def test_nearly_periodic_pattern():
    block = pri_dp(3)[3]
    s = dynamic_pp(block=block, K=10)
    steps = s.steps
    for k in range(10):
        seg = steps[4 * k : 4 * k + 4]
        assert seg[0] == s.joints[k]
        np.testing.assert_array_equal(seg[1:], block.steps)


def test_equivalences_short():
    np.testing.assert_allclose(dynamic_pp(K=500).steps, teboulle_vaisbourd(500).steps, rtol=1e-12)
    np.testing.assert_allclose(dynamic_gp(K=500).steps, rotaru(500).steps, rtol=1e-12)


def test_limit_ratio_formula():
    block = Schedule.of([SQRT2], "primitive")
    s = dynamic_pp(block=block)
    assert s.limit_ratio() == pytest.approx(1 + SQRT2)


def test_prefix_bounds_match_table_column():
    bounds = dynamic_pp(K=3).prefix_bounds()
    assert [c for _, c in bounds[1:]] == pytest.approx([0.261204, 0.142229, 0.095827], abs=1e-6)
