import math

import numpy as np
import pytest

from conftest import SQRT2, phi_direct, psi_direct
from stepcat import (
    CertificateError,
    ClassificationError,
    DomainError,
    Kind,
    Schedule,
    certificate_dominant,
    certificate_primitive,
    con_gp,
    con_pd,
    con_pp,
    empty,
    phi,
    psi,
    reverse,
)
from stepcat.schedule import Node, certificate_lambdas, phi_array, psi_array


class TestJointSteps:
    def test_phi_empty_blocks_is_sqrt2(self):
        assert phi(0, 0) == pytest.approx(SQRT2, abs=1e-15)

    def test_phi_silver_level_two(self):
        assert phi(SQRT2, SQRT2) == pytest.approx(2.0, abs=1e-14)

    def test_psi_empty_blocks_is_three_halves(self):
        assert psi(0, 0) == 1.5

    def test_psi_after_sqrt2_block(self):
        # second step of the dominant schedule of length 2
        assert psi(SQRT2, 0) == pytest.approx((3 + math.sqrt(9 + 8 * SQRT2)) / 4, abs=1e-15)

    @pytest.mark.parametrize("x,y", [(0.0, 0.0), (1.0, 2.0), (37.5, 0.1), (1e6, 3e5), (1e-8, 4e8), (0.0, 1e9)])
    def test_against_high_precision_direct_formula(self, x, y):
        assert phi(x, y) == pytest.approx(phi_direct(x, y), rel=1e-14)
        assert psi(x, y) == pytest.approx(psi_direct(x, y), rel=1e-14)

    def test_phi_symmetric(self):
        assert phi(3.1, 7.4) == phi(7.4, 3.1)

    @pytest.mark.parametrize("bad", [(-1.0, 0.0), (0.0, -1e-9), (math.nan, 1.0), (math.inf, 0.0)])
    def test_domain_errors(self, bad):
        with pytest.raises(DomainError):
            phi(*bad)
        with pytest.raises(DomainError):
            psi(*bad)

    def test_vectorized_matches_scalar_bitwise(self):
        rng = np.random.default_rng(1)
        x = 10 ** rng.uniform(-3, 5, 200)
        y = 10 ** rng.uniform(-3, 5, 200)
        assert np.array_equal(phi_array(x, y), [phi(a, b) for a, b in zip(x, y)])
        assert np.array_equal(psi_array(x, y), [psi(a, b) for a, b in zip(x, y)])


class TestConcatenation:
    def test_con_pp_of_empties(self):
        h = con_pp(empty(), empty())
        assert h.tolist() == pytest.approx([SQRT2])
        assert h.kind is Kind.PRIMITIVE

    def test_con_pd_of_empties(self):
        h = con_pd(empty(), empty(Kind.DOMINANT))
        assert h.tolist() == [1.5]
        assert h.kind is Kind.DOMINANT

    def test_con_gp_uses_primitive_sum_first(self):
        b = con_pp(empty(), empty())
        d = con_gp(empty(Kind.GBOUNDED), b)
        assert d.tolist()[0] == psi(SQRT2, 0.0)
        assert d.tolist()[0] != psi(0.0, SQRT2)

    def test_table_row_three(self):
        s = con_pp(empty(), empty())
        d1 = con_pd(empty(), empty(Kind.DOMINANT))
        h = con_pd(s, d1)
        assert h.tolist() == pytest.approx([1.414214, 2.414214, 1.5], abs=1e-6)

    def test_classification_errors(self):
        d = con_pd(empty(), empty(Kind.DOMINANT))
        with pytest.raises(ClassificationError):
            con_pp(d, empty())
        with pytest.raises(ClassificationError):
            con_pd(empty(), empty(Kind.PRIMITIVE))
        with pytest.raises(ClassificationError):
            con_gp(d, empty())

    def test_reverse_swaps_dominant_and_gbounded(self):
        d = con_pd(empty(), empty(Kind.DOMINANT))
        r = reverse(d)
        assert r.kind is Kind.GBOUNDED
        assert reverse(r).kind is Kind.DOMINANT
        assert reverse(empty()).kind is Kind.PRIMITIVE

    def test_reverse_of_con_pd_is_con_gp(self):
        a = con_pp(con_pp(empty(), empty()), empty())
        d = con_pd(empty(), empty(Kind.DOMINANT))
        lhs = reverse(con_pd(a, d))
        rhs = con_gp(reverse(d), reverse(a))
        assert np.array_equal(lhs.steps, rhs.steps)
        assert lhs.tree.op == "ConGP"

    def test_steps_read_only(self):
        h = Schedule.of([1.0, 2.0], "primitive")
        with pytest.raises(ValueError):
            h.steps[0] = 3.0

    def test_total_is_exact_sum(self):
        h = Schedule.of([1e16, 1.0, -1e16])
        assert h.total == 1.0


class TestCertificates:
    def test_primitive_certificate(self):
        h = con_pp(empty(), empty())
        c = certificate_primitive(h)
        assert c.u.tolist() == pytest.approx([SQRT2, 0.0])

    def test_empty_dominant_certificate(self):
        assert certificate_dominant(empty(Kind.DOMINANT)).u.tolist() == [1.0]

    def test_length_one_certificate(self):
        # h = [1.5]: gamma = 2, lambda2 = 2, lambda1 = 4, u = [2, 2]
        h = con_pd(empty(), empty(Kind.DOMINANT))
        assert certificate_dominant(h).u.tolist() == pytest.approx([2.0, 2.0], abs=1e-15)

    def test_lambdas_identity(self):
        g, l1, l2 = certificate_lambdas(SQRT2, 5.0)
        assert g == SQRT2 + 2
        assert l1 == pytest.approx((l1 - l2) ** 2, rel=1e-14)

    def test_normalization(self, fam64):
        _, bullet, _ = fam64
        for n in (5, 17, 64):
            h = bullet[n]
            u = certificate_dominant(h).u
            assert u.sum() == pytest.approx(2 * h.total + 1, rel=1e-12)
            assert np.all(u >= 0)

    def test_tampered_joint_step_detected(self):
        h = con_pd(con_pp(empty(), empty()), con_pd(empty(), empty(Kind.DOMINANT)))
        t = h.tree
        bad = Node("ConPD", t.joint_step * (1 + 1e-6), t.left, t.right)
        with pytest.raises(CertificateError):
            certificate_dominant(bad)

    def test_gbounded_rejected(self):
        with pytest.raises(ClassificationError):
            certificate_dominant(reverse(con_pd(empty(), empty(Kind.DOMINANT))))
