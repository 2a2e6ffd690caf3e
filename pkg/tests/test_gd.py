import math

import numpy as np
import pytest

from stepcat import (
    CapabilityError,
    ClassificationError,
    DivergenceError,
    DomainError,
    HuberSpec,
    Kind,
    TightnessError,
    certificate_dominant,
    certificate_primitive,
    dominance_check,
    huber_oracle,
    q_report,
    run_gd,
    tightness_gradient,
    tightness_objective,
)
from stepcat.gd import (
    FunctionOracle,
    dominance_scale,
    gradient_slack,
    logistic_oracle,
    objective_slack,
    quadratic_oracle,
    random_logistic,
    random_logsumexp,
    random_quadratic,
    tightness,
)
from stepcat.schedule import Schedule, empty
from stepcat.sequences import grimmer_recursion, rotaru, silver, teboulle_vaisbourd

SQRT2 = math.sqrt(2.0)


def scalar_quadratic():
    return quadratic_oracle(np.array([[1.0]]))


class TestRunGD:
    def test_exact_step_on_quadratic(self):
        tr = run_gd(scalar_quadratic(), [1.0], [1.0])
        assert tr.x[1, 0] == 0.0
        assert tr.f[1] == 0.0

    def test_huber_linear_regime(self):
        tr = run_gd(huber_oracle(HuberSpec(4.0)), [1.0], [1.5])
        assert tr.x[1, 0] == pytest.approx(0.625, abs=1e-15)
        assert tr.f[1] == pytest.approx(0.125, abs=1e-15)

    def test_empty_schedule(self):
        tr = run_gd(scalar_quadratic(), [2.0], [])
        assert tr.x.shape == (1, 1)

    def test_update_rule(self):
        rng = np.random.default_rng(3)
        o = random_quadratic(4, rng)
        h = [1.2, 0.7, 2.5]
        tr = run_gd(o, rng.standard_normal(4), h)
        for i, s in enumerate(h):
            np.testing.assert_allclose(tr.x[i + 1], tr.x[i] - s / o.L * tr.g[i], rtol=1e-12)

    def test_divergence_reports_index(self):
        def fg(x):
            v = 1.0 / (1.0 - float(x[0])) if x[0] != 1.0 else math.inf
            return v, np.array([1.0])

        o = FunctionOracle(fg, 1.0, 1)
        with pytest.raises(DivergenceError) as err:
            run_gd(o, [0.0], [-1.0, 1.0, 1.0])
        assert err.value.index == 1

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            run_gd(scalar_quadratic(), [1.0, 2.0], [1.0])


class TestHuber:
    def test_value_formula(self):
        o = huber_oracle(HuberSpec(4.0))
        assert o([1.0])[0] == pytest.approx(0.21875, abs=1e-16)
        f0, g0 = o([0.0])
        assert f0 == 0.0 and g0[0] == 0.0

    def test_linear_regime_gradient_norm(self):
        o = huber_oracle(HuberSpec(4.0, L=3.0), d=3)
        _, g = o(np.array([1.0, 2.0, -2.0]))
        assert np.linalg.norm(g) == pytest.approx(3.0 / 4.0, rel=1e-15)

    def test_pieces_match_at_kink(self):
        w = 7.0
        o = huber_oracle(HuberSpec(w))
        r = 1.0 / w
        fa, ga = o([r])
        fb, gb = o([r * (1 - 1e-15)])
        assert fa == pytest.approx(fb, abs=1e-12)
        assert ga[0] == pytest.approx(gb[0], abs=1e-12)
        assert fa == pytest.approx(0.5 * r * r, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            huber_oracle(HuberSpec(0.5))
        with pytest.raises(DomainError):
            huber_oracle(HuberSpec(2.0, L=0.0))
        huber_oracle(HuberSpec(1.0))  # empty-schedule worst case


class TestOracles:
    def test_minimizers(self):
        rng = np.random.default_rng(0)
        for o in (random_quadratic(5, rng), random_logsumexp(5, 7, rng), random_logistic(4, 30, rng)):
            f, g = o(o.x_star)
            assert np.linalg.norm(g) <= 1e-12
            assert f == pytest.approx(o.f_star, abs=1e-14)

    def test_logsumexp_minimum_value(self):
        rng = np.random.default_rng(1)
        o = random_logsumexp(3, 4, rng)
        assert o.f_star == pytest.approx(math.log(8))

    def test_logistic_smoothness_by_finite_differences(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((40, 3))
        y = np.sign(rng.standard_normal(40))
        o = logistic_oracle(X, y)
        for _ in range(20):
            a, b = rng.standard_normal(3), rng.standard_normal(3)
            ga, gb = o(a)[1], o(b)[1]
            assert np.linalg.norm(ga - gb) <= o.L * np.linalg.norm(a - b) * (1 + 1e-12)


class TestQ:
    def test_hand_computed_entry(self):
        tr = run_gd(scalar_quadratic(), [1.0], [1.0])
        q = q_report(tr)
        assert q.Q[0, 1] == pytest.approx(0.0, abs=1e-16)
        assert q.from_star[1] == 0.0

    def test_all_nonpositive_on_convex_oracles(self, fam64):
        rng = np.random.default_rng(4)
        _, bullet, _ = fam64
        for o in (random_quadratic(3, rng), random_logsumexp(3, 5, rng), random_logistic(3, 25, rng)):
            tr = run_gd(o, o.x_star + rng.standard_normal(3), bullet[20])
            q = q_report(tr)
            assert q.ok, q.max_entry

    def test_detects_nonconvex_function(self):
        # f = -x^2/2 + x^4/4 is not convex; Q must go positive somewhere
        def fg(x):
            t = float(x[0])
            return -0.5 * t * t + 0.25 * t**4, np.array([-t + t**3])

        o = FunctionOracle(fg, 4.0, 1, np.array([1.0]), -0.25)
        q = q_report(run_gd(o, [0.2], [1.0, 1.0, 1.0]))
        assert not q.ok

    def test_missing_minimizer(self):
        o = FunctionOracle(lambda x: (0.0, 0 * x), 1.0, 1)
        with pytest.raises(CapabilityError):
            q_report(run_gd(o, [1.0], [1.0]))


class TestTightness:
    def test_one_step_objective(self):
        a, b = tightness_objective(Schedule.of([1.5], "dominant"))
        assert a == pytest.approx(0.125, rel=1e-14)
        assert b == 0.125

    def test_one_step_gradient(self):
        a, b = tightness_gradient(Schedule.of([1.5], "gbounded"))
        assert a == pytest.approx(0.08, rel=1e-14)
        assert b == pytest.approx(0.25 * 0.32, rel=1e-14)

    def test_empty_schedule(self):
        a, b = tightness_objective(empty())
        assert a == 0.5 and b == 0.5

    def test_table_values_through_worst_case(self, fam64):
        _, bullet, tri = fam64
        a, _ = tightness_objective(bullet[3])
        assert a == pytest.approx(0.085786 * 0.5, abs=1e-6)
        a, _ = tightness_gradient(tri[2])
        f0 = huber_oracle(HuberSpec(tri[2].total + 1))([1.0])[0]
        assert a / f0 == pytest.approx(0.131892, abs=1e-6)
        a, _ = tightness_gradient(rotaru(2))
        f0 = huber_oracle(HuberSpec(rotaru(2).total + 1))([1.0])[0]
        assert a / f0 == pytest.approx(0.133975, abs=1e-6)

    @pytest.mark.parametrize("h", [teboulle_vaisbourd(25), silver(5), grimmer_recursion(5), rotaru(25)], ids=["tv", "silver", "grimmer", "rotaru"])
    def test_baselines_are_tight(self, h):
        a, b = tightness(h)
        assert a == pytest.approx(b, rel=1e-10)

    def test_gap_raises(self, monkeypatch):
        import stepcat.gd as gd

        monkeypatch.setattr(gd, "objective_bound", lambda h: 0.9 / (2 * h.total + 1))
        with pytest.raises(TightnessError):
            gd.tightness_objective(Schedule.of([1.5], "dominant"))

    def test_mislabelled_schedule_fails_bound_on_quadratic(self):
        # the Huber run is tight for any steps; misuse shows up on other functions
        h = Schedule.of([1.9], "dominant")
        tightness_objective(h)
        tr = run_gd(scalar_quadratic(), [1.0], h)
        assert objective_slack(tr, h) < -0.1

    def test_unclassified_rejected(self):
        with pytest.raises(ClassificationError):
            tightness(Schedule.of([1.0]))


class TestDominance:
    def test_worst_case_slack_is_zero(self):
        h = Schedule.of([1.5], "dominant")
        tr = run_gd(huber_oracle(HuberSpec(4.0)), [1.0], h)
        assert -1e-10 <= dominance_check(tr, h, [2.0, 2.0]) <= 1e-8

    def test_certificates_on_quadratic(self, fam64):
        rng = np.random.default_rng(5)
        o = random_quadratic(4, rng)
        circ, bullet, _ = fam64
        for n in (1, 4, 9, 30):
            tr = run_gd(o, rng.standard_normal(4), bullet[n])
            u = certificate_dominant(bullet[n])
            assert dominance_check(tr, bullet[n], u) >= -1e-9 * dominance_scale(tr, u)

    def test_primitive_sqrt2_on_logistic(self):
        rng = np.random.default_rng(6)
        o = random_logistic(3, 30, rng)
        h = Schedule.of([SQRT2], "primitive")
        tr = run_gd(o, rng.standard_normal(3), h)
        u = certificate_primitive(h)
        assert dominance_check(tr, h, u) >= -1e-9 * dominance_scale(tr, u)

    def test_wrong_certificate_falsified(self):
        h = Schedule.of([1.5], "dominant")
        tr = run_gd(quadratic_oracle(np.diag([1.0, 0.1])), [1.0, 1.0], h)
        assert dominance_check(tr, h, [2.0, 2.0]) >= 0
        assert dominance_check(tr, h, [1.0, 3.0]) < -1.0

    def test_shape_error(self):
        h = Schedule.of([1.5], "dominant")
        tr = run_gd(scalar_quadratic(), [1.0], h)
        with pytest.raises(ValueError):
            dominance_check(tr, h, [1.0, 1.0, 1.0])


def test_slacks_on_random_instances(fam64):
    rng = np.random.default_rng(8)
    _, bullet, tri = fam64
    o = random_logsumexp(4, 6, rng)
    x0 = o.x_star + rng.standard_normal(4)
    for n in (2, 11, 64):
        assert objective_slack(run_gd(o, x0, bullet[n]), bullet[n]) >= -1e-9
        assert gradient_slack(run_gd(o, x0, tri[n]), tri[n]) >= -1e-9
