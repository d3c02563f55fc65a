from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from linestab.polyid import (
    IdentitySpec,
    as_exact,
    check_identity,
    exact_h2_h4,
    exact_hessian_at_pole,
    exact_lifted_sigma,
    identity_catalog,
    schwartz_zippel_suite,
)


def spec_by_id(identifier):
    return {s.identifier: s for s in identity_catalog()}[identifier]


class TestExactScalar:
    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            as_exact(0.5)

    def test_accepted_forms(self):
        assert as_exact(3) == Fraction(3)
        assert as_exact("2/7") == Fraction(2, 7)
        assert as_exact(Fraction(1, 3)) == Fraction(1, 3)


class TestCatalog:
    def test_six_identities(self):
        cat = identity_catalog()
        assert len(cat) == 6
        assert len({s.identifier for s in cat}) == 6

    def test_beta_sum_symmetric_point(self):
        v = check_identity(
            spec_by_id("beta-product-sum"),
            {"q": (Fraction(1), Fraction(1), Fraction(1))},
        )
        assert v.equal
        assert v.lhs == Fraction(27, 64)

    def test_vertex_factorization_symmetric_point(self):
        v = check_identity(
            spec_by_id("vertex-factorization"),
            {"q": (Fraction(1), Fraction(1), Fraction(1))},
        )
        assert v.equal
        assert v.lhs == Fraction(3, 4)

    def test_symmetric_plane_value(self):
        for q in (Fraction(1), Fraction(2, 3), Fraction(17, 5)):
            v = check_identity(spec_by_id("symmetric-plane-value"), {"q": q})
            assert v.equal
            assert v.rhs == Fraction(15, 8)

    def test_area_lemma_equilateral_centroid(self):
        asg = {
            "a": Fraction(1),
            "b": Fraction(1, 2),
            "c": Fraction(1),  # rational stand-in; identity holds for any c
            "p": (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
        }
        v = check_identity(spec_by_id("area-q-lemma"), asg)
        assert v.equal
        assert v.lhs == Fraction(1)

    def test_master_identity_random_rationals(self, rng):
        spec = spec_by_id("master-hessian-decomposition")
        r = np.random.default_rng(7)
        for _ in range(5):
            asg = spec.sampler(r, 100)
            v = check_identity(spec, asg)
            assert v.equal, v

    def test_domain_violation_rejected(self):
        with pytest.raises(ValueError, match="domain"):
            check_identity(
                spec_by_id("beta-product-sum"),
                {"q": (Fraction(1), Fraction(1), Fraction(5))},
            )


class TestMutationSensitivity:
    def test_each_identity_catches_a_mutated_rhs(self):
        r = np.random.default_rng(11)
        for spec in identity_catalog():
            mutated = replace(
                spec, rhs=lambda asg, s=spec: _perturb(s.rhs(asg))
            )
            caught = False
            for _ in range(8):
                asg = spec.sampler(r, 60)
                if not check_identity(mutated, asg).equal:
                    caught = True
                    break
            assert caught, spec.identifier

    def test_vertex_coefficient_three_to_two(self):
        spec = spec_by_id("vertex-factorization")

        def bad_rhs(asg):
            q = [as_exact(v) for v in asg["q"]]
            prod = Fraction(1)
            for k in range(3):
                i, j = (k + 1) % 3, (k + 2) % 3
                prod *= (q[i] + q[j] - q[k]) ** 2
            return 2 * prod / (4 * (q[0] * q[1] * q[2]) ** 2)  # 3 -> 2

        mutated = replace(spec, rhs=bad_rhs)
        v = check_identity(mutated, {"q": (Fraction(1), Fraction(1), Fraction(1))})
        assert not v.equal
        assert v.lhs == Fraction(3, 4) and v.rhs == Fraction(1, 2)


def _perturb(value):
    if isinstance(value, tuple):
        return tuple(_perturb(v) for v in value)
    return value * Fraction(101, 100) + Fraction(1, 997)


class TestSuite:
    def test_small_suite_passes(self):
        rep = schwartz_zippel_suite(trials=5, height=200, seed=42)
        assert rep.passed
        for r in rep.identities:
            assert r.passes == 5
            assert r.witness is None
            assert 0 < r.failure_bound < 1

    def test_single_trial_smoke(self):
        rep = schwartz_zippel_suite(trials=1, height=50, seed=0)
        assert rep.passed

    def test_deterministic_reports(self):
        a = schwartz_zippel_suite(trials=3, height=100, seed=9)
        b = schwartz_zippel_suite(trials=3, height=100, seed=9)
        assert a.to_json_dict() == b.to_json_dict()

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError):
            schwartz_zippel_suite(trials=0)


class TestCrossModuleConsistency:
    def test_exact_sigma_matches_float_evaluation(self):
        # the exact coefficient expansion at rational parameters agrees with
        # the floating Cayley-determinant evaluation of the lifted triple
        from linestab.flexprobe import LiftedConfig
        from linestab.sextic import eval_sigma

        r = np.random.default_rng(3)
        for _ in range(5):
            a = Fraction(int(r.integers(1, 30)), int(r.integers(1, 30)))
            b = Fraction(int(r.integers(-20, 20)), int(r.integers(1, 30)))
            c = Fraction(int(r.integers(1, 30)), int(r.integers(1, 30)))
            p = tuple(Fraction(int(r.integers(1, 20)), int(r.integers(1, 20))) for _ in range(3))
            x = tuple(Fraction(int(r.integers(-15, 15)), int(r.integers(1, 15))) for _ in range(3))
            sig = exact_lifted_sigma(a, b, c, p, x)
            u = (Fraction(1, 3), Fraction(-2, 5), Fraction(1))
            exact_val = sig(*u)
            cfg = LiftedConfig(
                a=float(a), b=float(b), c=float(c),
                weights=np.array([float(v) for v in p]),
                lifts=np.array([float(v) for v in x]),
            )
            approx = eval_sigma(cfg.lifted_triple(), np.array([float(v) for v in u]))
            assert abs(approx - float(exact_val)) <= 1e-12 * max(abs(float(exact_val)), 1.0)

    def test_exact_hessian_matches_prefactored_split(self):
        a, b, c = Fraction(3, 2), Fraction(1, 4), Fraction(5, 6)
        p = (Fraction(1, 5), Fraction(2, 5), Fraction(2, 5))
        x = (Fraction(1, 2), Fraction(-1, 3), Fraction(3, 4))
        H = exact_hessian_at_pole(a, b, c, p, x)
        H2, H4 = exact_h2_h4(a, b, c, p, x)
        assert H == Fraction(102400) * a ** 6 * c ** 6 * (H2 + H4)
