import numpy as np
import pytest

from stconal.ensemble import (StudentEnsemble, build_teacher, build_teacher_ema,
                              build_teacher_ewa)
from stconal.exceptions import InvalidInputError
from stconal.model import MlpSpec, Model

SPEC = MlpSpec((2, 3, 2))


def students(rng, q):
    return [Model(SPEC, rng.normal(size=SPEC.n_params)) for _ in range(q)]


def ensemble(ms):
    return StudentEnsemble(SPEC, ms)


class TestEWA:
    def test_single_student(self, rng):
        (s,) = students(rng, 1)
        t = build_teacher_ewa(ensemble([s]))
        np.testing.assert_array_equal(t.model.weights, s.weights)
        assert t.construction == "ewa"

    def test_identical_students(self, rng):
        (s,) = students(rng, 1)
        t = build_teacher_ewa(ensemble([s, s, s]))
        np.testing.assert_allclose(t.model.weights, s.weights, atol=1e-15)

    def test_midpoint(self, rng):
        w = rng.normal(size=SPEC.n_params)
        d = rng.normal(size=SPEC.n_params)
        t = build_teacher_ewa(ensemble([Model(SPEC, w), Model(SPEC, w + 2 * d)]))
        np.testing.assert_allclose(t.model.weights, w + d, atol=1e-14)

    def test_permutation_invariant_bitwise(self, rng):
        ms = students(rng, 4)
        a = build_teacher_ewa(ensemble(ms)).model.weights
        b = build_teacher_ewa(ensemble(ms[::-1])).model.weights
        c = build_teacher_ewa(ensemble([ms[2], ms[0], ms[3], ms[1]])).model.weights
        assert a.tobytes() == b.tobytes() == c.tobytes()

    def test_convex_hull(self, rng):
        ms = students(rng, 5)
        W = np.stack([m.weights for m in ms])
        t = build_teacher_ewa(ensemble(ms)).model.weights
        assert np.all(W.min(axis=0) <= t) and np.all(t <= W.max(axis=0))


class TestEMA:
    def test_alpha_zero_is_latest(self, rng):
        ms = students(rng, 4)
        t = build_teacher_ema(ensemble(ms), 0.0)
        assert t.model.weights.tobytes() == ms[-1].weights.tobytes()
        assert t.construction == "ema" and t.alpha == 0.0

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 0.99, 1.0])
    def test_fixed_point(self, rng, alpha):
        (s,) = students(rng, 1)
        t = build_teacher_ema(ensemble([s, s, s]), alpha)
        np.testing.assert_allclose(t.model.weights, s.weights, atol=1e-15)

    def test_one_fold_step(self):
        spec = MlpSpec((1, 2))
        a = Model(spec, np.zeros(4))
        b = Model(spec, np.full(4, 4.0))
        t = build_teacher_ema(StudentEnsemble(spec, [a, b]), 0.5)
        np.testing.assert_allclose(t.model.weights, np.full(4, 2.0))

    def test_order_matters(self):
        spec = MlpSpec((1, 2))
        ms = [Model(spec, np.full(4, v)) for v in (0.0, 1.0, 5.0)]
        fwd = build_teacher_ema(StudentEnsemble(spec, ms), 0.5).model.weights
        rev = build_teacher_ema(StudentEnsemble(spec, ms[::-1]), 0.5).model.weights
        assert not np.array_equal(fwd, rev)

    def test_alpha_range(self, rng):
        with pytest.raises(InvalidInputError):
            build_teacher_ema(ensemble(students(rng, 2)), 1.5)


def test_empty_ensemble_rejected():
    with pytest.raises(InvalidInputError):
        StudentEnsemble(SPEC, [])


def test_mismatched_specs_rejected(rng):
    other = Model(MlpSpec((2, 2)), np.zeros(6))
    with pytest.raises(InvalidInputError):
        StudentEnsemble(SPEC, students(rng, 1) + [other])


def test_dispatch(rng):
    e = ensemble(students(rng, 3))
    assert build_teacher(e, "ewa").construction == "ewa"
    assert build_teacher(e, "ema", 0.9).alpha == 0.9
    with pytest.raises(InvalidInputError):
        build_teacher(e, "median")
