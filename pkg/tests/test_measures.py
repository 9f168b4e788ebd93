import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import rand_measure_pair
from leftdecomp import (
    AtomicMeasure,
    NonnegativeForm,
    classify_left,
    induced_form,
    is_singular,
    lebesgue_decompose_measure,
    left_decompose_default,
    pair_check,
    radon_nikodym,
    total_variation,
)
from leftdecomp.errors import InvalidInputError, ValidationError
from leftdecomp.measures import is_abs_continuous_measure, is_singular_measure

ATOMS = ["x", "y", "z"]
MU = AtomicMeasure(ATOMS, [1 + 1j, 2, 0])
NU = AtomicMeasure(ATOMS, [1, 0, 3])


def weights(m):
    return list(m.weights)


class TestAtomicMeasure:
    def test_duplicate_labels(self):
        with pytest.raises(InvalidInputError):
            AtomicMeasure(["a", "a"], [1, 2])

    def test_length_mismatch(self):
        with pytest.raises(InvalidInputError):
            AtomicMeasure(["a", "b"], [1])

    def test_non_finite(self):
        with pytest.raises(InvalidInputError):
            AtomicMeasure(["a"], [np.inf])

    def test_set_function(self):
        assert MU(["x", "y"]) == 3 + 1j
        assert MU([]) == 0


class TestLebesgueDecomposeMeasure:
    def test_example(self):
        d = lebesgue_decompose_measure(MU, NU)
        assert weights(d.mu_a) == [1 + 1j, 0, 0]
        assert weights(d.mu_s) == [0, 2, 0]
        assert d.support == ("x", "z")

    def test_positive_nu(self):
        d = lebesgue_decompose_measure(MU, AtomicMeasure(ATOMS, [1, 2, 3]))
        assert weights(d.mu_a) == weights(MU) and not np.any(d.mu_s.weights)

    def test_zero_nu(self):
        d = lebesgue_decompose_measure(MU, AtomicMeasure(ATOMS, [0, 0, 0]))
        assert not np.any(d.mu_a.weights) and weights(d.mu_s) == weights(MU)

    def test_mismatched_atoms(self):
        with pytest.raises(InvalidInputError):
            lebesgue_decompose_measure(MU, AtomicMeasure(["x", "y", "w"], [1, 1, 1]))

    @pytest.mark.parametrize("bad", [[1, -1, 0], [1, 1j, 0]])
    def test_nu_must_be_nonnegative(self, bad):
        with pytest.raises(ValidationError):
            lebesgue_decompose_measure(MU, AtomicMeasure(ATOMS, bad))


class TestRadonNikodym:
    def test_example(self):
        assert radon_nikodym(MU, NU) == {"x": 1 + 1j, "z": 0}

    def test_self(self):
        h = radon_nikodym(NU, NU)
        assert h == {"x": 1, "z": 1}

    def test_singular(self):
        mu = AtomicMeasure(ATOMS, [0, 5j, 0])
        assert set(radon_nikodym(mu, NU).values()) == {0}

    def test_reconstruction(self, rng):
        for _ in range(50):
            mu, nu = rand_measure_pair(rng)
            h = radon_nikodym(mu, nu)
            mu_a = lebesgue_decompose_measure(mu, nu).mu_a.as_dict()
            for atom, density in h.items():
                assert density * nu.as_dict()[atom] == pytest.approx(mu_a[atom], rel=4 * np.finfo(float).eps)


class TestTotalVariation:
    def test_example(self):
        tv = total_variation(AtomicMeasure(ATOMS, [1 + 1j, -2, 0]))
        assert np.allclose(tv.weights, [np.sqrt(2), 2, 0])

    def test_nonnegative_fixed(self):
        assert weights(total_variation(NU)) == weights(NU)

    def test_zero(self):
        assert not np.any(total_variation(AtomicMeasure(ATOMS, [0, 0, 0])).weights)


class TestInducedForm:
    def test_complex(self):
        t = induced_form(AtomicMeasure(["a", "b"], [1 + 1j, 2]))
        assert np.array_equal(t.matrix, np.diag([1 + 1j, 2]))
        assert not isinstance(t, NonnegativeForm)

    def test_zero(self):
        assert not np.any(induced_form(AtomicMeasure(["a", "b"], [0, 0])).matrix)

    def test_nonnegative(self):
        t = induced_form(NU)
        assert isinstance(t, NonnegativeForm)
        assert np.array_equal(t.matrix, np.diag([1, 0, 3]))

    def test_integral(self, rng):
        # t(phi, psi) = sum phi conj(psi) mu over atoms
        phi, psi = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        assert np.isclose(induced_form(MU)(phi, psi), np.sum(phi * np.conj(psi) * MU.weights))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_correspondence(seed):
    mu, nu = rand_measure_pair(np.random.default_rng(seed))
    t, w = induced_form(mu), induced_form(nu)
    d = lebesgue_decompose_measure(mu, nu)
    assert np.array_equal(d.mu_a.weights + d.mu_s.weights, mu.weights)
    assert is_abs_continuous_measure(d.mu_a, nu) and is_singular_measure(d.mu_s, nu)

    assert classify_left(t, w).left_regular == is_abs_continuous_measure(mu, nu)
    assert is_singular(induced_form(total_variation(mu)), w) == is_singular_measure(mu, nu)

    dec = left_decompose_default(t, w)
    assert np.array_equal(dec.t_lr.matrix, induced_form(d.mu_a).matrix)
    assert np.array_equal(dec.t_ls.matrix, induced_form(d.mu_s).matrix)

    tv = induced_form(total_variation(mu))
    assert pair_check(tv, tv, t).ok
