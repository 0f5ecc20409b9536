import numpy as np
import pytest
from hypothesis import given, strategies as st

from csmaint.analytic import InterferenceLaw
from csmaint.stats import (EmpiricalSample, EmptySampleError, empirical_cdf, ks_distance, ks_to_law,
                           log_histogram_pdf, lognormal_ks, merge)

values = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=30)


def weighted(draw_values, draw_weights):
    return EmpiricalSample(np.array(draw_values), np.array(draw_weights))


samples = st.integers(1, 30).flatmap(lambda n: st.tuples(
    st.lists(st.floats(0, 100, allow_nan=False), min_size=n, max_size=n),
    st.lists(st.floats(0.01, 50), min_size=n, max_size=n))).map(lambda vw: weighted(*vw))


def test_single_observation():
    cdf = empirical_cdf(EmpiricalSample([2.0], [7.0]))
    assert cdf(1.999) == 0.0 and cdf(2.0) == 1.0


def test_two_equal_weights():
    cdf = empirical_cdf(EmpiricalSample.unit([1.0, 3.0]))
    np.testing.assert_array_equal(cdf.cum, [0.5, 1.0])


def test_unequal_weights():
    cdf = empirical_cdf(EmpiricalSample([1.0, 3.0], [1.0, 3.0]))
    np.testing.assert_array_equal(cdf.cum, [0.25, 1.0])


def test_validation():
    with pytest.raises(EmptySampleError):
        EmpiricalSample.unit([])
    with pytest.raises(ValueError):
        EmpiricalSample([1.0], [0.0])
    with pytest.raises(ValueError):
        EmpiricalSample([np.nan], [1.0])


def test_ks_point_masses():
    a, b = EmpiricalSample.unit([1.0]), EmpiricalSample.unit([2.0])
    assert ks_distance(a, a) == 0.0
    assert ks_distance(a, b) == 1.0


def test_ks_to_law_uses_both_sides_of_steps():
    law = InterferenceLaw(5e-5, 1e-3)
    one = EmpiricalSample.unit([law.median()])
    assert ks_distance(one, law) == pytest.approx(0.5, abs=1e-12)


def test_ks_to_law_on_exact_quantiles():
    law = InterferenceLaw(5e-5, 1e-3)
    n = 1000
    s = EmpiricalSample.unit(law.quantile((np.arange(n) + 0.5) / n))
    assert ks_distance(s, law) == pytest.approx(0.5 / n, rel=1e-6)


def test_atom_split():
    law = InterferenceLaw(5e-5, 1e-3)
    s = EmpiricalSample([0.0, law.median()], [3.0, 1.0])
    ks, atom = ks_to_law(s, law)
    assert atom == 0.75 and ks == pytest.approx(0.5, abs=1e-12)
    assert ks_to_law(EmpiricalSample.unit([0.0]), law) == (1.0, 1.0)


@given(samples, st.randoms(use_true_random=False), st.floats(0.01, 100))
def test_cdf_invariant_to_order_and_scale(s, rnd, k):
    perm = list(range(len(s)))
    rnd.shuffle(perm)
    other = EmpiricalSample(s.values[perm], s.weights[perm] * k)
    a, b = empirical_cdf(s), empirical_cdf(other)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_allclose(a.cum, b.cum, rtol=1e-12)
    assert np.all(np.diff(a.cum) >= 0) and a.cum[-1] == 1.0


@given(samples, samples, samples)
def test_ks_is_a_metric(a, b, c):
    ab, ba = ks_distance(a, b), ks_distance(b, a)
    assert ab == ba and 0 <= ab <= 1
    assert ks_distance(a, c) <= ab + ks_distance(b, c) + 1e-12


@given(samples, samples)
def test_merge_is_order_free(a, b):
    m1, m2 = merge(a, b), merge(b, a)
    np.testing.assert_array_equal(m1.values, m2.values)
    np.testing.assert_array_equal(m1.weights, m2.weights)


def test_histogram_single_bin():
    h = log_histogram_pdf(EmpiricalSample.unit([2.0, 3.0]), 1, (1.0, 10.0))
    assert h.density[0] == pytest.approx(1 / 9)


def test_histogram_atom_and_normalisation():
    s = EmpiricalSample([0.0, 1e-10, 3e-9], [2.0, 1.0, 1.0])
    h = log_histogram_pdf(s, 10)
    assert h.atom_mass == 0.5
    assert float(np.sum(h.density * np.diff(h.edges))) == pytest.approx(0.5)


def test_histogram_log_uniform_is_flat():
    rng = np.random.default_rng(4)
    x = 10 ** rng.uniform(-12, -8, 200_000)
    h = log_histogram_pdf(EmpiricalSample.unit(x), 5, (1e-12, 1e-8))
    mass = h.mass
    assert np.all(np.abs(mass / mass.mean() - 1) < 0.05)


def test_lognormal_is_a_poor_fit():
    assert lognormal_ks(InterferenceLaw(5e-5, 1e-3)) >= 0.05


def test_csv_roundtrip(tmp_path):
    s = EmpiricalSample([0.0, 1.5e-11, 3e-9], [2.0, 1.0, 0.5])
    s.to_csv(tmp_path / "s.csv")
    back = EmpiricalSample.from_csv(tmp_path / "s.csv")
    np.testing.assert_array_equal(back.values, s.values)
    np.testing.assert_array_equal(back.weights, s.weights)
