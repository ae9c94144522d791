import numpy as np
import pytest
from scipy.linalg import expm
from scipy.special import gammaln

from cavityio.fock import (ParityEvaluator, annihilation, coherent_ket, evaluation_dim,
                           number_ket, oracle_wigner, reference_state, squeezed_number_ket,
                           support_size, thermal_populations)
from cavityio.states import StateSpec, wigner_function


def _moments(psi):
    a = annihilation(psi.size).toarray()
    x = (a + a.T) / 2
    p = (a - a.T) / 2j
    ev = lambda op: np.vdot(psi, op @ psi)
    return ev(a.T @ a).real, ev(x @ x).real - ev(x).real ** 2, ev(p @ p).real - ev(p).real ** 2


@pytest.mark.parametrize("n", [0, 1, 3])
def test_squeezed_number_moments(n):
    r = 0.7
    psi = squeezed_number_ket(r, n, 200)
    N, vx, vp = _moments(psi)
    assert N == pytest.approx(n * np.cosh(2 * r) + np.sinh(r) ** 2, rel=1e-12)
    assert vp == pytest.approx((2 * n + 1) * np.exp(-2 * r) / 4, rel=1e-12)
    assert vx == pytest.approx((2 * n + 1) * np.exp(2 * r) / 4, rel=1e-12)


def test_squeeze_axis_swap():
    psi = squeezed_number_ket(0.5, 0, 120, axis="x")
    _, vx, vp = _moments(psi)
    assert vx < 0.25 < vp
    with pytest.raises(ValueError):
        squeezed_number_ket(0.5, 0, 120, axis="z")


def test_against_dense_matrix_exponential():
    dim = 150
    a = annihilation(dim).toarray()
    S = expm(0.5 * 0.4 * (a.T @ a.T - a @ a))
    dense = S @ number_ket(2, dim)
    np.testing.assert_allclose(squeezed_number_ket(0.4, 2, 60), dense[:60], atol=1e-12)


def test_coherent_is_poissonian():
    beta = 1.3 - 0.4j
    psi = coherent_ket(beta, 80)
    k = np.arange(80)
    pk = np.exp(-abs(beta) ** 2 + k * np.log(abs(beta) ** 2) - gammaln(k + 1))
    np.testing.assert_allclose(np.abs(psi) ** 2, pk, atol=1e-14)


def test_truncation_guard():
    with pytest.raises(ValueError, match="tail"):
        squeezed_number_ket(1.5, 5, 20)
    with pytest.raises(ValueError):
        thermal_populations(3.0, 10)


def test_support_size():
    v = np.array([1.0, 1e-3, 1e-13, 0.0, 0.0])
    assert support_size(v, 1e-27) == 3
    assert support_size(v, 1e-24) == 2
    assert support_size(v, 1e-5) == 1


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_parity_at_origin(n):
    ev = ParityEvaluator(evaluation_dim(n + 1, 0.0))
    assert ev.wigner_pure(number_ket(n, n + 1), np.array([0j]))[0] == pytest.approx(
        2 / np.pi * (-1) ** n)


def test_thermal_mixture_at_origin():
    nbar = 0.6
    pops, mixed = reference_state("thermal", nbar=nbar)
    assert mixed and pops.sum() == pytest.approx(1.0, abs=1e-15)
    ev = ParityEvaluator(evaluation_dim(pops.size, 0.0))
    assert ev.wigner_mixed(pops, np.array([0j]))[0] == pytest.approx(2 / np.pi / (2 * nbar + 1))


def test_evaluator_rejects_long_state():
    with pytest.raises(ValueError):
        ParityEvaluator(10).wigner_pure(np.ones(11), np.array([0j]))


@pytest.mark.parametrize("kind,kw,state", [
    ("coherent", dict(beta=1 + 0.5j), StateSpec.coherent(1 + 0.5j)),
    ("squeezed_number", dict(n=2, r=0.5), StateSpec.squeezed_number(0.5, 2)),
    ("squeezed_number", dict(n=1, r=0.5, axis="x"), StateSpec.squeezed_number(0.5, 1, "x")),
])
def test_oracle_matches_closed_form_small(kind, kw, state):
    xs = np.linspace(-3, 3, 21)
    ps = np.linspace(-2.5, 2.5, 17)
    ref = oracle_wigner(kind, xs, ps, **kw)
    X, P = np.meshgrid(xs, ps)
    np.testing.assert_allclose(wigner_function(state, X, P), ref, atol=1e-10)


def test_unknown_reference_kind():
    with pytest.raises(ValueError):
        reference_state("cat")
