import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import complex_gaussian
from relaysec.errors import InvalidInputError
from relaysec.pencil import (PencilSpec, brute_force_oracle, canonical_phase, gram_invariants,
                             null_projector_apply, pencil_eig_grid, pencil_eigmax,
                             rayleigh_quotient)


def dense_matrices(spec):
    m = spec.m
    eye = np.eye(m)
    num = spec.n0 * eye + spec.a * np.outer(spec.h, spec.h.conj())
    den = spec.n0 * eye + spec.b * np.outer(spec.z, spec.z.conj())
    return num, den


def dense_lambda(spec):
    num, den = dense_matrices(spec)
    return scipy.linalg.eigh(num, den, eigvals_only=True)[-1]


def random_spec(rng, m, a, b, n0=1.0):
    return PencilSpec(complex_gaussian(rng, m), complex_gaussian(rng, m), a, b, n0)


# -- rayleigh_quotient ------------------------------------------------------

def test_quotient_orthogonal_example():
    spec = PencilSpec([1, 0], [0, 1], 1.0, 1.0, 1.0)
    assert rayleigh_quotient([1, 0], spec) == 2.0


def test_quotient_matches_dense_evaluation(rng):
    spec = random_spec(rng, 3, 0.7, 1.9, 1.3)
    num, den = dense_matrices(spec)
    for _ in range(20):
        w = complex_gaussian(rng, 3)
        expected = (np.vdot(w, num @ w) / np.vdot(w, den @ w)).real
        assert rayleigh_quotient(w, spec) == pytest.approx(expected, rel=1e-12)


def test_quotient_scale_invariant(rng):
    spec = random_spec(rng, 4, 2.0, 0.5)
    w = complex_gaussian(rng, 4)
    for c in (3.0, -0.2j, 1e-7 + 4e-7j):
        assert rayleigh_quotient(c * w, spec) == pytest.approx(rayleigh_quotient(w, spec), rel=1e-13)


def test_quotient_rejects_zero_and_mismatch():
    spec = PencilSpec([1, 0], [0, 1], 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        rayleigh_quotient([0, 0], spec)
    with pytest.raises(InvalidInputError):
        rayleigh_quotient([1, 0, 0], spec)


@pytest.mark.parametrize("kwargs", [dict(n0=0.0), dict(a=-1.0), dict(b=np.nan)])
def test_spec_validation(kwargs):
    args = dict(h=[1, 0], z=[0, 1], a=1.0, b=1.0, n0=1.0)
    args.update(kwargs)
    with pytest.raises(InvalidInputError):
        PencilSpec(**args)


def test_spec_length_mismatch():
    with pytest.raises(InvalidInputError):
        PencilSpec([1, 0], [1], 1.0, 1.0)


# -- pencil_eigmax ----------------------------------------------------------

def test_eigmax_orthogonal_example():
    res = pencil_eigmax(PencilSpec([1, 0], [0, 1], 1.0, 1.0, 1.0))
    assert res.lambda_max == 2.0
    np.testing.assert_allclose(res.eigvec, [1, 0], atol=1e-15)


def test_eigmax_equal_channels(rng):
    h = complex_gaussian(rng, 4)
    res = pencil_eigmax(PencilSpec(h, h.copy(), 0.8, 0.8))
    assert res.lambda_max == 1.0


def test_eigmax_zero_a_gives_witness_orthogonal_to_z(rng):
    spec = random_spec(rng, 3, 0.0, 2.0)
    res = pencil_eigmax(spec)
    assert res.lambda_max == 1.0
    assert abs(np.vdot(spec.z, res.eigvec)) <= 1e-12 * np.linalg.norm(spec.z)
    assert np.linalg.norm(res.eigvec) == pytest.approx(1.0, abs=1e-15)


def test_eigmax_both_terms_zero():
    res = pencil_eigmax(PencilSpec([1, 2], [0, 1], 0.0, 0.0))
    assert res.lambda_max == 1.0


def test_seeded_m3_instance_against_oracle():
    rng = np.random.default_rng(2024)
    spec = random_spec(rng, 3, 0.5, 0.5)
    lam = pencil_eigmax(spec).lambda_max
    oracle = brute_force_oracle(spec, 100_000, seed=1)
    assert oracle <= lam + 1e-9
    assert (lam - oracle) / lam <= 0.01


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
def test_eigmax_matches_dense_solver(m):
    rng = np.random.default_rng(m)
    for a in (0.1, 1.0, 10.0):
        for b in (0.1, 1.0, 10.0):
            spec = random_spec(rng, m, a, b, n0=0.7)
            res = pencil_eigmax(spec)
            assert res.lambda_max == pytest.approx(dense_lambda(spec), rel=1e-9)
            assert rayleigh_quotient(res.eigvec, spec) == pytest.approx(res.lambda_max, rel=1e-9)


def test_eigvec_phase_is_canonical(rng):
    res = pencil_eigmax(random_spec(rng, 5, 1.0, 1.0))
    k = np.argmax(np.abs(res.eigvec))
    assert res.eigvec[k].imag == 0.0 and res.eigvec[k].real > 0


def test_canonical_phase_zero_vector():
    np.testing.assert_array_equal(canonical_phase(np.zeros(3)), np.zeros(3))


def test_near_parallel_channels_use_closed_form(rng):
    h = complex_gaussian(rng, 4)
    z = (0.5 - 0.3j) * h * (1 + 1e-15)
    assert gram_invariants(h, z)[3] == 0.0
    spec = PencilSpec(h, z, 2.0, 1.0)
    res = pencil_eigmax(spec)
    # along h: (1 + a|h|^2) / (1 + b|z|^2 |h|^2/|h|^2) when that exceeds 1
    hh = np.vdot(h, h).real
    zz = np.vdot(z, z).real
    assert res.lambda_max == pytest.approx(max(1.0, (1 + 2 * hh) / (1 + zz)), rel=1e-12)


def test_grid_matches_scalar(rng):
    spec = random_spec(rng, 4, 1.0, 1.0)
    a = np.linspace(0, 3, 7)
    b = np.linspace(3, 0, 7)
    mu, vecs = pencil_eig_grid(spec.h, spec.z, a, b)
    for k in range(7):
        single = pencil_eigmax(PencilSpec(spec.h, spec.z, a[k], b[k]))
        assert mu[k] == single.excess
        np.testing.assert_array_equal(vecs[k], single.eigvec)


def test_swap_symmetry_both_at_least_one(rng):
    for _ in range(20):
        spec = random_spec(rng, 3, rng.uniform(0, 5), rng.uniform(0, 5))
        assert pencil_eigmax(spec).lambda_max >= 1.0
        assert pencil_eigmax(spec.swapped()).lambda_max >= 1.0


def test_single_relay_ratio_can_drop_below_one():
    res = pencil_eigmax(PencilSpec([1.0], [2.0], 1.0, 1.0))
    assert res.lambda_max == pytest.approx(2.0 / 5.0)


# -- brute_force_oracle -----------------------------------------------------

def test_oracle_orthogonal_example():
    spec = PencilSpec([1, 0], [0, 1], 1.0, 1.0, 1.0)
    value = brute_force_oracle(spec, 100_000, seed=0)
    assert 1.98 <= value <= 2.0


@pytest.mark.parametrize("mode", ["span", "full"])
def test_oracle_other_modes_orthogonal_example(mode):
    spec = PencilSpec([1, 0], [0, 1], 1.0, 1.0, 1.0)
    assert 1.98 <= brute_force_oracle(spec, 100_000, seed=0, subspace=mode) <= 2.0


def test_oracle_single_trial_orthogonal_direction_is_one(rng):
    spec = random_spec(rng, 3, 1.0, 1.0)
    assert brute_force_oracle(spec, 1) == 1.0


@pytest.mark.parametrize("subspace", ["whitened", "span", "full"])
def test_oracle_running_maximum(rng, subspace):
    spec = random_spec(rng, 3, 1.0, 1.0)
    small = brute_force_oracle(spec, 100, seed=5, subspace=subspace)
    large = brute_force_oracle(spec, 100_000, seed=5, subspace=subspace)
    assert large >= small


def test_oracle_rejects_bad_arguments(rng):
    spec = random_spec(rng, 2, 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        brute_force_oracle(spec, 0)
    with pytest.raises(InvalidInputError):
        brute_force_oracle(spec, 10, subspace="cube")


def test_oracle_bounded_by_eigmax_many_specs():
    rng = np.random.default_rng(99)
    for i in range(120):
        m = (2, 3, 5)[i % 3]
        spec = random_spec(rng, m, rng.choice([0.1, 1.0, 10.0]), rng.choice([0.1, 1.0, 10.0]))
        lam = pencil_eigmax(spec).lambda_max
        for mode in ("whitened", "span", "full"):
            assert brute_force_oracle(spec, 2000, seed=i, subspace=mode) <= lam + 1e-9


# -- null_projector_apply ---------------------------------------------------

def test_projector_examples(rng):
    np.testing.assert_array_equal(null_projector_apply([1, 0, 0], [1, 1, 0]), [0, 1, 0])
    v = complex_gaussian(rng, 4)
    np.testing.assert_allclose(null_projector_apply(v, v), 0, atol=1e-14)
    x = null_projector_apply(v, complex_gaussian(rng, 4))
    np.testing.assert_allclose(null_projector_apply(v, x), x, rtol=1e-12, atol=1e-14)


def test_projector_errors():
    with pytest.raises(InvalidInputError):
        null_projector_apply([0, 0], [1, 0])
    with pytest.raises(InvalidInputError):
        null_projector_apply([1, 0], [1, 0, 0])


@pytest.mark.parametrize("m", [2, 3, 6])
def test_projector_equals_orthonormal_basis_form(m):
    rng = np.random.default_rng(m)
    v = complex_gaussian(rng, m)
    basis = scipy.linalg.null_space(v.conj()[None, :])  # m x (m-1)
    assert basis.shape == (m, m - 1)
    x = complex_gaussian(rng, m)
    np.testing.assert_allclose(null_projector_apply(v, x), basis @ (basis.conj().T @ x),
                               rtol=1e-12, atol=1e-12)


cvec = st.integers(2, 6).flatmap(lambda m: st.tuples(
    st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
             min_size=m, max_size=m),
    st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
             min_size=m, max_size=m),
))
coef = st.floats(min_value=0.0, max_value=100.0)


@settings(max_examples=300, deadline=None)
@given(cvec, coef, coef, st.floats(min_value=1e-2, max_value=10.0))
def test_eigmax_properties(vectors, a, b, n0):
    h, z = (np.array(v, dtype=complex) for v in vectors)
    spec = PencilSpec(h, z, a, b, n0)
    res = pencil_eigmax(spec)
    assert res.lambda_max >= 1.0
    assert np.linalg.norm(res.eigvec) == pytest.approx(1.0, abs=1e-12)
    assert rayleigh_quotient(res.eigvec, spec) == pytest.approx(res.lambda_max, rel=1e-9)
    # the dense generalized solver loses accuracy with the condition number of
    # the denominator matrix; the closed form does not
    cond = 1.0 + b * np.vdot(z, z).real / n0
    assert res.lambda_max == pytest.approx(dense_lambda(spec), rel=1e-10 * cond + 1e-9)


@settings(max_examples=200, deadline=None)
@given(cvec)
def test_projector_properties(vectors):
    v, x = (np.array(u, dtype=complex) for u in vectors)
    if not np.any(v):
        return
    p = null_projector_apply(v, x)
    # norms from max-abs entries: np.linalg.norm underflows for tiny inputs
    nx, nv = np.max(np.abs(x)) * len(x), np.max(np.abs(v)) * len(v)
    vn = v.real / nv + 1j * (v.imag / nv)  # part-wise: complex division overflows here
    assert abs(np.vdot(vn, p)) <= 1e-12 * nx
    np.testing.assert_allclose(null_projector_apply(v, p), p, rtol=1e-12, atol=1e-12 * nx)


@pytest.mark.parametrize("scale", [2.0 ** -400, 2.0 ** 300])
def test_scale_invariance_exact(scale):
    # (h, a) -> (c h, a / c^2) leaves the pencil unchanged; powers of two are exact
    h = np.array([0.3 + 1j, 1, -2j], dtype=complex)
    z = np.array([1, 0.5j, 1], dtype=complex)
    a, b = np.array([0.5, 3.0]), np.array([0.25, 7.0])
    mu, vec = pencil_eig_grid(h, z, a, b)
    mu_s, vec_s = pencil_eig_grid(scale * h, scale * z, a / scale ** 2, b / scale ** 2)
    np.testing.assert_array_equal(mu_s, mu)
    np.testing.assert_array_equal(vec_s, vec)


@pytest.mark.parametrize("tiny", [5e-324, 2.2e-311])
def test_subnormal_channels_give_unit_vectors(tiny):
    h = np.array([0, tiny], dtype=complex)
    z = np.array([0, 0], dtype=complex)
    for a in (0.0, 1.0, 1e300):
        mu, vec = pencil_eig_grid(h, z, a, 0.0)
        assert mu[0] >= 0.0
        assert np.linalg.norm(vec[0]) == pytest.approx(1.0, abs=1e-12)


def test_tiny_excess_keeps_direction():
    h = np.array([0, 1, 1], dtype=complex)
    z = np.array([0, 0, 1], dtype=complex)
    for a in (5e-324, 1e-300):
        mu, vec = pencil_eig_grid(h, z, a, 0.0)
        assert mu[0] == 2.0 * a
        np.testing.assert_allclose(vec[0], h / np.sqrt(2.0), atol=1e-15)


def test_projector_subnormal_vector():
    v = np.array([0, 5e-324], dtype=complex)
    x = np.array([1.0, 2.0], dtype=complex)
    np.testing.assert_array_equal(null_projector_apply(v, x), [1.0, 0.0])
