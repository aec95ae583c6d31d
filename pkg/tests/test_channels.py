import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densecode.channels import (
    BipartiteChannel,
    KrausChannel,
    PauliSpec,
    apply,
    compose,
    depolarizing_channel,
    depolarizing_spec,
    identity_channel,
    lift,
    one_sided_pauli,
    pauli_channel,
    random_unital_channel,
    two_sided_depolarizing,
    two_sided_pauli,
    verify_covariance,
)
from densecode.errors import ChannelError
from densecode.linalg import DensityMatrix, hermitian_eigenvalues
from densecode.qops import bell_density, random_density_matrix, su_generators, weyl_operator, werner_state


def kraus_sum(ops, rho):
    out = np.zeros_like(rho, dtype=complex)
    for k in ops:
        out += k @ rho @ k.conj().T
    return out


def spectrum(mat):
    return hermitian_eigenvalues(mat).eigenvalues


# --- PauliSpec -------------------------------------------------------------


def test_depolarizing_spec_noiseless():
    q = depolarizing_spec(2, 0.0).q
    assert q[0, 0] == 1.0 and q.sum() == 1.0


def test_depolarizing_spec_d2_p04():
    q = depolarizing_spec(2, 0.4).q
    assert q[0, 0] == pytest.approx(0.7, abs=1e-15)
    np.testing.assert_allclose(q.ravel()[1:], 0.1, atol=1e-15)


def test_depolarizing_spec_d3_sums_to_one():
    q = depolarizing_spec(3, 0.37).q
    assert q.size == 9
    assert abs(q.sum() - 1.0) < 1e-15


@pytest.mark.parametrize("p", [-0.01, 1.01])
def test_depolarizing_spec_rejects_p(p):
    with pytest.raises(ValueError):
        depolarizing_spec(2, p)


@pytest.mark.parametrize("table", [[[0.5, 0.6], [0.0, -0.1]], [[0.5, 0.4], [0.0, 0.0]], [[1.0, 0.0, 0.0]]])
def test_pauli_spec_rejects_invalid(table):
    with pytest.raises(ChannelError):
        PauliSpec(2, np.array(table))


def test_pauli_spec_json_round_trip_17_digits():
    rng = np.random.default_rng(1)
    q = rng.dirichlet(np.ones(9)).reshape(3, 3)
    spec = PauliSpec(3, q)
    text = spec.to_json()
    obj = json.loads(text)
    assert set(obj) == {"d", "q"} and obj["d"] == 3
    back = PauliSpec.from_json(text)
    np.testing.assert_array_equal(back.q, spec.q)
    # the same must hold after formatting every entry at 17 significant digits
    obj["q"] = [[float(f"{x:.17g}") for x in row] for row in obj["q"]]
    np.testing.assert_array_equal(PauliSpec.from_json(json.dumps(obj)).q, spec.q)


def test_joint_spec_json_round_trip():
    spec = PauliSpec.product(depolarizing_spec(2, 0.3), depolarizing_spec(2, 0.6))
    back = PauliSpec.from_json(spec.to_json())
    assert back.joint
    np.testing.assert_array_equal(back.q, spec.q)


# --- Kraus channels --------------------------------------------------------


def test_kraus_rejects_non_trace_preserving():
    with pytest.raises(ChannelError):
        KrausChannel(2, np.array([np.diag([1.0, 0.5])]))


def test_amplitude_damping_is_not_unital():
    g = 0.3
    ops = np.array([[[1, 0], [0, math.sqrt(1 - g)]], [[0, math.sqrt(g)], [0, 0]]], dtype=complex)
    assert not KrausChannel(2, ops).unital


def test_identity_channel_leaves_state():
    rho = random_density_matrix((3,), 0)
    np.testing.assert_allclose(apply(identity_channel(3), rho).mat, rho.mat, atol=1e-15)


def test_apply_rejects_dimension_mismatch():
    with pytest.raises(ChannelError):
        apply(identity_channel(2), np.eye(3) / 3)


def test_apply_keeps_type_and_dims():
    out = apply(two_sided_depolarizing(2, 0.2), bell_density(2))
    assert isinstance(out, DensityMatrix) and out.dims == (2, 2)


def test_apply_matches_kraus_loop():
    ch = random_unital_channel(3, 4, seed=8)
    rho = random_density_matrix((3,), 9).mat
    np.testing.assert_allclose(apply(ch, rho), kraus_sum(ch.kraus_ops, rho), atol=1e-14)


def test_full_two_sided_depolarization_of_bell():
    np.testing.assert_allclose(apply(two_sided_depolarizing(2, 1.0), bell_density(2)).mat, np.eye(4) / 4, atol=1e-15)


def test_one_sided_dep_on_bell_werner_form():
    # (1 - p) rho_00 + p I/4 has spectrum {1 - 3p/4, p/4, p/4, p/4}
    p = 0.3
    out = apply(one_sided_pauli(depolarizing_spec(2, p)), bell_density(2)).mat
    np.testing.assert_allclose(out, werner_state(2, 1 - p).mat, atol=1e-14)
    np.testing.assert_allclose(spectrum(out), [0.775, 0.075, 0.075, 0.075], atol=1e-14)


def test_pauli_channel_kraus_structure():
    spec = PauliSpec(2, np.array([[0.4, 0.3], [0.2, 0.1]]))
    ch = pauli_channel(spec)
    assert ch.unital
    for (m, n), k in zip([(0, 0), (0, 1), (1, 0), (1, 1)], ch.kraus_ops):
        np.testing.assert_allclose(k, math.sqrt(spec.q[m, n]) * weyl_operator(m, n, 2), atol=1e-15)


def test_pauli_delta_is_identity():
    q = np.zeros((3, 3))
    q[0, 0] = 1.0
    rho = random_density_matrix((3,), 5).mat
    np.testing.assert_allclose(apply(pauli_channel(PauliSpec(3, q)), rho), rho, atol=1e-15)


def test_uniform_pauli_is_twirl():
    ch = pauli_channel(PauliSpec(2, np.full((2, 2), 0.25)))
    for seed in range(5):
        np.testing.assert_allclose(apply(ch, random_density_matrix((2,), seed).mat), np.eye(2) / 2, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3])
def test_one_sided_pauli_on_bell_has_spectrum_q(d):
    rng = np.random.default_rng(d)
    q = rng.dirichlet(np.ones(d * d)).reshape(d, d)
    out = apply(one_sided_pauli(PauliSpec(d, q)), bell_density(d))
    np.testing.assert_allclose(spectrum(out.mat), np.sort(q.ravel())[::-1], atol=1e-12)


# --- lifting and composition -----------------------------------------------


def test_lift_identity_is_bipartite_identity():
    ch = lift(identity_channel(2), "A", 3)
    rho = random_density_matrix((2, 3), 1).mat
    np.testing.assert_allclose(apply(ch, rho), rho, atol=1e-15)


def test_lift_rejects_bad_side():
    with pytest.raises(ValueError):
        lift(identity_channel(2), "C", 2)


def test_lift_preserves_unitality():
    assert lift(random_unital_channel(2, seed=1), "B", 3).unital


def test_lifts_compose_to_two_sided_product():
    p = 0.35
    dep = depolarizing_channel(2, p)
    seq = compose(lift(dep, "A", 2), lift(dep, "B", 2))
    direct = two_sided_depolarizing(2, p)
    rho = random_density_matrix((2, 2), 3).mat
    np.testing.assert_allclose(apply(seq, rho), apply(direct, rho), atol=1e-12)
    np.testing.assert_allclose(seq.pauli.q, direct.pauli.q, atol=1e-15)


def test_two_sided_product_table_equals_lift_composition():
    qa = PauliSpec(2, np.array([[0.6, 0.1], [0.2, 0.1]]))
    qb = PauliSpec(2, np.array([[0.7, 0.0], [0.1, 0.2]]))
    joint = two_sided_pauli(PauliSpec.product(qa, qb))
    seq = compose(lift(pauli_channel(qa), "A", 2), lift(pauli_channel(qb), "B", 2))
    rho = random_density_matrix((2, 2), 4).mat
    np.testing.assert_allclose(apply(joint, rho), apply(seq, rho), atol=1e-12)
    np.testing.assert_allclose(apply(two_sided_pauli(qa, qb), rho), apply(joint, rho), atol=1e-15)


def test_two_sided_dep_on_bell_spectrum():
    p = 0.4
    big = (1 + 3 * (1 - p) ** 2) / 4
    small = (1 - (1 - p) ** 2) / 4
    out = apply(two_sided_depolarizing(2, p), bell_density(2)).mat
    np.testing.assert_allclose(spectrum(out), [big, small, small, small], atol=1e-14)


def test_two_sided_joint_delta_is_identity():
    q = np.zeros((2, 2, 2, 2))
    q[0, 0, 0, 0] = 1.0
    rho = random_density_matrix((2, 2), 6).mat
    np.testing.assert_allclose(apply(two_sided_pauli(PauliSpec(2, q)), rho), rho, atol=1e-15)


def test_correlated_joint_table_accepted():
    q = np.zeros((2, 2, 2, 2))
    q[0, 0, 0, 0] = q[1, 1, 1, 1] = 0.5
    ch = two_sided_pauli(PauliSpec(2, q))
    assert ch.unital and ch.pauli.joint
    # correlated Y (x) Y noise leaves the singlet invariant
    singlet = bell_density(2, 1, 1).mat
    np.testing.assert_allclose(apply(ch, singlet), singlet, atol=1e-14)


# --- superoperator identities ----------------------------------------------


@pytest.mark.parametrize("d", [2, 3])
def test_depolarizing_contracts_generators(d):
    p = 0.45
    ch = depolarizing_channel(d, p)
    for lam in su_generators(d):
        np.testing.assert_allclose(apply(ch, lam), (1 - p) * lam, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), w=st.floats(0.0, 1.0))
def test_linearity(seed, w):
    ch = two_sided_depolarizing(2, 0.3)
    r1 = random_density_matrix((2, 2), seed).mat
    r2 = random_density_matrix((2, 2), seed + 1).mat
    lhs = apply(ch, w * r1 + (1 - w) * r2)
    rhs = w * apply(ch, r1) + (1 - w) * apply(ch, r2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_unital_channel_output_is_state(seed):
    ch = lift(random_unital_channel(3, 3, seed), "A", 2)
    out = apply(ch, random_density_matrix((3, 2), seed + 1))
    DensityMatrix(out.mat, out.dims)  # full validation must pass
    np.testing.assert_allclose(apply(ch, np.eye(6) / 6), np.eye(6) / 6, atol=1e-12)


# --- covariance ------------------------------------------------------------


def test_covariance_identity_channel():
    ident = BipartiteChannel(2, 2, np.eye(4)[None])
    assert verify_covariance(ident, trials=10).max_difference < 1e-13


def test_covariance_two_sided_dep():
    rep = verify_covariance(two_sided_depolarizing(2, 0.5), trials=100)
    assert rep.passed and rep.trials == 100


def test_covariance_fails_for_generic_pauli():
    q = np.array([[0.7, 0.3], [0.0, 0.0]])
    rep = verify_covariance(two_sided_pauli(PauliSpec(2, q)), trials=20)
    assert not rep.passed
    assert rep.max_difference > 1e-3
