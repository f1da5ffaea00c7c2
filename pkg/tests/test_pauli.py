import numpy as np
import pytest
from hypothesis import given, strategies as st

from muqsim.pauli import PauliString, PauliSum, accumulate, anticommutation_matrix, commutator
from conftest import PAULI, kron_all

N = 4
labels = st.text(alphabet="IXYZ", min_size=N, max_size=N)


def dense(label):
    return kron_all([PAULI[c] for c in label])


@given(labels, labels)
def test_product_matches_dense(a, b):
    ph, prod = PauliString.from_label(a) * PauliString.from_label(b)
    assert np.allclose(ph * dense(prod.label(N)), dense(a) @ dense(b))


@given(labels, labels)
def test_commutes_with_matches_dense(a, b):
    A, B = dense(a), dense(b)
    commute = np.allclose(A @ B, B @ A)
    assert PauliString.from_label(a).commutes_with(PauliString.from_label(b)) == commute
    c = commutator(PauliString.from_label(a), PauliString.from_label(b))
    if commute:
        assert c is None
    else:
        coeff, ps = c
        assert np.allclose(coeff * dense(ps.label(N)), A @ B - B @ A)


@given(labels)
def test_label_round_trip_and_sparse(a):
    ps = PauliString.from_label(a)
    assert ps.label(N) == a
    assert np.allclose(ps.to_sparse(N).toarray(), dense(a))
    x, z = ps.bits
    assert PauliString.from_bits(x, z) == ps


def test_sum_dense_and_accumulate():
    H = PauliSum.from_dict({PauliString.from_label("XXI"): 0.5, PauliString.from_label("IZZ"): -1.0}, 3)
    ref = 0.5 * dense("XXI") - dense("IZZ")
    assert np.allclose(H.to_dense(), ref)
    assert H.one_norm == pytest.approx(1.5)
    # XY * YX products cancel in pairs
    ps = [(1.0, PauliString.from_label("ZI")), (-1.0, PauliString.from_label("ZI"))]
    assert len(accumulate(ps, 2)) == 0
    assert np.allclose((H + H).to_dense(), 2 * ref)
    assert np.allclose(H.scale(3).to_dense(), 3 * ref)


def test_anticommutation_matrix():
    strings = [PauliString.from_label(s) for s in ("XI", "ZI", "IZ", "ZZ")]
    A = anticommutation_matrix(strings)
    assert A.dtype == bool and np.array_equal(A, A.T)
    assert A[0, 1] and A[0, 3] and not A[0, 2] and not A[1, 2]
