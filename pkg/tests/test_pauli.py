import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from stabsim.pauli import PauliOperator, popcount

paulis = st.builds(
    lambda n, x, z, ph: PauliOperator(n, x % (1 << n), z % (1 << n), ph),
    st.just(3), st.integers(0, 7), st.integers(0, 7), st.integers(0, 3),
)


def test_from_string_and_str():
    p = PauliOperator.from_string("-iXYZ")
    assert str(p) == "-iXYZ"
    assert p.weight() == 3
    assert PauliOperator.from_string("II").is_identity()


def test_dense_y():
    y = PauliOperator.from_string("Y").to_dense()
    assert np.allclose(y, [[0, -1j], [1j, 0]])


def test_popcount():
    assert popcount(0b1011) == 3


@given(paulis, paulis)
def test_product_matches_dense(a, b):
    assert np.allclose((a * b).to_dense(), a.to_dense() @ b.to_dense())


@given(paulis, paulis)
def test_commutes_matches_dense(a, b):
    A, B = a.to_dense(), b.to_dense()
    assert a.commutes(b) == np.allclose(A @ B, B @ A)


@given(paulis, st.integers(0, 7))
def test_apply_to_basis(p, b):
    out, e = p.apply_to_basis(b)
    vec = np.zeros(8, dtype=complex)
    vec[b] = 1
    expected = p.to_dense() @ vec
    assert np.isclose(expected[out], 1j ** e)


def test_embed_restrict_roundtrip():
    p = PauliOperator.from_string("XZ")
    e = p.embed(4, [3, 1])
    assert str(e) == "+IZIX"
    assert str(e.restrict([3, 1])) == "+XZ"
