import numpy as np
import pytest

from stabsim import gates as G


@pytest.mark.parametrize("name", sorted(G.SUPPORTED_GATES))
def test_matrices_unitary(name):
    u = G.gate_matrix(name)
    assert np.allclose(u.conj().T @ u, np.eye(len(u)), atol=1e-12)


@pytest.mark.parametrize("name", sorted(G.SUPPORTED_GATES))
def test_clifford_flags(name):
    assert G.is_clifford_matrix(G.gate_matrix(name)) == (name in G.CLIFFORD_GATES)


def test_inverse_table():
    for name, inv in G.INVERSE.items():
        if name in ("p0", "p1"):
            continue
        assert np.allclose(G.gate_matrix(inv) @ G.gate_matrix(name), np.eye(len(G.gate_matrix(name))))


def test_w_is_t_conjugated_sqrt_x():
    t, sx = G.gate_matrix("t"), G.gate_matrix("sx")
    assert np.allclose(G.gate_matrix("w"), t @ sx @ t.conj().T, atol=1e-15)


def test_fsim_phase_and_swap_block():
    u = G.gate_matrix("fsim")
    assert np.isclose(u[3, 3], np.exp(1j * np.pi / 6))
    assert np.isclose(u[1, 2], -1j)


def test_apply_matrix_ordering():
    v = np.zeros(4, complex)
    v[0] = 1
    out = G.apply_matrix(v, G.gate_matrix("x"), [0], 2)
    assert out[2] == 1  # qubit 0 is the most significant bit
