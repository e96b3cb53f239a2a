import math

import numpy as np
import pytest

from stabsim import gates as G
from stabsim.decomposition import (
    DatabaseError,
    DecompositionError,
    builtin_decomposition,
    diagonal_decomposition,
    format_database,
    load_database,
    pad_layer,
    parse_database,
    refit_coefficients,
    search_decomposition,
    soc_matrix,
    sum_over_clifford,
    target_matrix,
    tensor,
    verify_decomposition,
)

TABLE_RANKS = {"fsim": 4, "fsim_w1w2": 10, "fsim_w1": 12, "ww": 6}


@pytest.mark.parametrize("name", sorted(load_database()))
def test_database_entries_verify(name):
    d = builtin_decomposition(name)
    rep = verify_decomposition(d, target_matrix(d.target, d.arity))
    assert rep.passed, rep


@pytest.mark.parametrize("name,rank", sorted(TABLE_RANKS.items()))
def test_table_ranks(name, rank):
    assert builtin_decomposition(name).rank == rank


def test_single_w_rank_three():
    assert builtin_decomposition("w").rank == 3


def test_ww_variants_agree():
    a = builtin_decomposition("ww").to_dense()
    b = builtin_decomposition("ww_d").to_dense()
    assert np.abs(a - b).max() <= 1e-12
    assert np.abs(a - np.kron(G.gate_matrix("w"), G.gate_matrix("w"))).max() <= 1e-12


def test_fsim_entry_exact():
    d = builtin_decomposition("fsim")
    assert np.abs(d.to_dense() - G.gate_matrix("fsim")).max() <= 1e-12


def test_unknown_entry():
    with pytest.raises(DecompositionError):
        builtin_decomposition("nope")


@pytest.mark.parametrize("name,rank", [("t", 2), ("tdg", 2), ("cs", 2), ("fsim", 2), ("w", 4), ("diag_pi6", 2)])
def test_sum_over_clifford(name, rank):
    terms = sum_over_clifford(name)
    assert len(terms) == rank
    k = 2 if name in ("cs", "fsim", "diag_pi6") else 1
    if name == "diag_pi6":
        target = np.diag([1, 1, 1, np.exp(1j * np.pi / 6)])
    else:
        target = target_matrix(((name, tuple(range(k))),), k)
    assert np.abs(soc_matrix(terms, k) - target).max() <= 1e-12


def test_t_soc_coefficients():
    a = np.exp(1j * np.pi / 8) / (2 * math.cos(np.pi / 8))
    c = [t.coefficient for t in sum_over_clifford("t")]
    assert np.allclose(c, [a, a * np.exp(-1j * np.pi / 4)], atol=1e-15)


def test_diagonal_decomposition():
    entries = np.exp(1j * np.array([0.1, 0.2, 0.3, 0.4]))
    d = diagonal_decomposition(entries)
    assert d.rank == 4 and np.allclose(d.to_dense(), np.diag(entries))
    with pytest.raises(DecompositionError):
        diagonal_decomposition([1, 1, 1])


def test_tensor_and_pad():
    t = builtin_decomposition("t")
    w = builtin_decomposition("w")
    tw = tensor(t, w)
    assert tw.rank == 6
    assert np.allclose(tw.to_dense(), np.kron(G.gate_matrix("t"), G.gate_matrix("w")))
    pad = pad_layer([(w, [2])], 3)
    assert pad.rank == 3 * 4
    assert np.allclose(pad.to_dense(), G.embed_matrix(G.gate_matrix("w"), [2], 3), atol=1e-12)


def test_refit_recovers_perturbed_coefficients():
    d = builtin_decomposition("w")
    noisy = d.with_coefficients(np.round(d.coefficients, 3))
    fixed = refit_coefficients(noisy, G.gate_matrix("w"))
    assert not fixed.flagged and fixed.residual <= 1e-9
    assert verify_decomposition(fixed, G.gate_matrix("w"), 1e-9).passed


def test_refit_flags_bad_support():
    d = diagonal_decomposition([1, 1])  # |0><0|, |1><1| cannot make sqrt(W)
    out = refit_coefficients(d, G.gate_matrix("w"))
    assert out.flagged and out.residual > 1e-9


def test_search_w_rank_two_none():
    assert search_decomposition(G.gate_matrix("w"), 2, budget=10 ** 6) is None


def test_search_w_rank_three():
    found = search_decomposition(G.gate_matrix("w"), 3, budget=10 ** 6)
    assert found is not None and found.rank == 3
    assert verify_decomposition(found, G.gate_matrix("w"), 1e-9).passed


def test_database_roundtrip():
    db = load_database()
    again = parse_database(format_database(db))
    assert sorted(again) == sorted(db)
    for name in db:
        assert np.allclose(again[name].to_dense(), db[name].to_dense(), atol=1e-12)


def test_database_rejects_corrupt_entry():
    db = {"t": builtin_decomposition("t")}
    text = format_database(db).replace("gate t\n", "gate t\n", 1)
    bad = text.replace("target t:0", "target tdg:0")
    with pytest.raises(DatabaseError):
        parse_database(bad)


def test_database_env_override(tmp_path, monkeypatch):
    from stabsim import decomposition as D

    path = tmp_path / "mini.db"
    path.write_text(format_database({"t": builtin_decomposition("t")}))
    monkeypatch.setenv(D.DB_ENV, str(path))
    assert sorted(load_database()) == ["t"]
