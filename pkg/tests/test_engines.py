import cmath
import dataclasses

import numpy as np
import pytest

from stabsim.circuit import Circuit, compress_diagonal_layers, ensemble_generate, iqp_circuit, layerize
from stabsim.cost import spir_inner_products
from stabsim.decomposition import ProjectorDecomposition
from stabsim.engines import (
    CapacityError,
    CutPlan,
    EngineError,
    amplitude_cut_hybrid,
    amplitude_dense,
    amplitude_spc,
    amplitude_spc_soc,
    amplitude_spir,
    evolve_spc,
    plan_cut,
)
from stabsim.prng import SplitMix64
from tests.helpers import random_circuit


def _circ(n, *gates):
    c = Circuit(n)
    for g in gates:
        c.append(g[0], *g[1:])
    return c


def uniform_t_circuit(n, d):
    """``d`` layers of T on every qubit separated by Hadamards: kappa = 2**n per layer."""
    c = Circuit(n)
    for _ in range(d):
        for q in range(n):
            c.append("h", q)
        for q in range(n):
            c.append("t", q)
    for q in range(n):
        c.append("h", q)
    return c


def test_dense_basics():
    assert abs(amplitude_dense(_circ(1, ("h", 0)), "0") - 2 ** -0.5) < 1e-15
    assert amplitude_dense(_circ(2), "00") == 1
    c = random_circuit(6, 40, 3)
    total = sum(abs(amplitude_dense(c, x)) ** 2 for x in range(64))
    assert abs(total - 1) < 1e-10


def test_dense_limit():
    with pytest.raises(EngineError):
        amplitude_dense(Circuit(15), 0)


def test_spir_hth():
    L = layerize(_circ(1, ("h", 0), ("t", 0), ("h", 0)))
    amp, _ = amplitude_spir(L, "0")
    assert abs(amp - (1 + cmath.exp(1j * cmath.pi / 4)) / 2) < 1e-12


def test_spir_clifford_only():
    amp, tr = amplitude_spir(layerize(_circ(2, ("h", 0), ("cx", 0, 1))), "00")
    assert abs(amp - 2 ** -0.5) < 1e-15 and tr.inner_product_count == 1


@pytest.mark.parametrize("seed", range(50))
def test_engines_match_dense(seed):
    rng = SplitMix64(seed, 99)
    n = 1 + rng.below(6)
    c = random_circuit(n, 12 + rng.below(14), seed)
    L = layerize(c)
    if L.d_nc > 4:
        L = layerize(random_circuit(n, 10, seed, p_nc=0.15))
        c = Circuit(n, L.gate_sequence())
    sv = c.statevector()
    x = rng.below(1 << n)
    ref = sv[x]
    assert abs(amplitude_spir(L, x)[0] - ref) <= 1e-8
    assert abs(amplitude_spc(L, x)[0] - ref) <= 1e-8
    assert abs(amplitude_spc_soc(L, x)[0] - ref) <= 1e-8


@pytest.mark.parametrize("d", [1, 2, 4, 8])
def test_spir_trace_law(d):
    L = layerize(uniform_t_circuit(2, d))
    assert L.d_nc == d and all(l.kappa == 4 for l in L.nc_layers)
    _, tr = amplitude_spir(L, 0)
    assert tr.inner_product_count == spir_inner_products([4] * d)


def test_split_point_freedom():
    c = ensemble_generate("cs", 3, 4, 0.5, 11)
    L = layerize(c)
    ref, _ = amplitude_spir(L, 5)
    for m in range(1, L.d_nc + 1):
        assert abs(amplitude_spir(L, 5, split=m)[0] - ref) <= 1e-9
    with pytest.raises(EngineError):
        amplitude_spir(L, 5, split=L.d_nc + 1)


def test_term_permutation_invariance():
    c = ensemble_generate("supremacy_like", 3, 2, seed=4)
    L = layerize(c)
    ref_spir, _ = amplitude_spir(L, 3)
    ref_spc, _ = amplitude_spc(L, 3)
    rng = SplitMix64(1)
    for layer in L.nc_layers:
        for fg in layer.placements:
            terms = list(fg.decomposition.terms)
            rng.shuffle(terms)
            fg._decomp = dataclasses.replace(fg.decomposition, terms_=terms, factors=None, rank_=None)
        layer._padded = None
    assert abs(amplitude_spir(L, 3)[0] - ref_spir) <= 1e-12
    assert abs(amplitude_spc(L, 3)[0] - ref_spc) <= 1e-12


def test_spc_t_on_zero():
    ssum, _ = evolve_spc(layerize(_circ(1, ("t", 0))))
    assert len(ssum) == 2
    assert np.allclose(ssum.to_dense(), [1, 0], atol=1e-12)


def test_spc_h_then_t():
    ssum, _ = evolve_spc(layerize(_circ(1, ("h", 0), ("t", 0))))
    expected = np.array([1, cmath.exp(1j * cmath.pi / 4)]) / np.sqrt(2)
    assert np.allclose(ssum.to_dense(), expected, atol=1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_spc_term_count_and_gram(seed):
    c = ensemble_generate(("cz", "cs", "supremacy_like")[seed % 3], 2 + seed % 3, 3, 0.5, seed)
    L = layerize(c)
    ssum, tr = evolve_spc(L)
    assert tr.layer_terms == [l.kappa for l in L.nc_layers]
    assert abs(ssum.gram_sum() - 1) <= 1e-9


def test_spc_identity_and_capacity():
    assert amplitude_spc(layerize(Circuit(2)), "00")[0] == 1
    L = layerize(_circ(2, ("t", 0), ("t", 1)))
    with pytest.raises(CapacityError, match="layer 1 has kappa=4"):
        amplitude_spc(L, 0, mem_cap=2)


def test_spc_prune_matches():
    c = ensemble_generate("cz", 3, 3, 0.6, 2)
    L = layerize(c)
    a, tr = amplitude_spc(L, 0, prune=True)
    assert abs(a - c.statevector()[0]) <= 1e-8
    assert tr.max_live_terms <= max(l.kappa for l in L.nc_layers)


def test_iqp_after_compression():
    c = iqp_circuit(4, 3, 7)
    L = compress_diagonal_layers(layerize(c))
    sv = c.statevector()
    for x in range(16):
        assert abs(amplitude_spc(L, x)[0] - sv[x]) <= 1e-9


def test_soc_switchover():
    c = _circ(2, ("t", 0), ("h", 0), ("t", 0), ("h", 0), ("t", 0), ("h", 0), ("h", 1), ("t", 0), ("t", 1))
    L = layerize(c)
    assert [l.kappa for l in L.nc_layers] == [4, 4, 4, 4]
    amp, tr = amplitude_spc_soc(L, 0)
    # single-T layers give 2 then 4 terms; the third would reach 8 > 4 and collapses
    assert tr.switch_layer == 3
    assert tr.layer_terms == [2, 4, 4, 4]
    assert abs(amp - c.statevector()[0]) <= 1e-10


def test_soc_clifford_only():
    c = _circ(2, ("h", 0), ("cx", 0, 1))
    amp, tr = amplitude_spc_soc(layerize(c), "11")
    assert tr.switch_layer is None and abs(amp - 2 ** -0.5) < 1e-15


def test_soc_missing_entry():
    from stabsim.engines import _soc_terms

    with pytest.raises(EngineError):
        _soc_terms("ww")


def test_cut_single_cz_two_configurations():
    c = _circ(4, ("h", 0), ("t", 0), ("h", 2), ("cz", 1, 2), ("t", 2), ("h", 1), ("cz", 0, 1), ("t", 3), ("h", 3))
    plan = CutPlan((0, 0, 1, 1), (3,))
    amp, tr = amplitude_cut_hybrid(c, plan, "0010")
    assert tr.configurations == 2
    assert abs(amp - c.statevector()[2]) <= 1e-10


def test_cut_separable():
    c = _circ(4, ("h", 0), ("t", 0), ("cx", 0, 1), ("h", 3), ("t", 3), ("cx", 3, 2))
    plan = CutPlan((0, 0, 1, 1), ())
    a = _circ(2, ("h", 0), ("t", 0), ("cx", 0, 1))
    b = _circ(2, ("h", 1), ("t", 1), ("cx", 1, 0))
    amp, tr = amplitude_cut_hybrid(c, plan, "1111")
    assert tr.configurations == 1
    assert abs(amp - a.statevector()[3] * b.statevector()[3]) <= 1e-12


@pytest.mark.parametrize("seed", range(12))
def test_cut_matches_dense_n6(seed):
    rng = SplitMix64(seed, 5)
    x_target = 1 + seed % 3
    c = Circuit(6)
    cuts = 0
    for step in range(30):
        r = rng.random()
        if r < 0.15 and cuts < x_target:
            c.append("cz", 2, 3)
            cuts += 1
        elif r < 0.4:
            a = rng.below(5)
            if a == 2:
                continue
            c.append(rng.choice(["cx", "cz", "cs"]), a, a + 1)
        else:
            c.append(rng.choice(["h", "t", "s", "sx", "w"]), rng.below(6))
    while cuts < x_target:
        c.append("cz", 2, 3)
        cuts += 1
    cut = tuple(i for i, g in enumerate(c.gates) if g.name == "cz" and g.qubits == (2, 3))
    plan = CutPlan((0, 0, 0, 1, 1, 1), cut)
    assert plan.cut_count == x_target
    amp, tr = amplitude_cut_hybrid(c, plan, 0b101101)
    assert tr.configurations == 2 ** x_target
    assert abs(amp - c.statevector()[0b101101]) <= 1e-8


def test_plan_cut_prefers_fewest_cuts():
    c = _circ(4, ("h", 0), ("cz", 0, 1), ("cz", 1, 2), ("cz", 1, 2), ("cs", 2, 3))
    plan = plan_cut(c)
    assert plan.partition == (0, 1, 1, 1) and plan.cut_count == 1
    assert plan_cut(_circ(2, ("cs", 0, 1))) is None


def test_cut_plan_validation():
    c = _circ(2, ("cx", 0, 1))
    with pytest.raises(EngineError, match="not a CZ"):
        amplitude_cut_hybrid(c, CutPlan((0, 1), (0,)), 0)
    c = _circ(2, ("cz", 0, 1))
    with pytest.raises(EngineError):
        amplitude_cut_hybrid(c, CutPlan((0, 0), ()), 0)
    with pytest.raises(EngineError):
        amplitude_cut_hybrid(c, CutPlan((0, 1), ()), 0)


@pytest.mark.parametrize("fam", ["cz", "cs", "supremacy_like"])
def test_thread_determinism(fam):
    c = ensemble_generate(fam, 4, 3, 0.5, 21)
    L = layerize(c)
    for fn in (amplitude_spir, amplitude_spc, amplitude_spc_soc):
        a1, _ = fn(L, 6, threads=1)
        a4, _ = fn(L, 6, threads=4)
        assert a1 == a4


def test_bad_bitstring():
    with pytest.raises(ValueError):
        amplitude_spir(layerize(Circuit(2)), "012")
