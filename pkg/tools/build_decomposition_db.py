"""Regenerate ``src/stabsim/data/decompositions.db``.

Exact entries are written from their closed forms.  Entries without a
usable closed form are found with the seeded support search and then
refit, so rerunning this script reproduces the file byte for byte.
"""

from __future__ import annotations

import cmath
import math
import sys
import time
from pathlib import Path

from stabsim.decomposition import (
    DEFAULT_DB,
    ProjectorDecomposition,
    ProjectorTerm,
    diagonal_decomposition,
    format_database,
    parse_database,
    parse_target,
    refit_coefficients,
    search_decomposition,
    target_matrix,
    verify_decomposition,
)
from stabsim.gates import gate_matrix
from stabsim.stabilizer import labeled_state

R2 = math.sqrt(2)


def labeled(name, arity, target, pairs, note=""):
    terms = [ProjectorTerm(complex(c), labeled_state(lab)) for lab, c in pairs]
    d = ProjectorDecomposition(arity, terms, "builtin", name, 1e-12, True, note, parse_target(target))
    rep = verify_decomposition(d, target_matrix(d.target, arity))
    assert rep.passed, (name, rep)
    return d


def searched(name, target, rank, seed, budget, note=""):
    word = parse_target(target)
    arity = max(q for _, qs in word for q in qs) + 1
    u = target_matrix(word, arity)
    t0 = time.time()
    d = search_decomposition(u, rank, budget=budget, seed=seed, min_rank=rank)
    if d is None:
        raise SystemExit(f"{name}: no rank-{rank} support found with seed {seed}")
    d = refit_coefficients(d, u)
    d.source = "searched"
    d.name = name
    d.target = word
    d.tolerance = 1e-10
    d.note = note
    print(f"{name}: rank {d.rank}, residual {d.residual:.2e}, {time.time() - t0:.1f}s", file=sys.stderr)
    return d


def diagonal(name, target):
    word = parse_target(target)
    arity = max(q for _, qs in word for q in qs) + 1
    d = diagonal_decomposition(target_matrix(word, arity).diagonal())
    d.name = name
    d.target = word
    return d


def main(out: Path = DEFAULT_DB) -> None:
    e6 = cmath.exp(1j * math.pi / 6)
    entries = {}
    entries["fsim"] = labeled(
        "fsim", 2, "fsim:0,1",
        [("zz", 1), ("zbzb", e6), ("Psi+_zz", -1j), ("Psi-_zz", 1j)],
    )
    entries["ww"] = labeled(
        "ww", 2, "w:0 w:1",
        [
            ("Psi-_zz", 1), ("Phi-i_zz", 1),
            ("xx", -1j / R2), ("xbxb", 1j / R2), ("yy", -1j / R2), ("ybyb", 1j / R2),
        ],
        "spectral construction: unit eigenspace plus the X and Y Pauli sums",
    )
    entries["ww_d"] = labeled(
        "ww_d", 2, "w:0 w:1",
        [
            ("Phi-_zz", -R2 * 1j), ("Psi-_zz", 1), ("Phi+i_zz", 1j / R2),
            ("Phi-i_zz", 1 + 1j / R2), ("xx", -R2 * 1j), ("ybyb", R2 * 1j),
        ],
        "alternative rank-6 support for sqrt(W) x sqrt(W)",
    )
    entries["w"] = searched("w", "w:0", 3, seed=0, budget=100)
    entries["fsim_w1w2"] = searched("fsim_w1w2", "w:0 w:1 fsim:0,1", 10, seed=0, budget=2_000_000)
    entries["fsim_w1"] = searched(
        "fsim_w1", "w:0 fsim:0,1", 12, seed=0, budget=2_000_000,
        note="a rank-11 support also exists; rank 12 is kept to match the published upper bound",
    )
    entries["w2_iswap_cz_w1"] = searched(
        "w2_iswap_cz_w1", "w:0 cz:0,1 iswap:0,1 w:1", 8, seed=0, budget=2_000_000,
        note="sqrt(W) on qubit 0, then CZ, iSWAP, then sqrt(W) on qubit 1",
    )
    entries["t"] = diagonal("t", "t:0")
    entries["tdg"] = diagonal("tdg", "tdg:0")
    entries["cs"] = diagonal("cs", "cs:0,1")
    text = format_database(entries)
    parse_database(text)  # verifies every entry
    out.write_text(text, encoding="utf-8")
    print(f"wrote {out}", file=sys.stderr)


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_DB)
