import numpy as np

from stabsim.circuit import Circuit, ensemble_generate
from stabsim.prng import SplitMix64


def random_circuit(n: int, depth: int, seed: int, nc=("t", "cs", "fsim", "w"), p_nc: float = 0.3) -> Circuit:
    """Mixed Clifford and non-Clifford circuit for oracle comparisons."""
    rng = SplitMix64(seed, 7)
    circ = Circuit(n)
    ones = ["h", "s", "sx", "sy", "x", "z"]
    twos = ["cx", "cz", "swap", "iswap"]
    for _ in range(depth):
        if n > 1 and rng.random() < 0.4:
            a = rng.below(n)
            b = (a + 1 + rng.below(n - 1)) % n
            if rng.random() < p_nc:
                name = rng.choice([g for g in nc if g in ("cs", "fsim")] or ["cz"])
            else:
                name = rng.choice(twos)
            circ.append(name, a, b)
        else:
            q = rng.below(n)
            if rng.random() < p_nc:
                name = rng.choice([g for g in nc if g in ("t", "w")] or ["t"])
            else:
                name = rng.choice(ones)
            circ.append(name, q)
    return circ
