"""Closed-form cost model for amplitude simulation algorithms.

All costs are returned as base-2 logarithms so that supremacy-scale inputs
(exponents in the hundreds) stay representable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

STABILIZER_RANK_EXPONENT = 0.47  # log2 of the per-T-gate stabilizer rank growth

METHODS = ("direct", "feynman", "hybrid", "recursive_path", "stabilizer_rank", "spir", "spc")

# Ranks of the gate classes of a supremacy cycle.
CYCLE_CLASS_RANKS = {
    "fsim_w": 12,  # fSim after sqrt(W) on one of its qubits
    "fsim": 4,
    "fsim_ww": 10,  # fSim after sqrt(W) on both qubits
    "w_pair": 6,  # two sqrt(W) gates not followed by an fSim
    "w": 3,  # a lone sqrt(W)
}
DEFAULT_CENSUS = {"fsim_w": 10, "fsim": 10, "fsim_ww": 2, "w_pair": 1, "w": 1}


class CostError(ValueError):
    pass


@dataclass
class CostQuery:
    """Inputs of a cost estimate.

    Explicit fields win over values derived from ``stats`` (a
    :class:`stabsim.circuit.CircuitStats`).  ``k`` is the log2 of the
    per-layer stabilizer projector rank; when omitted it is the mean of the
    layer ranks in ``stats``.
    """

    method: str
    stats: object | None = None
    n: int | None = None
    m: int | None = None
    d: int | None = None
    d_nc: int | None = None
    k: float | None = None
    t: int | None = None
    x: int | None = None

    def get(self, name: str):
        val = getattr(self, name)
        if val is None and self.stats is not None:
            if name == "k":
                kappas = getattr(self.stats, "kappas", [])
                if kappas:
                    val = sum(math.log2(v) for v in kappas) / len(kappas)
            else:
                val = getattr(self.stats, name, None)
        if val is None:
            raise CostError(f"method {self.method!r} needs {name!r}")
        return val


def _log2(v: float) -> float:
    return math.log2(v) if v > 0 else 0.0


def predicted_cost(query: CostQuery) -> dict[str, float]:
    """``{"log2_time": ..., "log2_space": ...}`` for one simulation method."""
    q = query
    meth = q.method
    if meth == "direct":
        n, m = q.get("n"), q.get("m")
        return {"log2_time": _log2(m) + n, "log2_space": float(n)}
    if meth == "feynman":
        n, m = q.get("n"), q.get("m")
        return {"log2_time": 2.0 * m, "log2_space": _log2(m + n)}
    if meth == "hybrid":
        n, x = q.get("n"), q.get("x")
        return {"log2_time": n / 2 + x, "log2_space": n / 2 + 1}
    if meth == "recursive_path":
        n, d = q.get("n"), q.get("d")
        return {"log2_time": n * _log2(2 * d), "log2_space": _log2(n * _log2(d))}
    if meth == "stabilizer_rank":
        n, t = q.get("n"), q.get("t")
        e = STABILIZER_RANK_EXPONENT * t
        return {"log2_time": 3 * _log2(n) + e, "log2_space": e}
    if meth == "spir":
        n, d_nc, k = q.get("n"), q.get("d_nc"), q.get("k")
        return {
            "log2_time": 3 * _log2(n) + k * _log2(2 * d_nc),
            "log2_space": _log2(n * _log2(d_nc)),
        }
    if meth == "spc":
        n, d_nc, k = q.get("n"), q.get("d_nc"), q.get("k")
        return {"log2_time": _log2(d_nc) + 2 * k + 3 * _log2(n), "log2_space": float(k)}
    raise CostError(f"unknown method {meth!r}")


def threshold_p(family: str, d_nc: int) -> float:
    """Smallest T density at which SPIR out-scales stabilizer-rank simulation.

    ``cz``: ``log2(d)/(0.47 d)``; ``cs``: ``2 (log2(d) - d/4)/(0.47 d)``.
    """
    if d_nc < 1:
        raise CostError("d_nc must be >= 1")
    lg = math.log2(d_nc)
    if family == "cz":
        return lg / (STABILIZER_RANK_EXPONENT * d_nc)
    if family == "cs":
        return 2.0 * (lg - d_nc / 4) / (STABILIZER_RANK_EXPONENT * d_nc)
    raise CostError(f"unknown family {family!r}")


def crossover_dnc(family: str, p: float, start: int = 2, limit: int = 10**6) -> int | None:
    """First integer ``d_nc >= start`` with ``threshold_p(family, d_nc) <= p``."""
    if not p > 0:
        raise CostError("p must be positive")
    for d in range(start, limit + 1):
        if threshold_p(family, d) <= p:
            return d
    return None


def supremacy_cycle_rank(census: dict[str, int] | None = None) -> float:
    """log2 of the stabilizer projector rank of one cycle from a gate census."""
    census = DEFAULT_CENSUS if census is None else census
    total = 0.0
    for cls, count in census.items():
        if cls not in CYCLE_CLASS_RANKS:
            raise CostError(f"unknown gate class {cls!r}")
        if count < 0:
            raise CostError("census counts must be non-negative")
        total += count * math.log2(CYCLE_CLASS_RANKS[cls])
    return total


def emit_threshold_csv(d_range, out, families=("cz", "cs")) -> int:
    """Write ``d_nc`` and threshold columns; returns the number of data rows."""
    d_values = list(d_range)
    if not d_values:
        raise CostError("empty d_nc range")
    own = isinstance(out, (str, bytes)) or hasattr(out, "__fspath__")
    fh = open(out, "w", encoding="utf-8", newline="") if own else out
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["d_nc"] + [f"p_threshold_{f}" for f in families])
        for d in d_values:
            w.writerow([d] + [f"{threshold_p(f, d):.6g}" for f in families])
    finally:
        if own:
            fh.close()
    return len(d_values)


# --- engine work estimates --------------------------------------------------


def spir_inner_products(kappas) -> int:
    """Inner-product events of the SPIR recursion for per-layer ranks ``kappas``.

    ``I() = 1``, ``I(k) = k`` and otherwise the middle layer ``m = ceil(d/2)``
    contributes ``kappa_m * (I(left) + I(right))``.
    """
    kappas = list(kappas)
    d = len(kappas)
    if d == 0:
        return 1
    if d == 1:
        return kappas[0]
    m = (d + 1) // 2
    return kappas[m - 1] * (spir_inner_products(kappas[: m - 1]) + spir_inner_products(kappas[m:]))


def spc_inner_products(kappas) -> int:
    """Overlaps computed by SPC: ``sum_j kappa_{j-1} kappa_j`` plus the final read-out."""
    prev = 1
    total = 0
    for k in kappas:
        total += prev * k
        prev = k
    return total + prev


def spir_cost_log2(kappas, n: int) -> float:
    return math.log2(spir_inner_products(kappas)) + 3 * _log2(n)


def spc_cost_log2(kappas, n: int) -> float:
    return math.log2(spc_inner_products(kappas)) + 3 * _log2(n)
