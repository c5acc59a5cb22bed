"""Bilocal inequality with ternary end-party inputs: B = S/3 - T <= 3 + 5 Z.

Bob's four-valued outcome enters a correlator through ``B^y(b) = (m_b)_y``,
the y-th sign of the tetrahedron vector for outcome ``b``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from .measmodel import TETRAHEDRON_SIGNS
from .scenario import CorrelationTensor, pair_probabilities, value_maps

BOB_SIGNS = TETRAHEDRON_SIGNS.astype(float)  # [b-1, y-1]

_PERMS = list(itertools.permutations(range(3)))


def bob_sign(b: int, y: int) -> int:
    if b not in (1, 2, 3, 4) or y not in (1, 2, 3):
        raise ValueError(f"invalid outcome/setting ({b}, {y})")
    return int(TETRAHEDRON_SIGNS[b - 1, y - 1])


@dataclass(frozen=True)
class PairDistribution:
    """P(a, b, c | x, z) for Alice_n and Charlie_m, indexed ``[x, z, a, b, c]``."""

    n: int
    m: int
    probs: np.ndarray
    alice_values: np.ndarray
    charlie_values: np.ndarray

    @classmethod
    def from_array(cls, probs, n: int = 1, m: int = 1) -> "PairDistribution":
        va, vc = value_maps(n, m)
        return cls(n, m, np.asarray(probs, dtype=float), va, vc)


def marginalize(tensor: CorrelationTensor, n: int, m: int) -> PairDistribution:
    return PairDistribution.from_array(pair_probabilities(tensor.probs, n, m), n, m)


def all_correlators(dist: PairDistribution) -> dict[str, np.ndarray]:
    """Every one-, two- and three-party correlator, keyed by which parties appear.

    Array axes follow the parties' setting indices (0-based) in A, B, C order.
    Parties left out are summed over their outcomes and averaged over settings.
    """
    p = dist.probs
    # prepend a constant-one "value" so absent parties are summed out
    va = np.vstack([np.ones(2), dist.alice_values])
    vb = np.hstack([np.ones((4, 1)), BOB_SIGNS])
    vc = np.vstack([np.ones(2), dist.charlie_values])
    full = np.einsum("xzabc,ia,bj,kc->xzijk", p, va, vb, vc)
    return {
        "ABC": full[:, :, 1, 1:, 1].transpose(0, 2, 1),
        "AB": full[:, :, 1, 1:, 0].mean(axis=1),
        "BC": full[:, :, 0, 1:, 1].mean(axis=0),
        "AC": full[:, :, 1, 0, 1],
        "A": full[:, :, 1, 0, 0].mean(axis=1),
        "B": full[:, :, 0, 1:, 0].mean(axis=(0, 1)),
        "C": full[:, :, 0, 0, 1].mean(axis=0),
    }


_DESCRIPTOR = re.compile(r"\s*([ABC])\s*([123])\s*")


def parse_descriptor(which: str) -> dict[str, int]:
    """Parse e.g. ``"A1 B2 C3"`` or ``"A1C2"`` into ``{"A": 0, "C": 1}``."""
    if not isinstance(which, str) or not which.strip():
        raise ValueError(f"malformed correlator descriptor {which!r}")
    parts: dict[str, int] = {}
    pos = 0
    for mt in _DESCRIPTOR.finditer(which):
        if mt.start() != pos or mt.group(1) in parts:
            raise ValueError(f"malformed correlator descriptor {which!r}")
        parts[mt.group(1)] = int(mt.group(2)) - 1
        pos = mt.end()
    if pos != len(which) or not parts:
        raise ValueError(f"malformed correlator descriptor {which!r}")
    return parts


def correlator(dist: PairDistribution, which: str) -> float:
    parts = parse_descriptor(which)
    key = "".join(k for k in "ABC" if k in parts)
    return float(all_correlators(dist)[key][tuple(parts[k] for k in key)])


def _other_index() -> list[tuple[str, tuple[int, ...]]]:
    out: list[tuple[str, tuple[int, ...]]] = []
    out += [("A", (x,)) for x in range(3)]
    out += [("B", (y,)) for y in range(3)]
    out += [("C", (z,)) for z in range(3)]
    out += [("AC", (x, z)) for x in range(3) for z in range(3)]
    out += [("AB", (x, y)) for x in range(3) for y in range(3) if x != y]
    out += [("BC", (y, z)) for y in range(3) for z in range(3) if y != z]
    out += [("ABC", (x, y, z)) for x in range(3) for y in range(3) for z in range(3)
            if len({x, y, z}) < 3]
    return out


OTHER_CORRELATORS = tuple(_other_index())
assert len(OTHER_CORRELATORS) == 51


def _label(key: str, idx: tuple[int, ...]) -> str:
    return "".join(f"{p}{i + 1}" for p, i in zip(key, idx))


OTHER_LABELS = tuple(_label(k, i) for k, i in OTHER_CORRELATORS)


def tbg_terms(dist: PairDistribution) -> tuple[float, float, np.ndarray]:
    """Return ``(S, T, others)`` with ``others`` in ``OTHER_LABELS`` order."""
    c = all_correlators(dist)
    S = float(np.trace(c["BC"]) - np.trace(c["AB"]))
    T = float(sum(c["ABC"][p] for p in _PERMS))
    others = np.array([c[k][i] for k, i in OTHER_CORRELATORS])
    return S, T, others


@dataclass(frozen=True)
class TbgReport:
    S: float
    T: float
    Z: float
    B: float
    bound: float
    violated: bool
    z_dial: float | None
    others: np.ndarray
    n: int = 1
    m: int = 1

    @property
    def z_mode(self) -> str:
        return "computed" if self.z_dial is None else "dial"

    @property
    def z_used(self) -> float:
        return self.Z if self.z_dial is None else self.z_dial

    def correlators(self) -> list[tuple[str, float]]:
        return list(zip(OTHER_LABELS, (float(v) for v in self.others)))

    def to_dict(self) -> dict:
        return {
            "pair": [self.n, self.m],
            "s": self.S,
            "t": self.T,
            "z": self.Z,
            "b": self.B,
            "bound": self.bound,
            "violated": self.violated,
            "z_mode": self.z_mode,
            "z_dial": self.z_dial,
            "correlators": [{"label": k, "value": v} for k, v in self.correlators()],
        }


def evaluate(dist: PairDistribution, z_dial: float | None = None) -> TbgReport:
    """Score a pair distribution against ``S/3 - T <= 3 + 5 Z``.

    With ``z_dial=None`` Z is the largest absolute "other" correlator;
    otherwise the bound uses ``z_dial`` and Z is still reported as computed.
    """
    S, T, others = tbg_terms(dist)
    Z = float(np.max(np.abs(others)))
    B = S / 3 - T
    z_used = Z if z_dial is None else float(z_dial)
    bound = 3 + 5 * z_used
    return TbgReport(S, T, Z, B, bound, bool(B > bound), None if z_dial is None else float(z_dial),
                     others, dist.n, dist.m)


PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))


def evaluate_pairs(tensor: CorrelationTensor, z_dial: float | None = None) -> dict[tuple[int, int], TbgReport]:
    return {nm: evaluate(marginalize(tensor, *nm), z_dial) for nm in PAIRS}
