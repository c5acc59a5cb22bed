"""Extended bilocal experiment: two sources, EJM for Bob, two observers per side.

Measurement order is Bob, Alice1 (weak), Alice2 (strong), Charlie1 (weak),
Charlie2 (strong).  The joint distribution is enumerated exactly over all 81
setting combinations and 128 outcome tuples.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernel
from .matcore import DensityMatrix
from .measmodel import PointerKind, ejm_basis, pointer_pair, projector, triad
from .weakmeas import STRONG_VALUES, WEAK_VALUES, ejm_project, weak_weights

SINGLET = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
OPTIMAL_ANGLES = (math.pi / 4, math.pi / 4, 0.0)
AXIS_ANGLES = (0.0, 0.0, 0.0)

NORMALIZATION_TOL = 1e-10
NO_SIGNALLING_TOL = 1e-10
DOWNSTREAM_TOL = 1e-12

# tensor axes
X1, X2, Z1, Z2, A1, A2, B, C1, C2 = range(9)


class NumericInvariantError(RuntimeError):
    """A computed distribution broke one of its structural invariants."""


class SourceKind(str, enum.Enum):
    SINGLET = "singlet"
    WERNER = "werner"


@dataclass(frozen=True)
class SourceSpec:
    kind: SourceKind = SourceKind.SINGLET
    v: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        object.__setattr__(self, "v", float(self.v))

    @classmethod
    def werner(cls, v: float) -> "SourceSpec":
        return cls(SourceKind.WERNER, v)

    @property
    def visibility(self) -> float:
        return 1.0 if self.kind is SourceKind.SINGLET else self.v


def make_source(spec: SourceSpec) -> DensityMatrix:
    """Werner state ``v |psi-><psi-| + (1-v) I/4``; a singlet is ``v = 1``."""
    v = spec.visibility
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {v!r}")
    rho = v * np.outer(SINGLET, SINGLET.conj()) + (1 - v) / 4 * np.eye(4)
    return DensityMatrix(rho, (2, 2))


def _angles(t) -> tuple[float, float, float]:
    t = tuple(float(a) for a in t)
    if len(t) != 3 or not all(math.isfinite(a) for a in t):
        raise ValueError(f"angle triple must be three finite numbers, got {t!r}")
    return t


@dataclass(frozen=True)
class ScenarioConfig:
    source1: SourceSpec = field(default_factory=SourceSpec)
    source2: SourceSpec = field(default_factory=SourceSpec)
    theta: float = 0.0
    pointer: PointerKind = PointerKind.SQUARE
    G1: float = 1.0
    G2: float = 1.0
    angles_a1: tuple[float, float, float] = OPTIMAL_ANGLES
    angles_a2: tuple[float, float, float] = OPTIMAL_ANGLES
    angles_c1: tuple[float, float, float] = OPTIMAL_ANGLES
    angles_c2: tuple[float, float, float] = OPTIMAL_ANGLES

    def __post_init__(self):
        object.__setattr__(self, "pointer", PointerKind(self.pointer))
        for name in ("angles_a1", "angles_a2", "angles_c1", "angles_c2"):
            object.__setattr__(self, name, _angles(getattr(self, name)))
        for name in ("G1", "G2"):
            g = float(getattr(self, name))
            if not 0.0 <= g <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {g!r}")
            object.__setattr__(self, name, g)
        if not 0.0 <= float(self.theta) <= math.pi / 2 + 1e-15:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta!r}")
        object.__setattr__(self, "theta", float(self.theta))

    def replace(self, **changes) -> "ScenarioConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return ScenarioConfig(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pointer"] = self.pointer.value
        for s in ("source1", "source2"):
            d[s] = {"kind": getattr(self, s).kind.value, "v": getattr(self, s).v}
        for k in ("angles_a1", "angles_a2", "angles_c1", "angles_c2"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        for s in ("source1", "source2"):
            if s in d and isinstance(d[s], dict):
                d[s] = SourceSpec(**d[s])
        for k in ("angles_a1", "angles_a2", "angles_c1", "angles_c2"):
            if k in d:
                d[k] = tuple(d[k])
        return cls(**d)


@dataclass(frozen=True)
class CorrelationTensor:
    """Exact P(a1, a2, b, c1, c2 | x1, x2, z1, z2).

    ``probs`` is indexed ``[x1, x2, z1, z2, a1, a2, b, c1, c2]`` with settings
    and outcome bits 0-based (setting ``x`` is stored at ``x - 1``, EJM outcome
    ``b`` at ``b - 1``).
    """

    probs: np.ndarray
    config: ScenarioConfig

    def pair(self, n: int, m: int) -> np.ndarray:
        return pair_probabilities(self.probs, n, m)


@functools.lru_cache(maxsize=256)
def conditional_ac_states(source1: SourceSpec, source2: SourceSpec, theta: float) -> np.ndarray:
    """Unnormalized (Alice, Charlie) states after Bob's EJM outcome, shape (4, 4, 4)."""
    rho = make_source(source1).kron(make_source(source2))
    basis = ejm_basis(theta)
    out = np.array([ejm_project(rho, basis, b).mat for b in (1, 2, 3, 4)])
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=256)
def triad_projectors(angles: tuple[float, float, float]) -> np.ndarray:
    """``out[x, k]`` is the projector for outcome bit ``k`` of observable ``x``."""
    t = triad(*angles)
    out = np.array([[projector(o, k) for k in (0, 1)] for o in t.observables])
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=64)
def _joint_source_and_bob(source1: SourceSpec, source2: SourceSpec, theta: float):
    rho = np.kron(make_source(source1).mat, make_source(source2).mat).reshape(2, 4, 2, 2, 4, 2)
    basis = ejm_basis(theta)
    bob = np.array([basis.projector(b) for b in (1, 2, 3, 4)])
    rho.setflags(write=False)
    bob.setflags(write=False)
    return rho, bob


def run(config: ScenarioConfig, check: bool = True, backend: str | None = None) -> CorrelationTensor:
    rho_ac = conditional_ac_states(config.source1, config.source2, config.theta)
    fg1 = pointer_pair(config.pointer, config.G1)
    fg2 = pointer_pair(config.pointer, config.G2)
    wa = np.array([weak_weights(fg1, a) for a in (0, 1)])
    wc = np.array([weak_weights(fg2, c) for c in (0, 1)])
    probs = kernel.sequential_tensor(
        rho_ac,
        triad_projectors(config.angles_a1),
        triad_projectors(config.angles_a2),
        triad_projectors(config.angles_c1),
        triad_projectors(config.angles_c2),
        wa, wc,
        backend=backend,
    )
    probs.setflags(write=False)
    tensor = CorrelationTensor(probs, config)
    if check:
        check_tensor(tensor)
    return tensor


def pair_probabilities(probs: np.ndarray, n: int, m: int) -> np.ndarray:
    """P(a, b, c | x, z) for Alice_n and Charlie_m, indexed ``[x, z, a, b, c]``.

    The unobserved Alice and Charlie are summed over their outcomes and averaged
    uniformly over their three settings (overall prefactor 1/9).
    """
    if n not in (1, 2) or m not in (1, 2):
        raise ValueError(f"pair indices must be 1 or 2, got ({n}, {m})")
    p = np.asarray(probs)
    drop_out = [A2 if n == 1 else A1, C2 if m == 1 else C1]
    drop_set = [X2 if n == 1 else X1, Z2 if m == 1 else Z1]
    p = p.sum(axis=tuple(drop_out)).mean(axis=tuple(drop_set))
    # remaining axes: x, z, a, b, c
    return p


def three_party_distribution(config: ScenarioConfig, n: int = 1, m: int = 1) -> np.ndarray:
    """Direct P(a, b, c | x, z) for Alice_1 and Charlie_1 with later observers removed.

    Uses measurement effects on the full four-qubit state rather than the
    sequential state-update route, so it serves as an independent cross-check.
    Only ``(n, m) == (1, 1)`` is supported.
    """
    if (n, m) != (1, 1):
        raise ValueError("direct route only covers the (1, 1) pair")
    r, bob = _joint_source_and_bob(config.source1, config.source2, config.theta)

    def effects(angles, G):
        fg = pointer_pair(config.pointer, G)
        out = np.empty((3, 2, 2, 2), dtype=complex)
        for x, obs in enumerate(triad(*angles).observables):
            p0, p1 = projector(obs, 0), projector(obs, 1)
            for a in (0, 1):
                w_id, w1, w0 = weak_weights(fg, a)
                out[x, a] = w_id * np.eye(2) + w1 * p1 + w0 * p0
        return out

    ea = effects(config.angles_a1, config.G1)
    ec = effects(config.angles_c1, config.G2)
    # tr[rho (E_A x Pi_b x E_C)] with rho indexed (A, B1B2, C)
    left = np.einsum("ipkjql,xaji->xapkql", r, ea)
    mid = np.einsum("xapkql,bqp->xabkl", left, bob)
    return np.einsum("xabkl,zclk->xzabc", mid, ec).real


def value_maps(n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Outcome-bit to ±1 value maps for Alice_n and Charlie_m."""
    va = WEAK_VALUES if n == 1 else STRONG_VALUES
    vc = WEAK_VALUES if m == 1 else STRONG_VALUES
    return va, vc


def invariant_failures(tensor: CorrelationTensor) -> list[str]:
    """Check normalization, no-signalling and downstream independence."""
    p = np.asarray(tensor.probs)
    failures = []
    norms = p.sum(axis=(A1, A2, B, C1, C2))
    if np.max(np.abs(norms - 1)) > NORMALIZATION_TOL:
        failures.append(f"normalization: max deviation {np.max(np.abs(norms - 1)):.3e}")
    if p.min() < -NORMALIZATION_TOL or p.max() > 1 + NORMALIZATION_TOL:
        failures.append("probability outside [0, 1]")

    def spread(marg, setting_axes):
        ref = marg.mean(axis=setting_axes, keepdims=True)
        return float(np.max(np.abs(marg - ref)))

    # each side's settings cannot influence the other side or Bob, and a later
    # observer cannot influence an earlier one on the same side
    checks = {
        "alice settings -> bob/charlie": (p.sum(axis=(A1, A2), keepdims=True), (X1, X2)),
        "charlie settings -> alice/bob": (p.sum(axis=(C1, C2), keepdims=True), (Z1, Z2)),
        "alice2 setting -> earlier": (p.sum(axis=A2, keepdims=True), (X2,)),
        "charlie2 setting -> earlier": (p.sum(axis=C2, keepdims=True), (Z2,)),
    }
    for name, (marg, axes) in checks.items():
        s = spread(marg, axes)
        if s > NO_SIGNALLING_TOL:
            failures.append(f"no-signalling ({name}): {s:.3e}")

    direct = three_party_distribution(tensor.config)
    dev = float(np.max(np.abs(pair_probabilities(p, 1, 1) - direct)))
    if dev > DOWNSTREAM_TOL:
        failures.append(f"downstream independence: {dev:.3e}")
    return failures


def check_tensor(tensor: CorrelationTensor) -> None:
    failures = invariant_failures(tensor)
    if failures:
        raise NumericInvariantError("; ".join(failures))
