"""Parameter sweeps, simultaneous-violation windows and threshold searches."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .measmodel import PointerKind, pointer_pair
from .scenario import OPTIMAL_ANGLES, ScenarioConfig, SourceSpec, run
from .tbg import PAIRS, TbgReport, evaluate_pairs

Sources = tuple[SourceSpec, SourceSpec]
DEFAULT_SOURCES: Sources = (SourceSpec(), SourceSpec())


@dataclass(frozen=True)
class SweepRow:
    G: float
    F: float
    reports: dict[tuple[int, int], TbgReport]

    @property
    def all_violated(self) -> bool:
        return all(r.violated for r in self.reports.values())

    def B(self, n: int, m: int) -> float:
        return self.reports[(n, m)].B

    def Z(self, n: int, m: int) -> float:
        return self.reports[(n, m)].Z


@dataclass(frozen=True)
class ThresholdResult:
    theta: float
    pointer: PointerKind
    mode: str
    z_onset: float | None
    g_window: tuple[tuple[float, float], ...] = ()
    best_G: float | None = None
    best_min_B: float | None = None

    @property
    def found(self) -> bool:
        return bool(self.g_window)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "pointer": self.pointer.value,
            "mode": self.mode,
            "z_onset": self.z_onset,
            "g_window": [list(w) for w in self.g_window],
            "best_G": self.best_G,
            "best_min_B": self.best_min_B,
        }


def base_config(theta: float, pointer, sources: Sources = DEFAULT_SOURCES,
                angles=OPTIMAL_ANGLES) -> ScenarioConfig:
    return ScenarioConfig(source1=sources[0], source2=sources[1], theta=theta,
                          pointer=PointerKind(pointer),
                          angles_a1=angles, angles_a2=angles, angles_c1=angles, angles_c2=angles)


def evaluate_point(config: ScenarioConfig, G: float, z_dial: float | None = None,
                   backend: str | None = None) -> SweepRow:
    """Score all four pairs with both weak observers at sharpness ``G``."""
    cfg = config.replace(G1=G, G2=G)
    reports = evaluate_pairs(run(cfg, backend=backend), z_dial)
    return SweepRow(float(G), pointer_pair(cfg.pointer, G).F, reports)


def g_grid(steps: int) -> list[float]:
    if steps < 1:
        raise ValueError("grid needs at least one point")
    if steps == 1:
        return [0.0]
    return [i / (steps - 1) for i in range(steps)]


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sweep_g(theta: float, pointer, grid: Sequence[float], sources: Sources = DEFAULT_SOURCES,
            z_dial: float | None = None, angles=OPTIMAL_ANGLES, workers: int = 1,
            backend: str | None = None) -> list[SweepRow]:
    for g in grid:
        if not 0.0 <= g <= 1.0:
            raise ValueError(f"grid value {g!r} outside [0, 1]")
    cfg = base_config(theta, pointer, sources, angles)
    return _map(lambda g: evaluate_point(cfg, g, z_dial, backend), list(grid), workers)


def _violation_margin(row: SweepRow, pairs=PAIRS) -> float:
    return min(row.reports[nm].B - row.reports[nm].bound for nm in pairs)


def _bisect_boundary(f: Callable[[float], float], inside: float, outside: float, tol: float) -> float:
    """Shrink to the last point where ``f > 0`` between ``inside`` and ``outside``."""
    while abs(outside - inside) > tol:
        mid = 0.5 * (inside + outside)
        if f(mid) > 0:
            inside = mid
        else:
            outside = mid
    return inside


def violation_windows(f: Callable[[float], float], step: float = 1e-3, tol: float = 1e-6,
                      workers: int = 1) -> tuple[tuple[float, float], ...]:
    """G intervals in [0, 1] on which ``f(G) > 0`` (grid scan + bisection)."""
    n = int(math.ceil(1.0 / step)) + 1
    grid = [i / (n - 1) for i in range(n)]
    vals = _map(f, grid, workers)
    windows = []
    i = 0
    while i < n:
        if vals[i] > 0:
            j = i
            while j + 1 < n and vals[j + 1] > 0:
                j += 1
            lo = grid[i] if i == 0 else _bisect_boundary(f, grid[i], grid[i - 1], tol)
            hi = grid[j] if j == n - 1 else _bisect_boundary(f, grid[j], grid[j + 1], tol)
            windows.append((lo, hi))
            i = j + 1
        else:
            i += 1
    return tuple(windows)


def _max_min_B(cfg: ScenarioConfig, pairs, step: float, backend=None) -> tuple[float, float]:
    """Maximize ``min_nm B_nm`` over G: grid scan, then bounded refinement."""
    def f(g):
        row = evaluate_point(cfg, g, backend=backend)
        return min(row.reports[nm].B for nm in pairs)

    n = int(math.ceil(1.0 / step)) + 1
    grid = [i / (n - 1) for i in range(n)]
    vals = [f(g) for g in grid]
    k = int(np.argmax(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n - 1)]
    best_g, best = grid[k], vals[k]
    if hi > lo:
        res = minimize_scalar(lambda g: -f(g), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-8})
        if -res.fun > best:
            best_g, best = float(res.x), float(-res.fun)
    return best_g, best


def find_z_onset(theta: float, pointer, sources: Sources = DEFAULT_SOURCES, mode: str = "computed",
                 step: float = 1e-3, tol: float = 1e-6, angles=OPTIMAL_ANGLES, workers: int = 1,
                 backend: str | None = None) -> ThresholdResult:
    """Onset of simultaneous violation of all four pairs.

    ``computed``: Z is taken from each pair's own correlators; the result holds
    the G windows where every pair violates and the largest pair Z at the
    lower edge of the first window.  ``dial``: the largest common bound
    parameter z for which some G violates all four, ``(max_G min_nm B - 3)/5``.
    Both return an empty window (``z_onset=None``) when nothing violates.
    """
    pointer = PointerKind(pointer)
    cfg = base_config(theta, pointer, sources, angles)
    if mode == "computed":
        windows = violation_windows(
            lambda g: _violation_margin(evaluate_point(cfg, g, backend=backend)),
            step, tol, workers)
        best_g, best = _max_min_B(cfg, PAIRS, step * 10, backend)
        if not windows:
            return ThresholdResult(theta, pointer, mode, None, (), best_g, best)
        edge = evaluate_point(cfg, windows[0][0], backend=backend)
        z = max(r.Z for r in edge.reports.values())
        return ThresholdResult(theta, pointer, mode, z, windows, best_g, best)
    if mode == "dial":
        best_g, best = _max_min_B(cfg, PAIRS, step, backend)
        z = (best - 3) / 5
        if z < 0:
            return ThresholdResult(theta, pointer, mode, None, (), best_g, best)
        return ThresholdResult(theta, pointer, mode, z, ((best_g, best_g),), best_g, best)
    raise ValueError(f"unknown z mode {mode!r}")


def theta_scan(thetas: Sequence[float], pointers: Sequence, mode: str = "computed",
               sources: Sources = DEFAULT_SOURCES, step: float = 1e-3, workers: int = 1,
               backend: str | None = None) -> list[ThresholdResult]:
    return [find_z_onset(t, p, sources, mode, step, workers=workers, backend=backend)
            for p in pointers for t in thetas]


@dataclass(frozen=True)
class VisibilityResult:
    theta: float
    z: float | None
    pointer: PointerKind
    V: float | None
    best_G: float | None = None
    pairs: tuple[tuple[int, int], ...] = ((1, 1), (2, 2))
    note: str = field(default="")

    def to_dict(self) -> dict:
        return {"theta": self.theta, "z": self.z, "pointer": self.pointer.value, "V": self.V,
                "best_G": self.best_G, "pairs": [list(p) for p in self.pairs], "note": self.note}


NO_VISIBILITY = "no visibility in [0, 1] suffices"


def visibility_margin(theta: float, z: float | None, pointer, v: float, g_steps: int = 101,
                      pairs=((1, 1), (2, 2)), angles=OPTIMAL_ANGLES,
                      backend: str | None = None) -> tuple[float, float]:
    """``max_G min_pairs (B - bound)`` at symmetric visibility ``v``; returns (margin, G)."""
    src = SourceSpec.werner(v)
    cfg = base_config(theta, pointer, (src, src), angles)
    best = (-math.inf, 0.0)
    for g in g_grid(g_steps):
        m = _violation_margin(evaluate_point(cfg, g, z, backend), pairs)
        if m > best[0]:
            best = (m, g)
    return best


def find_critical_visibility(theta: float, z: float | None, pointer, tol: float = 1e-4,
                             g_steps: int = 101, pairs=((1, 1), (2, 2)), angles=OPTIMAL_ANGLES,
                             backend: str | None = None) -> VisibilityResult:
    """Smallest symmetric visibility at which pairs (1,1) and (2,2) both violate.

    ``z`` is the bound parameter (``None`` uses each pair's computed Z).
    V = sqrt(v1 v2) = v for equal sources.
    """
    if z is not None and z < 0:
        raise ValueError("z must be non-negative")
    pointer = PointerKind(pointer)
    pairs = tuple(tuple(p) for p in pairs)

    def margin(v):
        return visibility_margin(theta, z, pointer, v, g_steps, pairs, angles, backend)

    top, g_top = margin(1.0)
    if top <= 0:
        return VisibilityResult(theta, z, pointer, None, None, pairs, NO_VISIBILITY)
    lo, hi, g_hi = 0.0, 1.0, g_top
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        m, g = margin(mid)
        if m > 0:
            hi, g_hi = mid, g
        else:
            lo = mid
    return VisibilityResult(theta, z, pointer, hi, g_hi, pairs)
