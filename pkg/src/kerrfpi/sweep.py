"""Quasi-static hysteresis sweeps along the stationary branches."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidParameterError, SolverError
from .params import PhysicalParams
from .stationary import StationaryState, stationary_photon_numbers

Control = Literal["p_eff", "delta0"]
Direction = Literal["up", "down"]


@dataclass(frozen=True)
class Jump:
    index: int
    from_n: float
    to_n: float


@dataclass
class SweepTrace:
    control: Control
    direction: Direction
    grid: np.ndarray
    states: list[StationaryState] = field(default_factory=list)
    jumps: list[Jump] = field(default_factory=list)

    @property
    def n(self) -> np.ndarray:
        return np.array([s.n for s in self.states])


def _at(p0: PhysicalParams, control: Control, value: float) -> PhysicalParams:
    if control == "p_eff":
        return p0.with_p_eff(value)
    if control == "delta0":
        return p0.replace(delta0=value)
    raise InvalidParameterError(f"unknown sweep control {control!r}")


def sweep(
    p0: PhysicalParams,
    control: Control,
    grid: Sequence[float],
    direction: Direction = "up",
    start: Literal["lower", "upper"] | None = None,
) -> SweepTrace:
    """Follow a stable branch while ``control`` steps through ``grid``.

    The tracked branch keeps its label (lower/upper) while two stable
    states coexist. When the count of stable states drops to one, the
    colliding pair is the one with the smaller previous gap to the middle
    root; if the tracked branch was part of it, a jump to the surviving
    state is recorded. ``start`` picks the initial branch when the first
    grid point is already bistable (default: lower for ``up``, upper for
    ``down``).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidParameterError("sweep grid must be a non-empty 1-d sequence")
    steps = np.diff(grid)
    if direction == "up" and np.any(steps <= 0):
        raise InvalidParameterError("grid must be strictly increasing for an upward sweep")
    if direction == "down" and np.any(steps >= 0):
        raise InvalidParameterError("grid must be strictly decreasing for a downward sweep")
    if direction not in ("up", "down"):
        raise InvalidParameterError(f"unknown direction {direction!r}")
    start = start or ("lower" if direction == "up" else "upper")

    trace = SweepTrace(control, direction, grid)
    tracked: StationaryState | None = None
    label = start
    prev_all: list[StationaryState] = []
    for i, value in enumerate(grid):
        roots = stationary_photon_numbers(_at(p0, control, float(value)))
        stable = [s for s in roots if s.stable]
        if not stable:
            raise SolverError(f"no stable stationary state at {control}={value}")
        if tracked is None:
            pick = stable[0] if label == "lower" or len(stable) == 1 else stable[-1]
        elif len(stable) == 2:
            prev_stable = [s for s in prev_all if s.stable]
            if len(prev_stable) == 2:
                pick = stable[0] if label == "lower" else stable[1]
            else:
                pick = min(stable, key=lambda s: abs(s.n - tracked.n))
        else:
            pick = stable[0]
            prev_stable = [s for s in prev_all if s.stable]
            if len(prev_stable) == 2:
                vanished = _vanished_side(prev_all, roots)
                if vanished == label:
                    trace.jumps.append(Jump(i, tracked.n, pick.n))
        if len(stable) == 2:
            label = "lower" if pick is stable[0] else "upper"
        trace.states.append(pick)
        tracked = pick
        prev_all = roots
    return trace


def _vanished_side(prev: list[StationaryState], now: list[StationaryState]) -> str:
    """Which stable branch (lower/upper) disappeared between two grid points."""
    marginal = [s for s in now if s.marginal]
    stable_now = [s for s in now if s.stable]
    lower, upper = prev[0].n, prev[-1].n
    if marginal:
        # the fold itself is still on the grid: it sits on the vanishing side
        m = marginal[0].n
        if stable_now and stable_now[0].n > m:
            return "lower"
        return "upper"
    middle = [s.n for s in prev if not s.stable and not s.marginal]
    if middle:
        mid = middle[0]
        return "lower" if (mid - lower) < (upper - mid) else "upper"
    survivor = stable_now[0].n
    return "lower" if abs(survivor - upper) < abs(survivor - lower) else "upper"
