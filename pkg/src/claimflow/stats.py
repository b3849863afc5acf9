"""Survival estimation and rank correlation, self-contained.

Two primitives used by the longitudinal analytics:

* :func:`kaplan_meier` — product-limit survival estimator with
  right-censoring.  At each distinct event time t_i,
  S(t_i) = S(t_{i-1}) * (1 - d_i / n_i), where d_i counts events at t_i
  and n_i counts observations still at risk.  Censored observations at
  t_i remain in the risk set for events at t_i (event-before-censoring)
  and leave it afterwards.

* :func:`spearman` — Pearson correlation of average-rank-transformed
  sequences; tied values receive the mean of the rank span they occupy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ClaimflowError


@dataclass(frozen=True)
class SurvivalInput:
    """(duration, event) observations; event False means right-censored."""

    durations: tuple[float, ...]
    events: tuple[bool, ...]

    def __post_init__(self):
        if len(self.durations) != len(self.events):
            raise ClaimflowError("durations and events differ in length")
        if any(d < 0 for d in self.durations):
            raise ClaimflowError("negative duration in survival input")


@dataclass(frozen=True)
class SurvivalCurve:
    """Step function sampled at the distinct event times, ascending."""

    times: tuple[float, ...]
    survival: tuple[float, ...]
    at_risk: tuple[int, ...]
    events: tuple[int, ...]

    def rows(self) -> list[dict]:
        return [
            {"time": t, "survival": s, "at_risk": n, "events": d}
            for t, s, n, d in zip(self.times, self.survival, self.at_risk,
                                  self.events)
        ]


def kaplan_meier(data: SurvivalInput) -> SurvivalCurve:
    """Product-limit estimate of the survival function.

    Raises on empty input.  With no events the curve is empty (S stays
    at 1 everywhere); with no censoring it equals 1 - ECDF of the event
    times.
    """
    if not data.durations:
        raise ClaimflowError("empty survival input")
    event_times = sorted({d for d, e in zip(data.durations, data.events)
                          if e})
    times, survival, at_risk, events = [], [], [], []
    s = 1.0
    for t in event_times:
        n = sum(1 for d in data.durations if d >= t)
        d_events = sum(1 for d, e in zip(data.durations, data.events)
                       if e and d == t)
        s *= 1.0 - d_events / n
        times.append(t)
        survival.append(s)
        at_risk.append(n)
        events.append(d_events)
    return SurvivalCurve(times=tuple(times), survival=tuple(survival),
                         at_risk=tuple(at_risk), events=tuple(events))


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; runs of equal values share the mean of their span."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        # positions i..j hold equal values; mean rank of (i+1)..(j+1)
        ranks[order[i:j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rho via average ranks then Pearson.

    Exactly 1.0 when the rank vectors coincide and exactly -1.0 when
    they are mirror images; these are the only inputs that reach the
    bounds, so the short-circuit introduces no approximation.
    """
    if len(x) != len(y):
        raise ClaimflowError("length mismatch between x and y")
    n = len(x)
    if n < 2:
        raise ClaimflowError("need at least two observations")
    rx = average_ranks(x)
    ry = average_ranks(y)
    if np.array_equal(rx, ry):
        return 1.0
    if np.array_equal(rx, (n + 1) - ry):
        return -1.0
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(np.dot(dx, dx))
    sy = float(np.dot(dy, dy))
    if sx == 0.0 or sy == 0.0:
        raise ClaimflowError("constant input: correlation undefined")
    rho = float(np.dot(dx, dy) / np.sqrt(sx * sy))
    # float round-off may leak a hair past the bounds
    return max(-1.0, min(1.0, rho))
