"""Forward/backward convergence and Cauchy classification for sequences.

In an asymmetric space the two argument orders of the distance are genuinely
different, so a sequence gets four separate verdicts: forward and backward
convergence toward a candidate limit, and forward and backward Cauchy
behaviour of its tail.  Thresholds are scalar: the order-interval condition
"distance below eps * I" reduces to a norm bound for every catalog codomain,
and that is the implemented reading.

Verdicts are evidence over a finite window, not proofs; every verdict
records the tail data it was derived from.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

from .maps import MapSpec
from .metrics import MetricSpec, distance_norm


class WindowTooLarge(Exception):
    """The inspection window does not fit inside the sequence."""


class PreconditionNotEstablished(Exception):
    """A check refused to run because its convergence premise failed."""


class Verdict(Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SequenceTrace:
    """Distance data of a point sequence, ready for classification.

    ``forward_dists[n]`` is the norm of d(candidate, x_n), ``backward_dists``
    the swapped order; both are empty when no candidate was supplied.
    ``pair_dists`` holds (p, n, d(x_p, x_n), d(x_n, x_p)) norms for p < n
    inside the inspection window.
    """

    points: tuple
    metric_name: str
    forward_dists: tuple[float, ...]
    backward_dists: tuple[float, ...]
    pair_dists: tuple[tuple[int, int, float, float], ...]


@dataclass(frozen=True)
class ConvergenceVerdict:
    forward: Verdict
    backward: Verdict
    forward_cauchy: Verdict
    backward_cauchy: Verdict
    evidence: dict

    def to_json_dict(self) -> dict:
        return {
            "forward": self.forward.value,
            "backward": self.backward.value,
            "forward_cauchy": self.forward_cauchy.value,
            "backward_cauchy": self.backward_cauchy.value,
            "evidence": self.evidence,
        }


def trace(points: list, metric: MetricSpec, candidate: Any = None,
          window: int | None = None) -> SequenceTrace:
    """Compute the distance arrays a classification needs."""
    pts = tuple(points)
    fwd: tuple[float, ...] = ()
    bwd: tuple[float, ...] = ()
    if candidate is not None:
        fwd = tuple(distance_norm(metric, candidate, x) for x in pts)
        bwd = tuple(distance_norm(metric, x, candidate) for x in pts)
    pairs: list[tuple[int, int, float, float]] = []
    if window is not None and window >= 2:
        start = len(pts) - window
        for p in range(start, len(pts)):
            for n in range(p + 1, len(pts)):
                pairs.append((p, n,
                              distance_norm(metric, pts[p], pts[n]),
                              distance_norm(metric, pts[n], pts[p])))
    return SequenceTrace(pts, metric.name, fwd, bwd, tuple(pairs))


def orbit_trace(map_spec: MapSpec, metric: MetricSpec, seed: Any, length: int,
                candidate: Any = None, window: int | None = None) -> SequenceTrace:
    return trace(map_spec.orbit(seed, length), metric, candidate, window)


def classify(seq: list, candidate: Any, metric: MetricSpec, eps: float,
             window: int) -> ConvergenceVerdict:
    """Four-way convergence verdict over the trailing ``window`` entries.

    Forward convergence requires every d(candidate, x_n) norm in the tail to
    stay at or below ``eps``; backward swaps the argument order.  The Cauchy
    verdicts come from all ordered index pairs inside the tail and are
    INCONCLUSIVE when the window is too small to contain a pair.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if window < 1 or window >= len(seq):
        raise WindowTooLarge(
            f"window {window} does not fit a sequence of length {len(seq)}")
    data = trace(seq, metric, candidate, window)
    tail_fwd = data.forward_dists[-window:]
    tail_bwd = data.backward_dists[-window:]
    forward = Verdict.CONVERGES if max(tail_fwd) <= eps else Verdict.DIVERGES
    backward = Verdict.CONVERGES if max(tail_bwd) <= eps else Verdict.DIVERGES
    if data.pair_dists:
        pair_fwd = max(p[2] for p in data.pair_dists)
        pair_bwd = max(p[3] for p in data.pair_dists)
        forward_cauchy = Verdict.CONVERGES if pair_fwd <= eps else Verdict.DIVERGES
        backward_cauchy = Verdict.CONVERGES if pair_bwd <= eps else Verdict.DIVERGES
    else:
        pair_fwd = pair_bwd = None
        forward_cauchy = backward_cauchy = Verdict.INCONCLUSIVE
    evidence = {
        "eps": eps,
        "window": window,
        "length": len(seq),
        "tail_forward_max": max(tail_fwd),
        "tail_backward_max": max(tail_bwd),
        "pair_forward_max": pair_fwd,
        "pair_backward_max": pair_bwd,
        "tail_forward": list(tail_fwd),
        "tail_backward": list(tail_bwd),
    }
    return ConvergenceVerdict(forward, backward, forward_cauchy,
                              backward_cauchy, evidence)


def limit_uniqueness_check(seq: list, x: Any, y: Any, metric: MetricSpec,
                           eps: float, window: int | None = None) -> bool:
    """Chained-triangle uniqueness probe for a doubly convergent sequence.

    Requires the sequence to forward-converge to ``x`` and backward-converge
    to ``y`` at eps/2 over the window; then d(x, y) <= d(x, x_n) + d(x_n, y)
    forces the two limits together, and the returned flag is whether the
    norm of d(x, y) is within ``eps``.
    """
    if window is None:
        window = min(10, len(seq) - 1)
    fwd = classify(seq, x, metric, eps / 2.0, window)
    bwd = classify(seq, y, metric, eps / 2.0, window)
    if fwd.forward is not Verdict.CONVERGES:
        raise PreconditionNotEstablished("no forward convergence to x at eps/2")
    if bwd.backward is not Verdict.CONVERGES:
        raise PreconditionNotEstablished("no backward convergence to y at eps/2")
    return distance_norm(metric, x, y) <= eps


def orbital_lsc_check(orbit: SequenceTrace | list, x0: Any, map_spec: MapSpec,
                      metric: MetricSpec, tol: float = 1e-9) -> bool:
    """Lower-semicontinuity probe of G(x) = d(x, Tx) along an orbit.

    Compares G at the candidate limit against the running infimum of G over
    the trailing half of the orbit.  A finite orbit can only estimate the
    liminf, so this is evidence with an explicit window, not a proof.
    """
    points = orbit.points if isinstance(orbit, SequenceTrace) else tuple(orbit)
    g0 = distance_norm(metric, x0, map_spec.apply(x0))
    tail = points[len(points) // 2:]
    if not tail:
        return g0 <= tol
    liminf_est = min(distance_norm(metric, p, map_spec.apply(p)) for p in tail)
    return g0 <= liminf_est + tol
