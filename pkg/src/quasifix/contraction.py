"""Contraction certificates over sampled pairs and orbits.

Four regimes are recognised:

* forward-global / backward-global -- the sandwich inequality
  ``d(Tx, Ty) <= a* d(x, y) a`` (backward swaps the base pair) must hold for
  every supplied pair, with ``||a|| < 1`` in the certificate's norm kind;
* orbital -- the sandwich is only required between consecutive orbit points
  ``d(Ty, T^2 y) <= a* d(y, Ty) a`` for y running along one orbit;
* two-step -- the one-sided inequality ``d(Ty, T^2 y) <= a d(y, T^2 y)``
  with a positive, structurally commuting coefficient of operator norm at
  most 1/2.  Its certificate also carries ``h = a (I - a)^-1``, the step
  rate the solver uses.

Certificates verify finitely many samples, so they are recorded evidence,
never proofs; every certificate remembers how many samples it checked and
which ones failed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import algebra
from .algebra import (
    AlgebraElement,
    NormKind,
    NotPositive,
    adjoint,
    element_from_json,
    element_to_json,
    inverse_one_minus,
    is_diagonal,
    is_positive,
    leq,
    mul,
    norm,
)
from .maps import MapSpec
from .metrics import MetricSpec, codomain_scalar, eval_metric

from enum import Enum

BISECTION_STEPS = 40

#: The scalar search only accepts coefficients at least this far inside the
#: regime's norm cap.  Closer to the cap the order tolerance can absorb a
#: genuine violation (the inequality gap scales like 1 - c^2), so a map that
#: certifies only within the margin is reported as having no certificate.
SEARCH_CAP_MARGIN = 1e-6


class CoefficientNormTooLarge(Exception):
    """Coefficient norm violates the regime's admissibility gate."""


class NotInCommutant(Exception):
    """Two-step coefficients must come from a commuting realization."""


class Regime(Enum):
    FORWARD_GLOBAL = "forward-global"
    BACKWARD_GLOBAL = "backward-global"
    ORBITAL = "orbital"
    TWO_STEP = "two-step"


@dataclass(frozen=True)
class ContractionCertificate:
    regime: Regime
    a: AlgebraElement
    norm_kind: NormKind
    a_norm: float
    samples_checked: int
    violations: tuple
    seed_point: Any = None
    h: AlgebraElement | None = None
    h_norm: float | None = None
    map_name: str = ""
    metric_name: str = ""

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "regime": self.regime.value,
            "a": element_to_json(self.a),
            "norm_kind": self.norm_kind.value,
            "a_norm": self.a_norm,
            "samples_checked": self.samples_checked,
            "violations": [_violation_json(v) for v in self.violations],
            "seed_point": _point_json(self.seed_point),
            "h": None if self.h is None else element_to_json(self.h),
            "h_norm": self.h_norm,
            "map": self.map_name,
            "metric": self.metric_name,
            "valid": self.valid,
        }


def certificate_from_json(obj: dict) -> ContractionCertificate:
    return ContractionCertificate(
        regime=Regime(obj["regime"]),
        a=element_from_json(obj["a"]),
        norm_kind=NormKind(obj["norm_kind"]),
        a_norm=float(obj["a_norm"]),
        samples_checked=int(obj["samples_checked"]),
        violations=tuple(obj.get("violations", ())),
        seed_point=obj.get("seed_point"),
        h=None if obj.get("h") is None else element_from_json(obj["h"]),
        h_norm=obj.get("h_norm"),
        map_name=obj.get("map", ""),
        metric_name=obj.get("metric", ""),
    )


def _point_json(p: Any) -> Any:
    if p is None:
        return None
    if isinstance(p, np.ndarray):
        return p.tolist()
    return float(p) if np.isscalar(p) else p


def _violation_json(v: dict) -> dict:
    return {k: _point_json(val) if k in ("x", "y") else val for k, val in v.items()}


def _order_holds(lhs: AlgebraElement, rhs: AlgebraElement,
                 metric: MetricSpec, tol: float) -> bool:
    tolr = tol * (1.0 + norm(rhs, NormKind.OPERATOR))
    return leq(lhs, rhs, metric.order, tolr)


def verify_global(map_spec: MapSpec, metric: MetricSpec, a: AlgebraElement,
                  pairs: list, direction: str = "forward",
                  tol: float = 1e-9) -> ContractionCertificate:
    """Check the sandwich inequality on every supplied ordered pair.

    ``direction`` picks the base distance: "forward" compares against
    a* d(x, y) a, "backward" against a* d(y, x) a.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be forward or backward, got {direction!r}")
    a_norm = norm(a, metric.norm)
    if a_norm >= 1.0:
        raise CoefficientNormTooLarge(
            f"coefficient norm {a_norm:.6f} is not below 1")
    a_star = adjoint(a)
    violations = []
    for x, y in pairs:
        lhs = eval_metric(metric, map_spec.apply(x), map_spec.apply(y))
        base = eval_metric(metric, x, y) if direction == "forward" \
            else eval_metric(metric, y, x)
        rhs = mul(mul(a_star, base), a)
        if not _order_holds(lhs, rhs, metric, tol):
            violations.append({"x": x, "y": y,
                               "lhs_norm": norm(lhs, metric.norm),
                               "rhs_norm": norm(rhs, metric.norm)})
    regime = Regime.FORWARD_GLOBAL if direction == "forward" else Regime.BACKWARD_GLOBAL
    return ContractionCertificate(
        regime=regime, a=a, norm_kind=metric.norm, a_norm=a_norm,
        samples_checked=len(pairs), violations=tuple(violations),
        map_name=map_spec.name, metric_name=metric.name)


def verify_orbital_type(map_spec: MapSpec, metric: MetricSpec, a: AlgebraElement,
                        seed: Any, orbit_len: int = 30,
                        tol: float = 1e-9) -> ContractionCertificate:
    """Check d(Ty, T^2 y) <= a* d(y, Ty) a for y along the orbit of ``seed``."""
    if orbit_len < 2:
        raise ValueError("orbit_len must be at least 2")
    a_norm = norm(a, metric.norm)
    if a_norm >= 1.0:
        raise CoefficientNormTooLarge(
            f"coefficient norm {a_norm:.6f} is not below 1")
    a_star = adjoint(a)
    points = map_spec.orbit(seed, orbit_len + 2)
    violations = []
    for i in range(orbit_len + 1):
        y, ty, t2y = points[i], points[i + 1], points[i + 2]
        lhs = eval_metric(metric, ty, t2y)
        rhs = mul(mul(a_star, eval_metric(metric, y, ty)), a)
        if not _order_holds(lhs, rhs, metric, tol):
            violations.append({"x": y, "y": ty,
                               "lhs_norm": norm(lhs, metric.norm),
                               "rhs_norm": norm(rhs, metric.norm)})
    return ContractionCertificate(
        regime=Regime.ORBITAL, a=a, norm_kind=metric.norm, a_norm=a_norm,
        samples_checked=orbit_len + 1, violations=tuple(violations),
        seed_point=seed, map_name=map_spec.name, metric_name=metric.name)


def verify_two_step(map_spec: MapSpec, metric: MetricSpec, a: AlgebraElement,
                    seed: Any, orbit_len: int = 30,
                    tol: float = 1e-9) -> ContractionCertificate:
    """Check the one-sided condition d(Ty, T^2 y) <= a d(y, T^2 y) on an orbit.

    The coefficient must be positive, structurally commuting (scalar,
    sampled, or diagonal matrix), and of operator norm at most 1/2.  The
    certificate carries h = a (I - a)^-1 and its norm for the solver's
    step-rate bound; at the boundary norm exactly 1/2 the resolvent still
    exists but h is no longer a contraction, which shows up as h_norm >= 1.
    """
    if not is_positive(a, tol):
        raise NotPositive("two-step coefficient must be positive")
    if not is_diagonal(a, tol):
        raise NotInCommutant(
            "two-step coefficient must be scalar, sampled, or diagonal")
    op_norm = norm(a, NormKind.OPERATOR)
    if op_norm > 0.5 + tol:
        raise CoefficientNormTooLarge(
            f"two-step coefficient operator norm {op_norm:.6f} exceeds 1/2")
    if op_norm < 0.5:
        h = inverse_one_minus(a, tol)
    else:
        h = algebra._inverse_one_minus_unchecked(a)
    h = mul(a, h)
    h_norm = norm(h, NormKind.OPERATOR)
    points = map_spec.orbit(seed, orbit_len + 2)
    violations = []
    for i in range(orbit_len + 1):
        y, ty, t2y = points[i], points[i + 1], points[i + 2]
        lhs = eval_metric(metric, ty, t2y)
        rhs = mul(a, eval_metric(metric, y, t2y))
        if not _order_holds(lhs, rhs, metric, tol):
            violations.append({"x": y, "y": ty,
                               "lhs_norm": norm(lhs, metric.norm),
                               "rhs_norm": norm(rhs, metric.norm)})
    return ContractionCertificate(
        regime=Regime.TWO_STEP, a=a, norm_kind=NormKind.OPERATOR,
        a_norm=op_norm, samples_checked=orbit_len + 1,
        violations=tuple(violations), seed_point=seed, h=h, h_norm=h_norm,
        map_name=map_spec.name, metric_name=metric.name)


def _verify_scalar(map_spec: MapSpec, metric: MetricSpec, regime: Regime,
                   c: float, pairs: list | None, seed: Any, orbit_len: int,
                   tol: float) -> ContractionCertificate:
    a = codomain_scalar(metric, c)
    if regime is Regime.FORWARD_GLOBAL:
        return verify_global(map_spec, metric, a, pairs, "forward", tol)
    if regime is Regime.BACKWARD_GLOBAL:
        return verify_global(map_spec, metric, a, pairs, "backward", tol)
    if regime is Regime.ORBITAL:
        return verify_orbital_type(map_spec, metric, a, seed, orbit_len, tol)
    return verify_two_step(map_spec, metric, a, seed, orbit_len, tol)


def search_scalar_coefficient(map_spec: MapSpec, metric: MetricSpec,
                              regime: Regime, *, pairs: list | None = None,
                              seed: Any = None, orbit_len: int = 30,
                              tol: float = 1e-9) -> ContractionCertificate | None:
    """Bisect for the smallest scalar multiple of the identity that certifies.

    The admissible range is capped by the regime's norm gate (||c I|| < 1 in
    the metric's norm kind, or operator norm <= 1/2 for two-step).  Returns
    the certificate at the guaranteed-valid upper end of the final bracket,
    or None when even the cap fails.  The returned certificate re-verifies
    through the corresponding verify_* call by construction.
    """
    if regime in (Regime.FORWARD_GLOBAL, Regime.BACKWARD_GLOBAL):
        if pairs is None:
            raise ValueError("global regimes need sample pairs")
    elif seed is None:
        raise ValueError("orbital regimes need a seed point")

    if regime is Regime.TWO_STEP:
        cap = 0.5
    else:
        cap = (1.0 - SEARCH_CAP_MARGIN) / norm(codomain_scalar(metric, 1.0),
                                               metric.norm)

    def attempt(c: float) -> ContractionCertificate | None:
        try:
            cert = _verify_scalar(map_spec, metric, regime, c, pairs, seed,
                                  orbit_len, tol)
        except (CoefficientNormTooLarge, NotPositive, NotInCommutant):
            return None
        return cert if cert.valid else None

    at_zero = attempt(0.0)
    if at_zero is not None:
        return at_zero
    hi_cert = attempt(cap)
    if hi_cert is None:
        return None
    lo, hi = 0.0, cap
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if attempt(mid) is not None:
            hi = mid
        else:
            lo = mid
    return attempt(hi)
