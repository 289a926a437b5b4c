"""Closed-form oscillation bounds, certificate thresholds and Willmore lower bounds.

Notation: K is a scale-invariant curvature functional, p > 1 its exponent,
q = p / (p - 1) the conjugate exponent and V = area / sys^2.

    S(K, p, V) = 1/2 |log(1 - K/4pi)| + K/(8pi - 2K) q log(2q) + qK/(4pi) + KV/8
    Q(K, p, V) = exp(2 S(K, p, V))

osc u <= S whenever K_p < 4pi, and an immersed torus of conformal class
(x, y) has W >= Q^{-1} pi^2 (y + 1/y).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ConformalTorusMetric, GeometryReport, report as geometry_report
from .moduli import in_montiel_ros_disk
from .systole import critical_loop_levels, has_noncontractible_loop

FOUR_PI = 4.0 * math.pi
POLE_GUARD = 1e-6
ROOT_TOL = 1e-9
SIGMA_SAMPLES = 256
GOLDEN_TOL = 1e-6
TWO_PI_SQ = 2.0 * math.pi**2


class TauUnconstrained(ValueError):
    """Raised for y <= 1, where any positive threshold works and the region rules apply."""


def conjugate_exponent(p: float) -> float:
    p = float(p)
    if not p > 1.0:
        raise ValueError("p must exceed 1")
    return p / (p - 1.0)


@dataclass(frozen=True)
class BoundParams:
    K: float
    p: float
    V: float
    q: float = field(init=False)

    def __post_init__(self):
        if not self.K >= 0:
            raise ValueError("K must be nonnegative")
        if not self.V > 0:
            raise ValueError("V must be positive")
        object.__setattr__(self, "q", conjugate_exponent(self.p))

    def S(self) -> float:
        return S_bound(self.K, self.p, self.V)

    def Q(self) -> float:
        return Q_bound(self.K, self.p, self.V)


def S_bound(K: float, p: float, V: float) -> float:
    K, V = float(K), float(V)
    q = conjugate_exponent(p)
    if K < 0:
        raise ValueError("K must be nonnegative")
    if not V > 0:
        raise ValueError("V must be positive")
    if K >= FOUR_PI - POLE_GUARD:
        raise ValueError("S undefined at or above 4π")
    return (
        0.5 * abs(math.log1p(-K / FOUR_PI))
        + K / (2.0 * FOUR_PI - 2.0 * K) * q * math.log(2.0 * q)
        + q * K / FOUR_PI
        + K * V / 8.0
    )


def Q_bound(K: float, p: float, V: float) -> float:
    return math.exp(2.0 * S_bound(K, p, V))


def _bisect_increasing(fn, lo: float, hi: float, xtol: float = ROOT_TOL) -> float:
    """Root of an increasing function with fn(lo) < 0 < fn(hi)."""
    flo, fhi = fn(lo), fn(hi)
    if not (flo < 0.0 < fhi):
        raise ValueError("root not bracketed")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if fn(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _k_root(p: float, V: float, log_target: float) -> float:
    """K* in (0, 4pi) with 2 S(K*, p, V) = log_target, working in log space to avoid overflow."""
    return _bisect_increasing(lambda k: 2.0 * S_bound(k, p, V) - log_target,
                              0.0, FOUR_PI - 2 * POLE_GUARD)


def tau(y: float, p: float = 2.0) -> float:
    """Largest K for which Q(K, p, y)^{-1} (y + 1/y) > 2, i.e. the root of Q = (y + 1/y)/2."""
    y = float(y)
    conjugate_exponent(p)
    if not y > 1.0:
        raise TauUnconstrained("use region rules: τ is unconstrained for y ≤ 1")
    return _k_root(p, y, math.log(0.5 * (y + 1.0 / y)))


def sigma1(V: float, p: float = 2.0) -> float:
    """Root in K of Q(K, p, V) = sqrt(V)."""
    V = float(V)
    if not V > 1.0:
        raise ValueError("use systole rule for 𝒱 ≤ 1")
    return _k_root(p, V, 0.5 * math.log(V))


def _golden_min(fn, a: float, b: float, tol: float = GOLDEN_TOL) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def min_tau(v_lo: float, v_hi: float, p: float = 2.0, samples: int = SIGMA_SAMPLES) -> float:
    """min of tau(v, p) over v in [v_lo, v_hi] (v_lo > 1): dense sampling plus golden refinement."""
    vs = np.linspace(v_lo, v_hi, samples) if v_hi > v_lo else np.array([v_lo])
    ts = np.array([tau(v, p) for v in vs])
    i = int(np.argmin(ts))
    best = float(ts[i])
    if vs.size > 1:
        a = vs[max(i - 1, 0)]
        b = vs[min(i + 1, vs.size - 1)]
        _, val = _golden_min(lambda v: tau(v, p), float(a), float(b))
        best = min(best, val)
    return best


def sigma(V: float, p: float = 2.0) -> float:
    """min{sigma1(V, p), min tau(v, p) over sqrt(V) <= v <= V}."""
    V = float(V)
    if not V > 1.0:
        raise ValueError("use systole rule for 𝒱 ≤ 1")
    return min(sigma1(V, p), min_tau(math.sqrt(V), V, p))


def sigma_robust(v_lo: float, v_hi: float, p: float = 2.0) -> float:
    """Lower envelope of sigma(V, p) over V in [v_lo, v_hi].

    Used when V is only known to lie in an interval: the returned threshold is
    valid for every V in it. Requires v_lo > 1.
    """
    if not v_lo > 1.0:
        raise ValueError("use systole rule for 𝒱 ≤ 1")
    vs = np.linspace(v_lo, v_hi, 33) if v_hi > v_lo else np.array([v_lo])
    s1 = min(sigma1(v, p) for v in vs)
    # sigma1 is smooth in V; guard the sampling gap with a golden refinement
    if vs.size > 1:
        i = int(np.argmin([sigma1(v, p) for v in vs]))
        _, val = _golden_min(lambda v: sigma1(v, p), float(vs[max(i - 1, 0)]),
                             float(vs[min(i + 1, vs.size - 1)]))
        s1 = min(s1, val)
    return min(s1, min_tau(math.sqrt(v_lo), v_hi, p))


# -- oscillation, disk and level-set estimates -------------------------------

def _systole_interval(rep: GeometryReport) -> tuple[float, float]:
    """Interval certainly containing the continuum V(g) given the graph systole."""
    return rep.V_g, rep.V_g * (1.0 + rep.tol_sys) ** 2


def osc_bound_check(rep: GeometryReport) -> tuple[float, float, bool]:
    """Bounds on osc u from V(g0) and from V(g); holds iff osc u is below both."""
    if rep.Kp >= FOUR_PI - POLE_GUARD:
        raise ValueError("theorem hypothesis violated")
    bound_a = S_bound(rep.Kp, rep.p, rep.V_g0)
    # the graph systole may overestimate sys, so V(g) is at most V_graph (1 + tol)^2;
    # S is increasing in V, so the conservative bound uses the smallest admissible V
    bound_b = S_bound(rep.Kp, rep.p, rep.V_g)
    holds = rep.osc_u <= bound_a and rep.osc_u <= bound_b
    return bound_a, bound_b, holds


def disk_max_bound(Kp_plus: float, p: float = 2.0) -> float:
    K = float(Kp_plus)
    q = conjugate_exponent(p)
    if K >= 2.0 * math.pi - POLE_GUARD:
        raise ValueError("disk bound requires 𝒦⁺_p < 2π")
    if K < 0:
        raise ValueError("Kp_plus must be nonnegative")
    return 0.5 * abs(math.log1p(-K / (2.0 * math.pi))) + K / (FOUR_PI - 2.0 * K) * q * math.log(q)


def disk_min_bound(Kp_minus: float, p: float = 2.0) -> float:
    return -conjugate_exponent(p) * float(Kp_minus) / FOUR_PI


@dataclass(frozen=True)
class MidBoundResult:
    v1: float
    v2: float
    bound_a: float
    bound_b: float
    holds: bool


def _loop_mask_grid(metric: ConformalTorusMetric, max_axis: int = 128) -> np.ndarray:
    u = metric.values
    s1 = max(1, metric.grid.n1 // max_axis)
    s2 = max(1, metric.grid.n2 // max_axis)
    while metric.grid.n1 % s1:
        s1 -= 1
    while metric.grid.n2 % s2:
        s2 -= 1
    return u[::s1, ::s2]


def mid_bound_check(metric: ConformalTorusMetric, v1: float | None = None, v2: float | None = None,
                    p: float = 2.0, rep: GeometryReport | None = None) -> MidBoundResult:
    """Check v2 - v1 <= K1 V / 8 for levels carrying noncontractible loops.

    {u <= v1} and {u >= v2} must each contain a noncontractible grid loop. With
    no levels given, the extreme admissible levels (the tightest instance) are used.
    """
    uu = _loop_mask_grid(metric)
    if v1 is None or v2 is None:
        c1, c2 = critical_loop_levels(uu)
        v1 = c1 if v1 is None else v1
        v2 = c2 if v2 is None else v2
    if not (has_noncontractible_loop(uu <= v1) and has_noncontractible_loop(uu >= v2)):
        raise ValueError("hypothesis not met")
    rep = geometry_report(metric, p) if rep is None else rep
    bound_a = rep.K1 * rep.V_g0 / 8.0
    bound_b = rep.K1 * rep.V_g / 8.0
    gap = v2 - v1
    return MidBoundResult(float(v1), float(v2), bound_a, bound_b, gap <= bound_a and gap <= bound_b)


# -- Willmore lower bounds and certification ---------------------------------

class Rule(str, enum.Enum):
    LI_YAU_REGION = "LiYauRegion"
    MONTIEL_ROS_REGION = "MontielRosRegion"
    SYSTOLE_BOUND = "SystoleBound"
    DIRECT_OSCILLATION = "DirectOscillation"
    MAIN_THEOREM_I = "MainTheoremI"
    MAIN_THEOREM_II = "MainTheoremII"
    NONE = "None"


class Status(str, enum.Enum):
    CERTIFIED = "Certified"
    UNCERTIFIED = "Uncertified"


def willmore_lower_bounds(rep: GeometryReport) -> list[tuple[str, float]]:
    """Every applicable lower bound for W of an immersion inducing the metric of rep."""
    y = rep.y
    flat_sum = math.pi**2 * (y + 1.0 / y)
    v_hi = _systole_interval(rep)[1]
    out = [
        ("li_yau_conformal", TWO_PI_SQ / y),
        # W >= 2pi^2 / V(g); the continuum V(g) is at most v_hi
        ("loewner", TWO_PI_SQ / v_hi),
        ("direct_oscillation", math.exp(-2.0 * rep.osc_u) * flat_sum),
    ]
    if rep.Kp < FOUR_PI - POLE_GUARD:
        out.append(("q_bound_flat", flat_sum / Q_bound(rep.Kp, rep.p, rep.V_g0)))
        out.append(("q_bound_metric", flat_sum / Q_bound(rep.Kp, rep.p, v_hi)))
    return out


@dataclass(frozen=True)
class Certificate:
    status: Status
    rule: Rule
    lower_bound: float
    witnesses: dict

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "rule": self.rule.value,
            "lower_bound": self.lower_bound,
            "witnesses": dict(self.witnesses),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def certify_report(rep: GeometryReport) -> Certificate:
    """Apply the certification rules in fixed order; the first that fires wins.

    Rules involving V(g) use the whole interval of values compatible with the
    graph systole, so a rule only fires if it holds for the worst case.
    """
    x, y, p = rep.x, rep.y, rep.p
    bounds = willmore_lower_bounds(rep)
    best = max(v for _, v in bounds)
    v_lo, v_hi = _systole_interval(rep)
    w = {"x": x, "y": y, "V_g": rep.V_g, "Kp": rep.Kp, "osc_u": rep.osc_u, "tol_sys": rep.tol_sys}

    def done(rule: Rule, **extra) -> Certificate:
        w.update(extra)
        return Certificate(Status.CERTIFIED, rule, max(best, TWO_PI_SQ), w)

    if y <= 1.0:
        return done(Rule.LI_YAU_REGION)
    if in_montiel_ros_disk(x, y):
        return done(Rule.MONTIEL_ROS_REGION)
    if v_hi <= 1.0:
        return done(Rule.SYSTOLE_BOUND, V_hi=v_hi)
    direct = math.exp(-2.0 * rep.osc_u) * math.pi**2 * (y + 1.0 / y)
    if direct >= TWO_PI_SQ:
        return done(Rule.DIRECT_OSCILLATION, direct=direct)
    t = tau(y, p)
    w["tau"] = t
    if rep.Kp < t:
        return done(Rule.MAIN_THEOREM_I, S=S_bound(rep.Kp, p, y), Q=Q_bound(rep.Kp, p, y))
    if v_lo > 1.0:
        s = sigma_robust(v_lo, v_hi, p)
        w["sigma"] = s
        if rep.Kp < s:
            return done(Rule.MAIN_THEOREM_II, V_hi=v_hi)
    return Certificate(Status.UNCERTIFIED, Rule.NONE, best, w)


def certify(metric: ConformalTorusMetric, p: float = 2.0) -> Certificate:
    return certify_report(geometry_report(metric, p))
