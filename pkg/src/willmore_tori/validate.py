"""Acceptance suite: numerical checks of the bounds and constructions at fixed tolerances.

Each criterion returns a CriterionResult; `run_suite` runs them in order. The
quick scale uses smaller corpora for a fast smoke test.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds, generators, geometry, immersions
from .moduli import ModuliPoint

TOL_SYS_MAX = 0.083
TAU_2_2 = 0.1987553

CORPUS_LATTICES = [
    ModuliPoint(0.0, 1.0),
    ModuliPoint(0.0, 2.0),
    ModuliPoint(0.0, 3.0),
    ModuliPoint(0.25, 1.5),
    ModuliPoint(0.5, 1.2),
]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.2f}s) - {self.detail}"

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("data")
        return d


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def criterion_tau() -> CriterionResult:
    t0 = time.perf_counter()
    t = bounds.tau(2.0, 2.0)
    elapsed = time.perf_counter() - t0
    ok = abs(t - TAU_2_2) <= 1e-4 and elapsed < 1.0
    return CriterionResult(1, "tau(2, 2) threshold", ok, f"tau={t:.7f}, target {TAU_2_2}, {elapsed * 1e3:.1f} ms")


@_timed
def criterion_gauss_bonnet(count: int = 50, n: int = 128) -> CriterionResult:
    worst = 0.0
    for seed in range(count):
        lat = CORPUS_LATTICES[seed % len(CORPUS_LATTICES)]
        m = generators.random_trig_metric(lat, modes=3 + seed % 4, amplitude=0.2 + 0.05 * (seed % 10),
                                          seed=seed, n=n)
        k = geometry.gaussian_curvature(m)
        k1, *_ = geometry.curvature_functionals(m, 2.0, curvature=k)
        gb = float(np.sum(k.values * m.density()) * m.grid.cell_area)
        worst = max(worst, abs(gb) / (1.0 + k1))
    return CriterionResult(2, "Gauss-Bonnet on random metrics", worst <= 1e-6,
                           f"worst |int K dA|/(1+K1) = {worst:.2e} over {count} metrics")


def oscillation_corpus(count: int = 100, random_n: int = 64, cone_n: int = 256):
    """Random trigonometric metrics plus cones, all with K_2 < 4 pi."""
    out = []
    n_cones = count * 3 // 10
    rng = np.random.default_rng(2024)
    seed = 0
    while len(out) < count - n_cones:
        lat = CORPUS_LATTICES[seed % len(CORPUS_LATTICES)]
        amp = float(rng.uniform(0.05, 1.2))
        m = generators.random_trig_metric(lat, modes=int(rng.integers(1, 6)), amplitude=amp, seed=seed, n=random_n)
        seed += 1
        rep = geometry.report(m, 2.0)
        if rep.Kp < 4 * math.pi:
            out.append((f"random seed={seed - 1}", m, rep))
    attempts = 0
    while len(out) < count and attempts < 10 * count:
        attempts += 1
        lat = CORPUS_LATTICES[attempts % len(CORPUS_LATTICES)]
        beta = float(rng.uniform(0.9, 1.4))
        L = float(rng.uniform(0.2, 1.2))
        spec = generators.ConeSpec.from_log_length(0.15, L, beta, lattice=lat, smoothing=1.0,
                                                   center=(float(rng.uniform()), float(rng.uniform())))
        m = generators.generate_cone(spec, cone_n)
        rep = geometry.report(m, 2.0)
        if rep.Kp < 4 * math.pi:
            out.append((f"cone beta={beta:.3f} L={L:.3f}", m, rep))
    return out


@_timed
def criterion_oscillation(corpus) -> CriterionResult:
    violations = []
    worst_slack = math.inf
    for name, m, rep in corpus:
        a, b, holds = bounds.osc_bound_check(rep)
        # K dA_g = Delta_0 u dA_0, so int u K dA_g is the Dirichlet energy of u: a sign-sensitive identity
        energy = geometry.dirichlet_pairing(m)
        sign_ok = energy >= -1e-9 * (1.0 + abs(energy))
        if not (holds and sign_ok):
            violations.append(name)
        worst_slack = min(worst_slack, min(a, b) - rep.osc_u)
    return CriterionResult(3, "oscillation bounds (a) and (b)", not violations,
                           f"{len(corpus)} metrics, {len(violations)} violations, min slack {worst_slack:.3g}",
                           data={"violations": violations})


@_timed
def criterion_disk(count: int = 50) -> CriterionResult:
    violations = 0
    checked_max = 0
    p = 2.0
    for i in range(count):
        profile = "cap" if i % 2 == 0 else "well"
        mag = 0.05 + 1.5 * ((i * 7) % count) / count
        power = 1 + (i // 2) % 3
        shoulder = power * ((i // 6) % 4) / 4.0
        d = generators.disk_test_field(profile, mag, n=64, power=power, shoulder=shoulder)
        kp_plus, kp_minus = d.functionals(p)
        umax, umin = d.extrema()
        if kp_plus < 2 * math.pi:
            checked_max += 1
            if umax > bounds.disk_max_bound(kp_plus, p):
                violations += 1
        if umax <= 0.0 and umin < bounds.disk_min_bound(kp_minus, p):
            violations += 1
    return CriterionResult(4, "disk max/min estimates", violations == 0,
                           f"{count} fields ({checked_max} with K+_p < 2pi), {violations} violations")


@_timed
def criterion_loewner(corpus) -> CriterionResult:
    bad = []
    worst_tol = 0.0
    tol = math.sqrt(4 - 2 * math.sqrt(2)) - 1.0
    for name, m, rep in corpus:
        worst_tol = max(worst_tol, rep.tol_sys)
        ok = (rep.V_g0 >= math.sqrt(3) / 2 - 1e-12
              and rep.V_g >= rep.V_g0 * (1 - tol)
              and rep.V_g <= math.exp(2 * rep.osc_u) * rep.V_g0 * (1 + tol))
        if not ok:
            bad.append(name)
    return CriterionResult(5, "Loewner chain", not bad and tol <= TOL_SYS_MAX,
                           f"{len(corpus)} metrics, {len(bad)} failures, tol_sys={tol:.4f} "
                           f"(largest stencil anisotropy in corpus {worst_tol:.4f})",
                           data={"failures": bad})


@_timed
def criterion_willmore(n: int = 128) -> CriterionResult:
    problems = []
    cl = immersions.clifford_torus(n)
    w = immersions.willmore_energy_conformal(cl)
    if abs(w / (2 * math.pi**2) - 1) > 5e-3:
        problems.append(f"clifford W={w}")
    for c, exact in ((math.sqrt(2.0), 2 * math.pi**2), (2.0, 4 * math.pi**2 / math.sqrt(3.0))):
        wq = immersions.willmore_energy_revolution(c, 1.0)
        if abs(wq - exact) > 1e-8 or abs(immersions.revolution_closed_form(c) - exact) > 1e-8:
            problems.append(f"revolution c={c}: {wq}")
    for name, mk in immersions.BUILTINS.items():
        if not immersions.verify_lower_bounds(mk(), 2.0).holds:
            problems.append(f"{name} violates a lower bound")
    if not immersions.verify_lower_bounds(immersions.ImmersedTorus.revolution(3.0, 1.0), 2.0).holds:
        problems.append("revolution R/r=3 violates a lower bound")
    return CriterionResult(6, "Willmore energies and lower bounds", not problems,
                           f"clifford W/2pi^2 - 1 = {w / (2 * math.pi ** 2) - 1:.2e}; "
                           + ("all bounds hold" if not problems else "; ".join(problems)))


@_timed
def criterion_cone_family(n_cone: int = 512, n_family: int = 1024, steps: int = 4) -> CriterionResult:
    problems = []
    details = []
    for beta in (0.0, math.pi / 6, math.pi / 4):
        if beta == 0.0:
            spec = generators.ConeSpec(0.15, 0.15 * 1.0)
        else:
            spec = generators.ConeSpec.from_log_length(0.2, 1.0, beta)
        m = generators.generate_cone(spec, n_cone)
        k1, *_ = geometry.curvature_functionals(m, 2.0)
        ratio = k1 / generators.cone_curvature_integral(beta)
        osc = geometry.oscillation(m)
        details.append(f"beta={beta:.3f}: K1 ratio {ratio:.4f}")
        if abs(ratio - 1) > 0.02:
            problems.append(f"K1 off for beta={beta}")
        if osc < generators.cone_osc_lower_bound(spec):
            problems.append(f"osc below bound for beta={beta}")
    fam = generators.unbounded_oscillation_family(0.0, steps, n=n_family)
    reps = [geometry.report(m) for m in fam]

    def spread(vals):
        return (max(vals) - min(vals)) / min(vals)

    k_s, a_s, s_s = (spread([getattr(r, f) for r in reps]) for f in ("K1", "area_g", "sys_g"))
    growth = reps[-1].osc_u / reps[0].osc_u
    doubling = all(b.osc_u >= 2 * a.osc_u for a, b in zip(reps, reps[1:]))
    details.append(f"family spreads K1 {k_s:.2%}, area {a_s:.2%}, sys {s_s:.2%}; osc growth {growth:.2f}x")
    if max(k_s, a_s, s_s) >= 0.03 or growth < 8 or not doubling:
        problems.append("family invariants")
    return CriterionResult(7, "cone/cylinder family", not problems, "; ".join(details + problems))


@_timed
def criterion_limits(samples: int = 4096) -> CriterionResult:
    ts = [bounds.tau(y, 2.0) for y in (1.001, 1.01, 1.1, 2.0)]
    mono = all(a < b for a, b in zip(ts, ts[1:]))
    bad = []
    for V in (1.5, 2.0, 4.0, 9.0):
        s = bounds.sigma(V, 2.0)
        dense = min(bounds.tau(v, 2.0) for v in np.linspace(math.sqrt(V), V, samples))
        if s > min(bounds.sigma1(V, 2.0), dense) + 1e-9:
            bad.append(V)
    return CriterionResult(8, "limit behaviour of tau and sigma", mono and not bad,
                           f"tau(1.001..2) = {', '.join(f'{t:.3g}' for t in ts)}; sigma failures at V={bad}")


@_timed
def criterion_parseval() -> CriterionResult:
    worst = 0.0
    for name, mk in immersions.BUILTINS.items():
        a = immersions.parseval_area_identities(mk())
        worst = max(worst, (max(a) - min(a)) / min(a))
    return CriterionResult(9, "Parseval area identities", worst <= 1e-6, f"worst relative spread {worst:.2e}")


def run_suite(quick: bool = False, progress=None) -> list[CriterionResult]:
    count = 20 if quick else 100
    results = [criterion_tau(), criterion_gauss_bonnet(10 if quick else 50)]
    if progress:
        for r in results:
            progress(r)
    corpus = oscillation_corpus(count)
    rest = [
        lambda: criterion_oscillation(corpus),
        lambda: criterion_disk(10 if quick else 50),
        lambda: criterion_loewner(corpus),
        lambda: criterion_willmore(),
        (lambda: criterion_cone_family(256, 1024, 4)) if quick else (lambda: criterion_cone_family()),
        lambda: criterion_limits(512 if quick else 4096),
        criterion_parseval,
    ]
    for fn in rest:
        r = fn()
        results.append(r)
        if progress:
            progress(r)
    return results
