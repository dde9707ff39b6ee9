"""Hydrodynamic bulk predictions on the scaled coordinate nu = n/t.

At long times the cumulative probability depends on n and t only through
nu = n/t, and equals the fraction of the Brillouin zone moving slower
than nu:

    Phi(nu) = |{q : v(q) <= nu}| / 2pi

The cumulative current is the integral of v over the same sub-level set,
which telescopes exactly to band energies at the set's endpoints because
v = w'.  Higher cumulative moments integrate v^k over the set.  This
sub-level-set formulation needs no per-regime branch bookkeeping and is
valid on both sides of the Lifshitz transition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .dispersion import WalkParams, omega, omega_deriv
from .evolve import (
    cumulative,
    cumulative_moment,
    current_density,
    evolve,
    probability_density,
)
from .fronts import FrontDiagram, cone_topology

ROOT_GRID = 8192
ROOT_MERGE = 1e-8
DEFAULT_EXCLUSION = 8.0
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@lru_cache(maxsize=32)
def _velocity_table(p: WalkParams, n: int = ROOT_GRID):
    qs = np.linspace(-math.pi, math.pi, n, endpoint=False)
    return qs, omega_deriv(qs, 1, p)


def invert_velocity(p: WalkParams, nu: float, tol: float = 1e-12) -> list[float]:
    """All solutions q in [-pi, pi) of v(q) = nu, bracketed and bisected.

    Returns the empty list outside [v_lm, v_rm]; near-tangent root pairs are
    merged when closer than 1e-8.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    qs, vs = _velocity_table(p)
    f = vs - nu
    step = qs[1] - qs[0]
    idx = np.nonzero(f * np.roll(f, -1) < 0.0)[0]
    lo = qs[idx]
    hi = lo + step
    flo = f[idx]
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        fm = omega_deriv(mid, 1, p) - nu
        left = flo * fm <= 0.0
        hi = np.where(left, mid, hi)
        lo = np.where(left, lo, mid)
        flo = np.where(left, flo, fm)
    roots = list(0.5 * (lo + hi))
    roots += [float(qs[i]) for i in np.nonzero(f == 0.0)[0]]
    # the last bracket spans the zone seam; fold refined roots back into [-pi, pi)
    roots = [r - 2.0 * math.pi if r >= math.pi else r for r in roots]
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) < ROOT_MERGE:
            continue
        merged.append(float(r))
    return merged


def _sublevel_arcs(p: WalkParams, nu: float) -> list[tuple[float, float]]:
    """Arcs of the Brillouin circle where v(q) <= nu (b may exceed pi by wrap)."""
    roots = invert_velocity(p, nu)
    if not roots:
        v0 = omega_deriv(0.0, 1, p)
        return [(-math.pi, math.pi)] if v0 <= nu else []
    arcs = []
    ext = roots + [roots[0] + 2.0 * math.pi]
    for a, b in zip(ext[:-1], ext[1:]):
        if omega_deriv(0.5 * (a + b), 1, p) <= nu:
            arcs.append((a, b))
    return arcs


def scaled_cpd(p: WalkParams, nu: float) -> float:
    """Phi(nu): measure of the sub-level set {v <= nu}, normalised by 2pi."""
    return sum(b - a for a, b in _sublevel_arcs(p, nu)) / (2.0 * math.pi)


def scaled_ccd(p: WalkParams, nu: float) -> float:
    """J(nu) = (1/2pi) integral of v over {v <= nu} = telescoped band energies."""
    total = 0.0
    for a, b in _sublevel_arcs(p, nu):
        total += omega(b, p) - omega(a, p)
    return total / (2.0 * math.pi)


def scaled_moment(p: WalkParams, nu: float, k: int) -> float:
    """Scaled cumulative moment: (1/2pi) integral of v^k over {v <= nu}.

    Fixed-order Gauss-Legendre per arc; v^k is a short trigonometric
    polynomial, so 64 nodes are converged far below 1e-9.
    """
    if k < 1:
        raise ValueError("moment order must be >= 1")
    total = 0.0
    for a, b in _sublevel_arcs(p, nu):
        x = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
        total += 0.5 * (b - a) * float(np.dot(_GL_WEIGHTS, omega_deriv(x, 1, p) ** k))
    return total / (2.0 * math.pi)


def nu_half(p: WalkParams, tol: float = 1e-10) -> float:
    """Diagnostic: the scaled coordinate where Phi crosses 1/2."""
    d = cone_topology(p)
    lo, hi = d.v_lm, d.v_rm
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if scaled_cpd(p, mid) < 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True, eq=False)
class ScalingCurve:
    """Hydrodynamic Phi, J and scaled moments sampled on a nu grid."""

    params: WalkParams
    nu: np.ndarray
    phi_scaled: np.ndarray
    j_scaled: np.ndarray
    m_scaled: tuple  # arrays for k = 1, 2, 3


def scaling_curve(p: WalkParams, num: int = 4001, margin: float = 0.5) -> ScalingCurve:
    """Sample the bulk scaling functions across the causal cone."""
    d = cone_topology(p)
    nu = np.linspace(d.v_lm - margin, d.v_rm + margin, num)
    phi_s = np.empty(num)
    j_s = np.empty(num)
    m_s = [np.empty(num) for _ in range(3)]
    for i, x in enumerate(nu):
        arcs = _sublevel_arcs(p, x)
        phi_s[i] = sum(b - a for a, b in arcs) / (2.0 * math.pi)
        j_s[i] = sum(omega(b, p) - omega(a, p) for a, b in arcs) / (2.0 * math.pi)
        for k in range(2, 4):
            acc = 0.0
            for a, b in arcs:
                xx = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
                acc += 0.5 * (b - a) * float(np.dot(_GL_WEIGHTS, omega_deriv(xx, 1, p) ** k))
            m_s[k - 1][i] = acc / (2.0 * math.pi)
    m_s[0] = j_s.copy()  # M~_1 equals J identically
    return ScalingCurve(p, nu, phi_s, j_s, tuple(m_s))


def exclusion_windows(
    diagram: FrontDiagram, t: float, c: float = DEFAULT_EXCLUSION
) -> list[tuple[float, float]]:
    """(centre, half-width) in nu of the edge windows around each front.

    The edge region of a k-th order front spans ~ (|kappa_k| t)^(1/(k+2))
    sites, where bulk scaling is violated by construction.
    """
    wins = []
    for fr in diagram.fronts:
        half = c * (abs(fr.kappa) * t) ** (1.0 / (fr.order + 2)) / t
        wins.append((fr.velocity, half))
    return wins


@dataclass(frozen=True)
class Deviation:
    sup_outside: float
    l1_outside: float
    sup_inside: float


@dataclass(frozen=True, eq=False)
class BulkReport:
    params: WalkParams
    t: float
    exclusion: float
    windows: list = field(default_factory=list)
    deviations: dict = field(default_factory=dict)


def compare_bulk(
    p: WalkParams,
    t: float,
    exclusion: float = DEFAULT_EXCLUSION,
    lattice: int | None = None,
    observables: tuple = ("phi", "j", "m1", "m2", "m3"),
    margin: float = 0.25,
) -> BulkReport:
    """Evolve numerically and measure deviations from the hydro predictions.

    Sites are mapped to nu = n/t and compared against the sub-level-set
    predictions; sup and L1 deviations are reported separately outside and
    inside the front exclusion windows (half-width exclusion * edge scale).
    """
    if t <= 0:
        raise ValueError("compare_bulk needs t > 0")
    wf = evolve(p, t, lattice)
    prob = probability_density(wf)
    numeric = {
        "phi": cumulative(prob).values,
        "j": cumulative(current_density(wf)).values,
    }
    for k in (1, 2, 3):
        numeric[f"m{k}"] = cumulative_moment(prob, k).values / t**k
    d = cone_topology(p)
    wins = exclusion_windows(d, t, exclusion)
    sites = wf.sites
    nus = sites / t
    mask = (nus >= d.v_lm - margin) & (nus <= d.v_rm + margin)
    nus = nus[mask]
    inside = np.zeros(nus.shape, dtype=bool)
    for centre, half in wins:
        inside |= np.abs(nus - centre) <= half
    hydro = {name: np.empty(nus.shape) for name in observables}
    for i, x in enumerate(nus):
        arcs = _sublevel_arcs(p, x)
        if "phi" in hydro:
            hydro["phi"][i] = sum(b - a for a, b in arcs) / (2.0 * math.pi)
        if "j" in hydro:
            hydro["j"][i] = sum(omega(b, p) - omega(a, p) for a, b in arcs) / (2.0 * math.pi)
        for k in (1, 2, 3):
            key = f"m{k}"
            if key not in hydro:
                continue
            acc = 0.0
            for a, b in arcs:
                xx = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
                acc += 0.5 * (b - a) * float(np.dot(_GL_WEIGHTS, omega_deriv(xx, 1, p) ** k))
            hydro[key][i] = acc / (2.0 * math.pi)
    devs = {}
    dnu = 1.0 / t
    for name in observables:
        diff = np.abs(numeric[name][mask] - hydro[name])
        devs[name] = Deviation(
            sup_outside=float(diff[~inside].max()) if (~inside).any() else 0.0,
            l1_outside=float(diff[~inside].sum() * dnu) if (~inside).any() else 0.0,
            sup_inside=float(diff[inside].max()) if inside.any() else 0.0,
        )
    return BulkReport(p, float(t), exclusion, wins, devs)
