"""Extremal fronts, causal-cone topology and the Lifshitz critical coupling.

Extremal fronts are the stationary points of the group velocity, i.e. the
roots of w''(q) = 0 in the Brillouin zone.  They are located by a dense
sign-change scan with bisection refinement, which is robust across the
whole (g, phi) plane and does not depend on any quartic reduction.  A
front of order k has w'' ... w^(k+1) vanishing at the root with
w^(k+2) != 0; the edge-scaling coefficient is kappa_k = w^(k+2)/(k+1)!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .dispersion import WalkParams, omega_deriv

SCAN_GRID = 4096
SCAN_GRID_CAP = 1 << 20
TOL_ROOT = 1e-12
TOL_ORDER = 1e-8
TOL_DEGEN = 1e-9          # velocity window for degenerate-front labelling
Q_MERGE = 1e-7            # roots closer than this in q are one root
TOUCH_ACCEPT = 4e-12      # |w''| bound for accepting a tangential root
MAX_ORDER = 5


class ConeTopology(Enum):
    ONE_CONE = "one_cone"
    TWO_NESTED_CONES = "two_nested_cones"
    TWO_OVERLAPPING_CONES = "two_overlapping_cones"
    CRITICAL_SECOND_ORDER = "critical_second_order"
    CRITICAL_THIRD_ORDER = "critical_third_order"


@dataclass(frozen=True)
class ExtremalFront:
    """One stationary point of the group velocity."""

    q_star: float
    velocity: float
    order: int
    kappa: float
    chirality: str  # "left" or "right"


@dataclass(frozen=True)
class FrontDiagram:
    """All extremal fronts of a parameter point, sorted by velocity."""

    params: WalkParams
    fronts: tuple
    v_lm: float
    v_rm: float
    topology: ConeTopology


class FrontScanError(RuntimeError):
    """Raised when the root scan cannot stabilise below the grid cap."""


def _wrap_q(q: float) -> float:
    q = math.fmod(q + math.pi, 2.0 * math.pi)
    if q < 0:
        q += 2.0 * math.pi
    return q - math.pi


def _bisect(f, a: float, b: float, iters: int = 90) -> float:
    fa = f(a)
    for _ in range(iters):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        fm = f(m)
        if fa * fm <= 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _scan_roots(p: WalkParams, n: int) -> list[float]:
    """All roots of w'' in [-pi, pi) on an n-point scan, including tangencies."""
    f = lambda q: omega_deriv(q, 2, p)
    qs = np.linspace(-math.pi, math.pi, n, endpoint=False)
    fs = omega_deriv(qs, 2, p)
    step = 2.0 * math.pi / n
    roots = []
    sign_change = (fs * np.roll(fs, -1)) < 0.0
    for i in np.nonzero(sign_change)[0]:
        roots.append(_polish_root(p, _bisect(f, qs[i], qs[i] + step)))
    # exact zeros on the grid (rare, but cheap to honour)
    for i in np.nonzero(fs == 0.0)[0]:
        roots.append(float(qs[i]))
    # tangential roots never change sign; look for near-zero local minima of
    # |w''| and refine on the sign change of w''' instead
    absf = np.abs(fs)
    tau = 200.0 * step * step * (1.0 + 8.0 * p.g)
    is_min = (absf < np.roll(absf, 1)) & (absf <= np.roll(absf, -1)) & (absf < tau)
    f3 = lambda q: omega_deriv(q, 3, p)
    for i in np.nonzero(is_min)[0]:
        a, b = qs[i] - step, qs[i] + step
        if any(a - Q_MERGE <= r <= b + Q_MERGE for r in roots):
            continue
        if f3(a) * f3(b) > 0.0:
            continue
        q0 = _bisect(f3, a, b)
        if abs(f(q0)) < TOUCH_ACCEPT * (1.0 + 8.0 * p.g):
            roots.append(q0)
    roots = sorted(_wrap_q(r) for r in roots)
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) < Q_MERGE:
            continue
        merged.append(r)
    # the zone seam is periodic: drop a duplicate at +pi-ish of a -pi root
    if len(merged) > 1 and abs((merged[-1] - merged[0]) - 2.0 * math.pi) < Q_MERGE:
        merged.pop()
    return merged


def _polish_root(p: WalkParams, q0: float) -> float:
    """Re-centre a near-triple root of w'' on the simple zero of w''''.

    At a front of order >= 3, w'' behaves like x^3, so its sign change can
    only be located within the O(eps^(1/3)) cancellation band of the two
    trigonometric terms, which is wide enough to corrupt the order
    classification.  w'''' is linear through the same point and pins it to
    machine precision.
    """
    if abs(omega_deriv(q0, 3, p)) >= TOL_ORDER:
        return q0
    w = 2e-4
    f4 = lambda q: omega_deriv(q, 4, p)
    if f4(q0 - w) * f4(q0 + w) < 0.0:
        q1 = _bisect(f4, q0 - w, q0 + w)
        if abs(omega_deriv(q1, 2, p)) <= abs(omega_deriv(q0, 2, p)) + 1e-12:
            return q1
    return q0


def _classify(p: WalkParams, q_star: float, tol_order: float) -> tuple[int, float]:
    for j in range(3, MAX_ORDER + 3):
        d = omega_deriv(q_star, j, p)
        if abs(d) >= tol_order:
            k = j - 2
            return k, d / math.factorial(k + 1)
    raise FrontScanError(
        f"no non-vanishing derivative up to order {MAX_ORDER + 2} at q={q_star}"
    )


def find_extremal_fronts(
    p: WalkParams,
    tol_root: float = TOL_ROOT,
    min_grid: int = SCAN_GRID,
    tol_order: float = TOL_ORDER,
) -> list[ExtremalFront]:
    """Locate and classify every extremal front of the dispersion.

    The scan grid is doubled until the root count agrees between two
    consecutive resolutions (tangency-split pairs near criticality need
    fine grids); exceeding the grid cap raises FrontScanError.
    """
    if tol_root <= 0:
        raise ValueError("tol_root must be positive")
    n = max(int(min_grid), SCAN_GRID)
    roots = _scan_roots(p, n)
    while True:
        n2 = 2 * n
        if n2 > SCAN_GRID_CAP:
            raise FrontScanError(
                f"front scan did not stabilise below {SCAN_GRID_CAP} grid points"
            )
        roots2 = _scan_roots(p, n2)
        if len(roots2) == len(roots):
            break
        n, roots = n2, roots2
    fronts = []
    for q in roots2:
        resid = omega_deriv(q, 2, p)
        if abs(resid) > max(tol_root, TOUCH_ACCEPT * (1.0 + 8.0 * p.g)):
            raise FrontScanError(f"root refinement stalled at q={q}, |w''|={resid}")
        order, kappa = _classify(p, q, tol_order)
        v = omega_deriv(q, 1, p)
        fronts.append(
            ExtremalFront(q, v, order, kappa, "left" if v < 0 else "right")
        )
    fronts.sort(key=lambda fr: fr.velocity)
    return fronts


def build_diagram(p: WalkParams, fronts: tuple) -> FrontDiagram:
    """Classify the causal-cone topology of an already-scanned front set."""
    v_lm = min(fr.velocity for fr in fronts)
    v_rm = max(fr.velocity for fr in fronts)
    orders = [fr.order for fr in fronts]
    n = len(fronts)
    if n == 2:
        topo = ConeTopology.CRITICAL_THIRD_ORDER if 3 in orders else ConeTopology.ONE_CONE
    elif n == 3:
        topo = ConeTopology.CRITICAL_SECOND_ORDER
    elif n == 4:
        vs = sorted(fr.velocity for fr in fronts)
        degen = any(abs(vs[i + 1] - vs[i]) <= TOL_DEGEN for i in range(3))
        topo = (
            ConeTopology.TWO_OVERLAPPING_CONES if degen else ConeTopology.TWO_NESTED_CONES
        )
    else:
        raise FrontScanError(f"unexpected front count {n} at {p}")
    return FrontDiagram(p, fronts, v_lm, v_rm, topo)


@lru_cache(maxsize=64)
def cone_topology(p: WalkParams) -> FrontDiagram:
    """Assemble the front diagram and classify the causal-cone topology."""
    return build_diagram(p, tuple(find_extremal_fronts(p)))


def degeneracy(diagram: FrontDiagram, front: ExtremalFront) -> int:
    """Number of fronts sharing this front's velocity (2 for overlapping cones)."""
    return sum(
        1 for fr in diagram.fronts if abs(fr.velocity - front.velocity) <= TOL_DEGEN
    )


def critical_coupling(
    phi: float,
    tol_g: float = 1e-6,
    g_lo: float = 1e-3,
    g_hi: float = 4.0,
) -> float:
    """Lifshitz coupling g_c(phi): bisection on the 2 -> 4 front-count change.

    The resolution of the scan grid is raised as the bracket narrows, since
    the newborn root pair splits like sqrt(g - g_c).
    """
    if not 0.0 <= phi <= math.pi / 2.0 + 1e-15:
        raise ValueError("phi must lie in the canonical window [0, pi/2]")
    if tol_g <= 0:
        raise ValueError("tol_g must be positive")

    def count(g: float, width: float) -> int:
        grid = int(min(SCAN_GRID_CAP / 2, max(SCAN_GRID, 32.0 / math.sqrt(max(width, 1e-12)))))
        try:
            return len(find_extremal_fronts(WalkParams(g, phi), min_grid=grid))
        except FrontScanError:
            # the newborn root pair is unresolvable even at the grid cap, so
            # |g - g_c| is below the attainable resolution; calling it
            # pre-transition biases the bracket by less than ~1e-11
            return 2

    lo, hi = g_lo, g_hi
    c_lo, c_hi = count(lo, hi - lo), count(hi, hi - lo)
    if not (c_lo <= 2 < c_hi):
        raise FrontScanError(
            f"no 2 -> 4 front-count change in g in ({g_lo}, {g_hi}] at phi={phi}"
        )
    while hi - lo > tol_g:
        mid = 0.5 * (lo + hi)
        if count(mid, hi - lo) >= 4:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def quartic_crosscheck(p: WalkParams) -> list[float]:
    """Real roots y = cos q of the quartic form of the extremal condition.

    Squaring the extremal condition to eliminate sin q yields
    64 g^2 y^4 + 16 g cos(2a) y^3 + (1 + 16 g mu cos(2a) - 64 g^2 sin^2(2a)) y^2
    + 2 mu y + mu^2 = 0 with a = phi/2 and mu = 8 g sin^2(a) - 4 g.  Every
    front's cos(q*) is a root, but the squaring step can add spurious roots
    from the mirrored sin branch, so this is a diagnostic cross-check of the
    scan, never a primary route.  At phi = 0 the quartic degenerates into a
    perfect square, so the imaginary-part filter must tolerate the numeric
    splitting of double roots.  Roots with |y| > 1 are discarded.
    """
    if p.g <= 0:
        raise ValueError("quartic crosscheck requires g > 0")
    g = p.g
    alpha = p.phi / 2.0
    mu = 8.0 * g * math.sin(alpha) ** 2 - 4.0 * g
    c4 = 64.0 * g * g
    c3 = 16.0 * g * math.cos(2.0 * alpha)
    c2 = 1.0 + 16.0 * g * mu * math.cos(2.0 * alpha) - 64.0 * g * g * math.sin(2.0 * alpha) ** 2
    c1 = 2.0 * mu
    c0 = mu * mu
    roots = np.roots([c4, c3, c2, c1, c0])
    real = sorted(
        float(r.real) for r in roots if abs(r.imag) < 1e-5 and abs(r.real) <= 1.0 + 1e-12
    )
    merged: list[float] = []
    for r in real:
        if merged and abs(r - merged[-1]) < 1e-6:
            continue
        merged.append(r)
    return merged


def quartic_front_report(p: WalkParams, tol: float = 1e-6) -> dict:
    """Compare cos(q*) of the scanned fronts against the quartic root set.

    Mismatches are reported, never fatal: the quartic is an independent
    cross-check with known defects, the scan is the primary route.
    """
    fronts = find_extremal_fronts(p)
    ys = quartic_crosscheck(p)
    matched, unmatched = [], []
    for fr in fronts:
        y = math.cos(fr.q_star)
        gap = min((abs(y - yy) for yy in ys), default=math.inf)
        (matched if gap < tol else unmatched).append({"q_star": fr.q_star, "cos_q": y, "gap": gap})
    return {
        "quartic_roots": ys,
        "matched": matched,
        "unmatched": unmatched,
        "consistent": not unmatched,
    }
