"""Edge scaling at extremal fronts: generalized Airy profiles and staircases.

Near a k-th order front moving at v_e, the cumulative distributions deviate
from bulk scaling on a window of ~ (|kappa_k| t)^(1/(k+2)) sites, with a
universal profile built from the oscillatory integral

    A_k(xi) = (1/2pi) \\int dn exp(-i (xi n + n^(k+2)/(k+2)))

A_1 is the classical Airy function Ai.  For odd k the profile is real and
its zeros quantize the cumulative deviation into a staircase whose step
areas (plateau height times inter-inflection width) are nearly constant.

Orientation convention used throughout this module: the edge coordinate is

    xi = sign(kappa_k) * (n - v_e t) / (|kappa_k| t)^(1/(k+2))

so xi > 0 always points from the front into the allowed (oscillatory)
region, for left, right and internal fronts alike.  In this coordinate the
envelope is A_k(-xi): it oscillates for xi > 0 and decays for xi < 0, so
the predicted scaled deviation int_0^xi A_k(-u)^2 du is non-decreasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad
from scipy.signal import find_peaks

from .dispersion import WalkParams
from .evolve import cumulative, current_density, evolve, probability_density
from .fronts import TOL_DEGEN, ExtremalFront, cone_topology

XI_LIMIT = 50.0
QUAD_KW = dict(limit=2000, epsabs=1e-13, epsrel=1e-12)


def _check_order(k: int):
    if not isinstance(k, (int, np.integer)) or k < 1 or k % 2 == 0:
        raise ValueError(
            f"only odd front orders give real edge profiles with a staircase; got k={k}"
        )


def generalized_airy(k: int, xi: float) -> float:
    """Real value of A_k(xi) for odd k, by contour-rotated quadrature.

    The integration path runs along the real axis through the stationary-
    phase region and then turns into the sector where the phase decays
    exponentially, a ray at angle pi/(2(k+2)) below the real axis (plus the
    mirror ray on the left half, folded in via the reality of A_k).
    Absolute accuracy is ~1e-12 for |xi| <= 15; |xi| > 50 is rejected as
    unvalidated.
    """
    _check_order(k)
    xi = float(xi)
    if abs(xi) > XI_LIMIT:
        raise ValueError(f"|xi| > {XI_LIMIT} is outside the validated range")
    kp2 = k + 2
    delta = math.pi / (2.0 * kp2)

    def f(eta):
        return np.exp(-1j * (xi * eta + eta**kp2 / kp2))

    # beyond the outermost stationary point the phase derivative is positive,
    # so the rotated tail decays immediately
    r0 = max(2.0, 1.6 * (-xi) ** (1.0 / (k + 1))) if xi < 0 else 1.0
    seg = quad(lambda r: f(r).real, 0.0, r0, **QUAD_KW)[0]
    rot = complex(math.cos(delta), -math.sin(delta))
    tail = quad(lambda s: (rot * f(r0 + s * rot)).real, 0.0, np.inf, **QUAD_KW)[0]
    return (seg + tail) / math.pi


def airy_table(k: int, xi: np.ndarray) -> np.ndarray:
    """A_k evaluated on a grid (plain loop; each point is an adaptive quadrature)."""
    return np.array([generalized_airy(k, float(x)) for x in np.asarray(xi, dtype=float)])


def airy_ode_residual(k: int, xi: float, h: float = 0.05) -> float:
    """Residual of the defining ODE probed by finite differences.

    A_k satisfies A_k^(k+1)(xi) = (-1)^k i^(k+1) xi A_k(xi); for odd k the
    right-hand side is real: +xi A_1 for k=1 and -xi A_3 for k=3.  The
    (k+1)-th derivative is estimated from central stencils of the quadrature
    values, so the residual is expected below ~1e-5, not machine precision.
    """
    _check_order(k)
    if k == 1:
        w = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
        offs = np.arange(-2, 3)
        rhs_sign = 1.0
    elif k == 3:
        w = np.array([-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0]) / (6.0 * h**4)
        offs = np.arange(-3, 4)
        rhs_sign = -1.0
    else:
        raise ValueError("ODE residual probe implemented for k in {1, 3}")
    vals = airy_table(k, xi + offs * h)
    deriv = float(np.dot(w, vals))
    centre = vals[len(vals) // 2]
    return deriv - rhs_sign * xi * centre


@dataclass(frozen=True, eq=False)
class EdgeProfile:
    """Scaled cumulative deviations near one front, numeric or predicted.

    dphi_scaled(xi) = sign(kappa) * (Phi(n(xi)) - Phi(n_e)) * (|kappa| t)^(1/(k+2))
    rises monotonically for xi > 0; djs_scaled = v_e * dphi_scaled.
    """

    front: ExtremalFront
    t: float
    xi: np.ndarray
    dphi_scaled: np.ndarray
    djs_scaled: np.ndarray
    source: str  # "numeric" or "predicted"


@dataclass(frozen=True)
class StaircaseStep:
    """One plateau of the staircase: area = height * width (units of a)."""

    index: int
    height: float
    width: float
    area: float


def edge_scale(front: ExtremalFront, t: float) -> float:
    """(|kappa_k| t)^(1/(k+2)), the site width of the edge window."""
    return (abs(front.kappa) * t) ** (1.0 / (front.order + 2))


def predict_edge(front: ExtremalFront, t: float, xi_grid: np.ndarray) -> EdgeProfile:
    """Predicted scaled deviation: the running integral of A_k(-u)^2.

    Rejects even-order fronts, whose amplitude equation has an imaginary
    dispersion term and therefore no real staircase.
    """
    if front.order % 2 == 0:
        raise ValueError(
            f"front of even order {front.order} has no real staircase profile"
        )
    xi_grid = np.asarray(xi_grid, dtype=float)
    lo = min(float(xi_grid.min()), 0.0)
    hi = max(float(xi_grid.max()), 0.0)
    fine = np.arange(lo, hi + 0.01, 0.01)
    env2 = airy_table(front.order, -fine) ** 2
    running = np.concatenate([[0.0], cumulative_trapezoid(env2, fine)])
    # shift so the integral is taken from xi = 0
    at_zero = float(np.interp(0.0, fine, running))
    dphi = np.interp(xi_grid, fine, running) - at_zero
    return EdgeProfile(front, float(t), xi_grid, dphi, front.velocity * dphi, "predicted")


def measure_edge(
    p: WalkParams,
    front: ExtremalFront,
    t: float,
    window: int,
    lattice: int | None = None,
) -> EdgeProfile:
    """Numeric edge profile from the evolved state, +-window sites around n_e.

    The window must not reach any other front travelling at a different
    velocity (co-moving degenerate partners are fine and simply double the
    profile).
    """
    if t <= 0:
        raise ValueError("measure_edge needs t > 0")
    n_e = round(front.velocity * t)
    diagram = cone_topology(p)
    for other in diagram.fronts:
        if abs(other.velocity - front.velocity) <= TOL_DEGEN:
            continue
        if abs(round(other.velocity * t) - n_e) <= window + 10:
            raise ValueError(
                f"window of {window} sites around n={n_e} overlaps the front at "
                f"v={other.velocity:.4f}; shrink the window or increase t"
            )
    wf = evolve(p, t, lattice)
    phi_num = cumulative(probability_density(wf)).values
    j_num = cumulative(current_density(wf)).values
    scale = edge_scale(front, t)
    s = 1 if front.kappa > 0 else -1
    ns = n_e + np.arange(-window, window + 1)
    idx = ns + wf.L // 2
    if idx.min() < 0 or idx.max() >= wf.L:
        raise ValueError("window extends past the lattice; enlarge the lattice")
    ref = n_e + wf.L // 2
    xi = s * (ns - front.velocity * t) / scale
    dphi = s * (phi_num[idx] - phi_num[ref]) * scale
    djs = s * (j_num[idx] - j_num[ref]) * scale
    order = np.argsort(xi)
    return EdgeProfile(front, float(t), xi[order], dphi[order], djs[order], "numeric")


def _savgol5(y: np.ndarray, deriv: int, h: float) -> np.ndarray:
    """Least-squares quadratic over a sliding 5-sample window."""
    if deriv == 0:
        w = np.array([-3.0, 12.0, 17.0, 12.0, -3.0]) / 35.0
    else:
        w = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) / (10.0 * h)
    return np.convolve(y, w[::-1], mode="same")


def _refine(xs: np.ndarray, ys: np.ndarray, i: int) -> float:
    denom = ys[i - 1] - 2.0 * ys[i] + ys[i + 1]
    off = 0.5 * (ys[i - 1] - ys[i + 1]) / denom if denom != 0.0 else 0.0
    return float(xs[i] + np.clip(off, -1.0, 1.0) * (xs[1] - xs[0]))


def extract_staircase(
    profile: EdgeProfile,
    observable: str = "cpd",
    min_sep: float = 0.8,
    dip_frac: float = 0.5,
) -> list[StaircaseStep]:
    """Locate staircase steps in a monotone edge profile.

    Plateau positions are the zeros of the profile's first derivative and
    the step width is the gap between the two consecutive non-stationary
    inflection points (the steepest points of the bounding risers); both are
    estimated from 5-point quadratic least-squares (Savitzky-Golay)
    derivatives.  Riser peaks are required to be separated by at least
    min_sep in xi and by a derivative dip below dip_frac of the smaller
    peak, which rejects the short-wavelength interference ripple that rides
    on the risers near degenerate or internal fronts.  area = height*width.

    Returns an empty list (diagnostic, not an error) when fewer than two
    steps are detectable.  For "ccd" the current profile divided by the
    front velocity is analysed, so heights and areas match the "cpd" ones.
    """
    if observable == "cpd":
        y = profile.dphi_scaled
    elif observable == "ccd":
        y = profile.djs_scaled / profile.front.velocity
    else:
        raise ValueError("observable must be 'cpd' or 'ccd'")
    keep = profile.xi >= 0.0
    xi = profile.xi[keep]
    y = np.asarray(y, dtype=float)[keep]
    if len(xi) < 7:
        return []
    h = float(xi[1] - xi[0])
    if not np.allclose(np.diff(xi), h, rtol=1e-6, atol=1e-12):
        raise ValueError("extract_staircase expects uniformly sampled xi")
    d = _savgol5(y, 1, h)
    ys = _savgol5(y, 0, h)
    valid = slice(2, len(xi) - 2)
    peaks, _ = find_peaks(d[valid], distance=max(1, int(round(min_sep / h))))
    peaks = list(peaks + 2)
    while len(peaks) > 1:
        worst, worst_ratio = None, dip_frac
        for m in range(len(peaks) - 1):
            ref = min(d[peaks[m]], d[peaks[m + 1]])
            if ref <= 0.0:
                continue
            ratio = float(np.min(d[peaks[m] : peaks[m + 1] + 1])) / ref
            if ratio > worst_ratio:
                worst, worst_ratio = m, ratio
        if worst is None:
            break
        peaks.pop(worst if d[peaks[worst]] < d[peaks[worst + 1]] else worst + 1)
    steps = []
    for m in range(len(peaks) - 1):
        i0, i1 = peaks[m], peaks[m + 1]
        seg = int(np.argmin(d[i0 : i1 + 1])) + i0
        pos = _refine(xi, d, seg) if i0 < seg < i1 else float(xi[seg])
        height = float(np.interp(pos, xi[valid], ys[valid]))
        width = _refine(xi, d, i1) - _refine(xi, d, i0)
        steps.append(StaircaseStep(m + 1, height, width, height * width))
    return steps if len(steps) >= 2 else []
