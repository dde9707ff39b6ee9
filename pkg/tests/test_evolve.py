import math

import numpy as np
import pytest

from chiralwalk import (
    FieldKind,
    GuardError,
    WalkParams,
    auto_lattice_size,
    cumulative,
    cumulative_moment,
    current_density,
    evolve,
    omega,
    position_moment,
    probability_density,
    skewness,
)
from oracles import dense_ring_evolution, exact_cut_current

PI = math.pi


def test_initial_state_is_delta():
    wf = evolve(WalkParams(0.25, PI / 2), 0.0)
    p = probability_density(wf).values
    origin = wf.L // 2
    assert p[origin] == pytest.approx(1.0, abs=1e-15)
    assert np.sum(p) == pytest.approx(1.0, abs=1e-15)
    assert np.max(np.delete(p, origin)) < 1e-28


def test_normalization_and_tail_guard():
    for g, phi, t in [(0.0, PI / 2, 80.0), (1 / 16, PI / 2, 150.0), (0.25, 0.3, 60.0)]:
        wf = evolve(WalkParams(g, phi), t)
        p = probability_density(wf).values
        assert abs(math.fsum(p) - 1.0) < 1e-12
        assert np.max(np.abs(wf.amps[:10])) < 1e-10
        assert np.max(np.abs(wf.amps[-10:])) < 1e-10


def test_unitary_roundtrip():
    p = WalkParams(0.2, 0.9)
    t = 37.0
    wf = evolve(p, t)
    q = 2 * np.pi * np.fft.fftfreq(wf.L)
    undone = np.fft.ifft(np.fft.fft(np.fft.ifftshift(wf.amps)) * np.exp(1j * omega(q, p) * t))
    delta = np.zeros(wf.L, dtype=complex)
    delta[0] = 1.0
    assert np.max(np.abs(undone - delta)) < 1e-10


def test_matches_dense_matrix_exponential():
    p = WalkParams(0.18, 0.7)
    wf = evolve(p, 4.0, lattice=64, enforce_guard=False)
    ref = dense_ring_evolution(64, p.g, p.phi, 4.0)
    assert np.max(np.abs(wf.amps - ref)) < 1e-12


def test_nn_only_spread_is_ballistic():
    # mu_2 = 2 t^2 exactly when the NNN hopping is switched off
    t = 50.0
    prob = probability_density(evolve(WalkParams(0.0, 0.7), t))
    assert position_moment(prob, 2) == pytest.approx(2 * t * t, rel=1e-8)


def test_moment_closed_forms_random_parameters():
    rng = np.random.default_rng(11)
    for _ in range(5):
        g = rng.uniform(0.0, 0.45)
        phi = rng.uniform(0.0, PI / 2)
        t = rng.uniform(5.0, 100.0)
        prob = probability_density(evolve(WalkParams(g, phi), t))
        mu2 = 2 * (1 + 4 * g * g) * t * t
        mu3 = 12 * g * t**3 * math.sin(phi)
        mu4 = 6 * (1 + 16 * g * g + 16 * g**4) * t**4 + 2 * (1 + 16 * g * g) * t * t
        assert abs(position_moment(prob, 1)) < 1e-8
        assert position_moment(prob, 2) == pytest.approx(mu2, rel=1e-6)
        assert position_moment(prob, 3) == pytest.approx(mu3, rel=1e-6, abs=1e-6)
        assert position_moment(prob, 4) == pytest.approx(mu4, rel=1e-6)


def test_reflection_symmetry_and_chirality():
    wf = evolve(WalkParams(0.0, PI / 2), 50.0)
    p = probability_density(wf).values
    n0 = wf.L // 2
    for n in (1, 5, 20, 60, 99):
        assert p[n0 + n] == pytest.approx(p[n0 - n], abs=1e-10)
    chiral = evolve(WalkParams(1 / 16, PI / 2), 50.0)
    pc = probability_density(chiral).values
    n0 = chiral.L // 2
    asym = max(abs(pc[n0 + n] - pc[n0 - n]) for n in range(1, 100))
    assert asym > 1e-3


def test_support_inside_causal_cone():
    g, t = 0.25, 50.0
    wf = evolve(WalkParams(g, PI / 2), t)
    p = probability_density(wf).values
    sites = wf.sites
    # exponential Airy tails: ~8 edge widths (kappa t)^(1/3) past the cone
    margin = 35
    outside = (sites < -1.5 * t - margin) | (sites > 3.0 * t + margin)
    assert np.max(p[outside]) < 1e-12


def test_current_zero_at_t0_and_total_zero():
    wf0 = evolve(WalkParams(0.2, 0.4), 0.0)
    assert np.max(np.abs(current_density(wf0).values)) < 1e-14
    for g, phi in [(0.0, 0.0), (1 / 16, PI / 2), (0.3, 1.1)]:
        wf = evolve(WalkParams(g, phi), 60.0)
        j = current_density(wf).values
        assert abs(math.fsum(j)) < 1e-8


def test_discrete_continuity():
    # NN-only: the bond current is exact, so the centred time difference of
    # p matches j(n) - j(n+1) to O(dt^2)
    dt = 1e-4
    p0 = WalkParams(0.0, PI / 2)
    L = auto_lattice_size(p0, 50.0 + 1)
    plus = probability_density(evolve(p0, 50.0 + dt, L)).values
    minus = probability_density(evolve(p0, 50.0 - dt, L)).values
    j = current_density(evolve(p0, 50.0, L)).values
    resid = (plus - minus) / (2 * dt) - (j - np.roll(j, -1))
    assert np.max(np.abs(resid)) < 1e-8
    # with NNN hopping the same identity holds for the exact two-bond cut
    # current (the published single-bond form only matches it to O(g) on
    # lattice-scale oscillations)
    p1 = WalkParams(0.25, PI / 2)
    L = auto_lattice_size(p1, 51.0)
    plus = probability_density(evolve(p1, 50.0 + dt, L)).values
    minus = probability_density(evolve(p1, 50.0 - dt, L)).values
    wf = evolve(p1, 50.0, L)
    je = exact_cut_current(wf.amps, p1.g, p1.phi)
    resid = (plus - minus) / (2 * dt) - (je - np.roll(je, -1))
    assert np.max(np.abs(resid)) < 1e-8


def test_cumulative_distributions():
    wf0 = evolve(WalkParams(0.1, 0.2), 0.0)
    cpd = cumulative(probability_density(wf0)).values
    n0 = wf0.L // 2
    assert cpd[n0 - 1] == pytest.approx(0.0, abs=1e-14)
    assert cpd[n0] == pytest.approx(1.0, abs=1e-14)

    wf = evolve(WalkParams(0.0, PI / 2), 40.0)
    cpd = cumulative(probability_density(wf)).values
    n0 = wf.L // 2
    assert cpd[n0 - 1] + cpd[n0] == pytest.approx(1.0, abs=1e-8)
    assert np.all(np.diff(cpd) > -1e-14)
    assert cpd[-1] == pytest.approx(1.0, abs=1e-10)

    ccd = cumulative(current_density(wf)).values
    assert abs(ccd[0]) < 1e-8 and abs(ccd[-1]) < 1e-8


def test_cumulative_moments():
    p = WalkParams(1 / 16, PI / 2)
    wf = evolve(p, 80.0)
    prob = probability_density(wf)
    m0 = cumulative_moment(prob, 0)
    assert m0.kind is FieldKind.CUMULATIVE_MOMENT and m0.moment_order == 0
    np.testing.assert_allclose(m0.values, cumulative(prob).values, atol=1e-14)
    m3 = cumulative_moment(prob, 3)
    assert m3.values[-1] == pytest.approx(position_moment(prob, 3), rel=1e-10)


def test_first_cumulative_moment_tracks_current():
    p = WalkParams(1 / 16, PI / 2)
    t = 5000.0
    wf = evolve(p, t)
    prob = probability_density(wf)
    m1 = cumulative_moment(prob, 1).values / t
    j = cumulative(current_density(wf)).values
    nus = wf.sites / t
    away = np.ones(wf.L, dtype=bool)
    for v_e in (-1.75, 2.25):
        away &= np.abs(nus - v_e) > 8 * (2 * t) ** (1 / 3) / t
    assert np.max(np.abs(m1[away] - j[away])) < 1e-2


def test_skewness():
    prob0 = probability_density(evolve(WalkParams(0.0, PI / 2), 50.0))
    assert abs(skewness(prob0)) < 1e-8
    g = 0.3
    prob = probability_density(evolve(WalkParams(g, PI / 2), 50.0))
    assert skewness(prob) == pytest.approx(3 * math.sqrt(2) * g / (1 + 4 * g * g) ** 1.5, abs=1e-9)
    with pytest.raises(ValueError):
        skewness(probability_density(evolve(WalkParams(0.1, 0.0), 0.0)))


def test_guards_and_validation():
    p = WalkParams(0.25, PI / 2)
    with pytest.raises(GuardError):
        evolve(p, 100.0, lattice=128)
    wf = evolve(p, 100.0, lattice=128, enforce_guard=False)  # wraps, but allowed
    assert wf.L == 128
    with pytest.raises(ValueError):
        evolve(p, -1.0)
    with pytest.raises(ValueError):
        evolve(p, 10.0, lattice=63)
    with pytest.raises(ValueError):
        cumulative(cumulative(probability_density(evolve(p, 1.0))))
    with pytest.raises(ValueError):
        position_moment(current_density(evolve(p, 1.0)), 2)
