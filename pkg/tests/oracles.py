"""Independent reference implementations used only by the tests.

Each oracle takes a different route than the package code it checks:
the Airy-type profiles come from an exact Maclaurin series evaluated in
mpmath arbitrary precision (the package integrates a rotated contour in
float64), and the ring evolution comes from a dense matrix exponential
(the package uses FFT diagonalization).
"""

import mpmath as mp
import numpy as np
from scipy.linalg import expm


def series_airy(k, xi, dps=60, nmax=4000):
    """Maclaurin series of the order-k edge profile function.

    Expanding exp(-i xi eta) under the integral gives moments of
    exp(-i eta^(k+2)/(k+2)) along the decay rays, which reduce to Gamma
    functions; the series is entire and is summed in mpmath arithmetic so
    the large-|xi| cancellation costs no precision.
    """
    with mp.workdps(dps):
        kp2 = k + 2
        delta = mp.pi / (2 * kp2)
        total = mp.mpf(0)
        x = mp.mpf(xi)
        small = 0
        for m in range(nmax):
            gam = mp.power(kp2, mp.mpf(m + 1) / kp2 - 1) * mp.gamma(mp.mpf(m + 1) / kp2)
            if m % 2 == 0:
                term = ((-1) ** (m // 2)) * x**m / mp.factorial(m) * 2 * gam * mp.cos((m + 1) * delta)
            else:
                term = ((-1) ** ((m + 1) // 2)) * x**m / mp.factorial(m) * 2 * gam * mp.sin((m + 1) * delta)
            total += term
            if abs(term) < mp.mpf(10) ** (-dps + 4):
                small += 1
                if small >= kp2 + 1:
                    break
            else:
                small = 0
        return float(total / (2 * mp.pi))


def ring_hamiltonian(L, g, phi):
    """Dense Hamiltonian of the periodic chain, NN plus complex NNN hopping."""
    H = np.zeros((L, L), dtype=complex)
    for n in range(L):
        H[n, (n + 1) % L] += 1.0
        H[n, (n - 1) % L] += 1.0
        H[n, (n + 2) % L] += g * np.exp(1j * phi)
        H[n, (n - 2) % L] += g * np.exp(-1j * phi)
    return H


def dense_ring_evolution(L, g, phi, t):
    """expm(-i H t) applied to the delta state, centered site indexing."""
    psi0 = np.zeros(L, dtype=complex)
    psi0[L // 2] = 1.0
    return expm(-1j * ring_hamiltonian(L, g, phi) * t) @ psi0


def exact_cut_current(amps, g, phi):
    """Lattice current through the cut between sites n-1 and n.

    Sums the NN bond plus both NNN bonds crossing the cut, so the discrete
    continuity equation dp/dt = j(n) - j(n+1) holds exactly for every g.
    """
    b_nn = np.conj(np.roll(amps, 1)) * amps
    b_far = np.conj(np.roll(amps, 2)) * amps
    b_straddle = np.conj(np.roll(amps, 1)) * np.roll(amps, -1)
    return -2.0 * np.imag(b_nn) - 2.0 * g * np.imag(np.exp(1j * phi) * (b_far + b_straddle))
