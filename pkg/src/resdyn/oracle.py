"""Brute-force verification: Chebyshev time propagation on a truncated lattice.

The dot plus 2N lead sites form a real symmetric matrix whose exact dynamics
(up to the reflection horizon N/(2b)) ground-truths every contour-based
amplitude.  The propagator expansion uses scipy's Bessel J_k, keeping this
module independent of the kernel's own Bessel evaluation used on the
analytic side.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.special import jv

from .errors import DomainError, ReflectionContamination
from .lattice import TDotParams


@dataclass(frozen=True)
class TruncatedLattice:
    """Finite Hamiltonian: [d1, d2, L_1..L_N, R_1..R_N] site ordering."""

    params: TDotParams
    n_sites_per_lead: int
    matrix: sparse.csr_matrix

    @property
    def dimension(self):
        return 2 + 2 * self.n_sites_per_lead

    @property
    def safe_horizon(self):
        """Largest |t| free of boundary reflections: N/(2b) with group
        velocity at most 2b."""
        return self.n_sites_per_lead / (2.0 * self.params.b)


def build_hamiltonian(params, n_sites_per_lead):
    """Assemble the truncated tight-binding matrix (real symmetric)."""
    n = int(n_sites_per_lead)
    if n < 50:
        raise DomainError("need at least 50 sites per lead")
    dim = 2 + 2 * n
    rows, cols, vals = [], [], []

    def add(i, j, v):
        if v != 0.0:
            rows.append(i)
            cols.append(j)
            vals.append(v)
            if i != j:
                rows.append(j)
                cols.append(i)
                vals.append(v)

    add(0, 0, params.eps1)
    add(1, 1, params.eps2)
    add(0, 1, -params.g)
    left0, right0 = 2, 2 + n
    add(1, left0, -params.t2l)
    add(1, right0, -params.t2r)
    for x in range(n - 1):
        add(left0 + x, left0 + x + 1, -params.b)
        add(right0 + x, right0 + x + 1, -params.b)
    mat = sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    return TruncatedLattice(params, n, mat)


@dataclass(frozen=True)
class PropagationResult:
    times: tuple
    amplitudes: dict  # site label -> tuple of complex values
    norms: tuple
    safe_horizon: float
    flags: tuple = ()


def _gershgorin_bound(mat):
    return float(np.max(np.abs(mat).sum(axis=1)))


def _chebyshev_order(alpha):
    k = int(abs(alpha)) + 20
    while abs(jv(k, alpha)) > 1e-17:
        k += 10
    return k + 10


def initial_vector(lattice, initial):
    """|d1> or the (|d1> + e^{i theta}|d2>)/sqrt2 superposition."""
    v = np.zeros(lattice.dimension, dtype=complex)
    if initial == "d1":
        v[0] = 1.0
        return v
    kind, theta = initial
    if kind != "theta":
        raise DomainError(f"unknown initial state {initial!r}")
    v[0] = 1.0 / np.sqrt(2.0)
    v[1] = np.exp(1j * float(theta)) / np.sqrt(2.0)
    return v


def propagate(lattice, initial, times, want_d2=False):
    """<d1|e^{-iHt}|init> (and <d2|...> on request) on a time grid.

    Chebyshev expansion of the propagator with the spectrum rescaled by the
    exact Gershgorin row bound; the polynomial vectors are computed once and
    reused for every grid time.  Norm conservation is reported per time.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise DomainError("times must be a non-empty 1-d grid")
    flags = []
    t_max = float(np.max(np.abs(times)))
    if t_max > lattice.safe_horizon:
        flags.append("reflection-contamination")
        warnings.warn(
            f"max |t| = {t_max:g} exceeds the reflection-free horizon "
            f"{lattice.safe_horizon:g}", ReflectionContamination)

    h = lattice.matrix
    scale = _gershgorin_bound(h)
    h_tilde = h / scale
    alpha_max = scale * t_max
    order = _chebyshev_order(alpha_max) if alpha_max > 0 else 1

    v = initial_vector(lattice, initial)
    cheb = np.empty((order + 1, lattice.dimension), dtype=complex)
    cheb[0] = v
    cheb[1] = h_tilde @ v
    for k in range(2, order + 1):
        cheb[k] = 2.0 * (h_tilde @ cheb[k - 1]) - cheb[k - 2]

    ks = np.arange(order + 1)
    prefac = np.where(ks == 0, 1.0, 2.0) * (-1j) ** ks
    amp_d1 = np.empty(len(times), dtype=complex)
    amp_d2 = np.empty(len(times), dtype=complex)
    norms = np.empty(len(times))
    for i, t in enumerate(times):
        coeff = prefac * jv(ks, scale * t)
        state = coeff @ cheb
        amp_d1[i] = state[0]
        amp_d2[i] = state[1]
        norms[i] = float(np.linalg.norm(state))
    amplitudes = {"d1": tuple(amp_d1)}
    if want_d2:
        amplitudes["d2"] = tuple(amp_d2)
    return PropagationResult(tuple(float(t) for t in times), amplitudes,
                             tuple(norms), lattice.safe_horizon, tuple(flags))
