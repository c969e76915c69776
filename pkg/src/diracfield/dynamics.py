"""Initial-state preparation, exact sector-wise time evolution, and the
purity/entropy observables of the oscillator-field entanglement.

Evolution is spectral and exact: the initial product state overlaps a
handful of conserved sectors, each sector block is diagonalized once,
and every later time is a phase reassembly.  No time stepping occurs
anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import ModelParams, invariant_value
from .sectors import (block_1d, block_singlet, block_triplet,
                      generic_states_1d, triplet_states)
from .spectra import jacobi_eigensolver

LN2 = math.log(2.0)


@dataclass(frozen=True)
class OscEigenstate:
    """Two-component bound eigenstate of the field-free Hamiltonian.

    Supported on |n>|sigma=+> and |n+1>|sigma=->; amp_plus and amp_minus
    are the corresponding real amplitudes, normalized to one.
    """

    n: int
    amp_plus: float
    amp_minus: float
    energy: float
    support: tuple


@dataclass
class StateVector:
    """Complex amplitudes over product-basis labels at a given time."""

    amplitudes: dict
    time: float = 0.0

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))


@dataclass(frozen=True)
class ReducedDensity:
    """2x2 field-doublet density matrix; index 0 is tau=+1, index 1 is tau=-1."""

    rho_iso: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class EntanglementPoint:
    t: float
    gamma: float
    purity: float
    entropy: float


def dirac_oscillator_state(n: int, params: ModelParams,
                           sign: str = "positive") -> OscEigenstate:
    """Bound oscillator eigenstate from the exact two-state subproblem.

    The field-free Hamiltonian couples |n>|+> to |n+1>|-> with element
    scale*sqrt(n+1); diagonalizing that 2x2 directly keeps the state an
    exact eigenvector in whatever convention is active.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if sign not in ("positive", "negative"):
        raise ValueError("sign must be 'positive' or 'negative'")
    m = params.m
    c = params.scale * math.sqrt(n + 1)
    eps = math.sqrt(m * m + c * c)
    if sign == "positive":
        v = np.array([c, eps - m])
        energy = eps
    else:
        v = np.array([c, -(eps + m)])
        energy = -eps
    v = v / np.linalg.norm(v)
    support = ((n, 1), (n + 1, -1))
    return OscEigenstate(n=n, amp_plus=float(v[0]), amp_minus=float(v[1]),
                         energy=energy, support=support)


def prepare_initial(n: int, theta: float, params: ModelParams,
                    sign: str = "positive") -> StateVector:
    """Product state: bound oscillator eigenstate times a field doublet.

    The doublet factor is cos(theta)|+> + sin(theta)|->, normalized
    explicitly.  Expanded over d=1 product labels (fock, sigma, tau).
    """
    if params.dimension != 1:
        raise ValueError("dynamics is implemented for dimension 1")
    osc = dirac_oscillator_state(n, params, sign)
    iso = np.array([math.cos(theta), math.sin(theta)])
    iso = iso / np.linalg.norm(iso)
    amplitudes = {}
    for (fock, sigma), amp in zip(osc.support, (osc.amp_plus, osc.amp_minus)):
        for tau, w in ((1, iso[0]), (-1, iso[1])):
            if abs(amp * w) > 0.0:
                amplitudes[(fock, sigma, tau)] = complex(amp * w)
    return StateVector(amplitudes=amplitudes, time=0.0)


def _sector_of(label, params: ModelParams) -> int:
    val = invariant_value(label, params)
    n_sec = int(round(val))
    if abs(val - n_sec) > 1e-12:
        raise ValueError(f"label {label} has non-integer sector value {val}")
    return n_sec


class Propagator:
    """Caches one eigensystem per touched sector and applies exact phases."""

    def __init__(self, params: ModelParams):
        if params.dimension != 1:
            raise ValueError("dynamics is implemented for dimension 1")
        self.params = params
        self._sectors = {}

    def sector(self, n_sec: int):
        cached = self._sectors.get(n_sec)
        if cached is None:
            if n_sec >= 0:
                blk = block_1d(n_sec, self.params)
                states = generic_states_1d(n_sec)
            elif n_sec == -1:
                blk = block_triplet(self.params)
                states = triplet_states(1)
            elif n_sec == -2:
                blk = block_singlet(self.params)
                states = blk.basis.states
            else:
                raise ValueError(f"no sector at invariant value {n_sec}")
            esys = jacobi_eigensolver(blk)
            cached = (states, esys.values, esys.vectors)
            self._sectors[n_sec] = cached
        return cached

    def decompose(self, state: StateVector):
        """Group amplitudes by sector; returns [(states, E, V, coords)]."""
        groups = {}
        for label, amp in state.amplitudes.items():
            groups.setdefault(_sector_of(label, self.params), {})[label] = amp
        parts = []
        for n_sec, chunk in sorted(groups.items()):
            states, values, vectors = self.sector(n_sec)
            coords = np.array([chunk.get(lab, 0.0) for lab in states], dtype=complex)
            leftover = set(chunk) - set(states)
            if leftover:
                raise ValueError(f"labels {leftover} not part of sector {n_sec}")
            parts.append((states, values, vectors, coords))
        return parts

    def apply(self, state: StateVector, t: float) -> StateVector:
        amplitudes = {}
        for states, values, vectors, coords in self.decompose(state):
            modal = vectors.T @ coords
            evolved = vectors @ (np.exp(-1j * values * t) * modal)
            for lab, amp in zip(states, evolved):
                if amp != 0.0:
                    amplitudes[lab] = amplitudes.get(lab, 0.0) + amp
        return StateVector(amplitudes=amplitudes, time=t)


def evolve(state: StateVector, t: float, params: ModelParams) -> StateVector:
    """Exact evolution of `state` (taken as the t=0 data) to time t."""
    return Propagator(params).apply(state, t)


def reduce_isospin(state: StateVector) -> ReducedDensity:
    """Field-doublet density matrix after tracing oscillator and spin.

    For a pure bipartite state this 2x2 carries the full Schmidt
    spectrum, so purity and entropy of the large subsystem follow from
    its two eigenvalues.
    """
    buckets = {}
    for (fock, sigma, tau), amp in state.amplitudes.items():
        vec = buckets.setdefault((fock, sigma), np.zeros(2, dtype=complex))
        vec[0 if tau == 1 else 1] += amp
    rho = np.zeros((2, 2), dtype=complex)
    for vec in buckets.values():
        rho += np.outer(vec, vec.conj())
    eigs = np.linalg.eigvalsh(rho)
    return ReducedDensity(rho_iso=rho, eigenvalues=eigs)


def purity_entropy(rho: ReducedDensity) -> tuple:
    """(Tr rho^2, von Neumann entropy in natural log) with 0*ln0 := 0."""
    lam = np.clip(rho.eigenvalues.real, 0.0, None)
    purity = float(np.sum(lam ** 2))
    entropy = 0.0
    for x in lam:
        if x > 0.0:
            entropy -= x * math.log(x)
    return purity, float(entropy)


def entanglement_trajectory(n: int, theta: float, params: ModelParams,
                            t_grid) -> list:
    """Purity and entropy along a monotone time grid.

    The sector diagonalizations are done once and shared by every grid
    point.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise ValueError("time grid must be non-empty")
    if np.any(np.diff(t_grid) < 0):
        raise ValueError("time grid must be monotone nondecreasing")
    prop = Propagator(params)
    state0 = prepare_initial(n, theta, params)
    parts = prop.decompose(state0)
    points = []
    for t in t_grid:
        amplitudes = {}
        for states, values, vectors, coords in parts:
            modal = vectors.T @ coords
            evolved = vectors @ (np.exp(-1j * values * t) * modal)
            for lab, amp in zip(states, evolved):
                amplitudes[lab] = amplitudes.get(lab, 0.0) + amp
        snapshot = StateVector(amplitudes=amplitudes, time=float(t))
        purity, entropy = purity_entropy(reduce_isospin(snapshot))
        points.append(EntanglementPoint(t=float(t), gamma=params.gamma,
                                        purity=purity, entropy=entropy))
    return points


def state_to_vector(state: StateVector, basis) -> np.ndarray:
    """Dense amplitude vector of `state` on a ProductBasis (for oracles)."""
    out = np.zeros(basis.size, dtype=complex)
    for label, amp in state.amplitudes.items():
        idx = basis.index_of(label)
        if idx is None:
            raise ValueError(f"label {label} missing from the target basis")
        out[idx] = amp
    return out
