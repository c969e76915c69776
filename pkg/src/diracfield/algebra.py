"""Truncated Fock / spin / isospin operator algebra.

Dense matrices for the full (unblocked) Hamiltonians and their conserved
partners on explicit product bases.  Everything here is an oracle: the
sector blocks elsewhere in the package are validated against these
matrices, never the other way around.

Conventions used throughout:
    - spin-type labels take values +1 / -1 (eigenvalues of the diagonal
      Pauli matrix on that factor),
    - the annihilator has matrix element <n-1|a|n> = scale * sqrt(n),
    - d=2 chiral operators are fixed to element 2*sqrt(n_R) so that
      [A_R, A_R^dag] = 4 on the interior, independent of `scale`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class LadderConvention:
    """Normalization of the one-mode annihilator, <n-1|a|n> = scale*sqrt(n)."""

    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("ladder scale must be positive")


@dataclass(frozen=True)
class ModelParams:
    """Physical couplings of the confined-fermion-plus-field model.

    Parameters
    ----------
    dimension : 1, 2 or 3
    m : rest mass (units with unit oscillator frequency)
    A, B : weights of the two diagonal-channel field couplings
    alpha : ladder (dynamic) field coupling
    gamma : static field coupling
    convention : ladder normalization, scale=1 by default
    """

    dimension: int = 1
    m: float = 0.0
    A: float = 0.0
    B: float = 0.0
    alpha: float = 0.0
    gamma: float = 0.0
    convention: LadderConvention = LadderConvention()

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")

    @property
    def scale(self) -> float:
        return self.convention.scale


@dataclass(frozen=True)
class ProductBasis:
    """Ordered product basis of Fock and two-valued spin labels.

    Label layout per dimension:
        d=1: (n, sigma, tau)
        d=2: (n_R, n_L, sigma, tau)
        d=3: (n_x, n_y, n_z, s, Sigma, tau)
    with s ordinary spin, Sigma the particle/antiparticle-type spin and
    tau the field doublet.  Labels are unique and lexicographically
    sorted, so the ordering is deterministic.

    For d=3 an optional total-quanta cap restricts the Fock content to
    n_x+n_y+n_z <= quanta_max, which keeps number-conserving operators
    exactly representable under truncation.
    """

    dimension: int
    n_max: int
    labels: tuple
    quanta_max: int | None = None
    _index: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_index", {lab: k for k, lab in enumerate(self.labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, label):
        return self._index.get(label)


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator with a reference to the basis it lives on."""

    entries: np.ndarray
    basis: ProductBasis | None = None

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def product_basis(dimension: int, n_max: int, quanta_max: int | None = None) -> ProductBasis:
    """Build the ordered product basis for the given dimension.

    quanta_max is honored for d=3 only; elsewhere it must be None.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    spins = (-1, 1)
    if dimension == 1:
        if quanta_max is not None:
            raise ValueError("quanta_max applies to dimension 3 only")
        labels = sorted(itertools.product(range(n_max + 1), spins, spins))
    elif dimension == 2:
        if quanta_max is not None:
            raise ValueError("quanta_max applies to dimension 3 only")
        labels = sorted(itertools.product(range(n_max + 1), range(n_max + 1), spins, spins))
    elif dimension == 3:
        fock = itertools.product(range(n_max + 1), repeat=3)
        if quanta_max is not None:
            fock = (f for f in fock if sum(f) <= quanta_max)
        labels = sorted(
            (nx, ny, nz, s, sig, tau)
            for (nx, ny, nz) in fock
            for s in spins
            for sig in spins
            for tau in spins
        )
    else:
        raise ValueError("dimension must be 1, 2 or 3")
    return ProductBasis(dimension, n_max, tuple(labels), quanta_max)


def ladder_matrix(n_max: int, convention: LadderConvention = LadderConvention(),
                  dagger: bool = False) -> OperatorMatrix:
    """One-mode annihilator on Fock levels 0..n_max.

    (a)_{n-1,n} = scale*sqrt(n); the dagger flag returns the transpose.
    """
    if n_max < 1:
        raise ValueError("invalid truncation: n_max must be at least 1")
    a = np.zeros((n_max + 1, n_max + 1))
    for n in range(1, n_max + 1):
        a[n - 1, n] = convention.scale * math.sqrt(n)
    return OperatorMatrix(a.T.copy() if dagger else a)


def _accumulate(basis: ProductBasis, rules) -> np.ndarray:
    """Assemble a dense matrix from per-label emission rules.

    Each rule maps a source label to an iterable of (target_label, amp)
    pairs; targets outside the basis are dropped, which is exactly what
    truncation does to the exact operator.
    """
    dim = basis.size
    M = np.zeros((dim, dim), dtype=complex)
    for col, lab in enumerate(basis.labels):
        for rule in rules:
            for target, amp in rule(lab):
                row = basis.index_of(target)
                if row is not None:
                    M[row, col] += amp
    return M


def _rules_1d(params: ModelParams):
    m, A, B, al, ga = params.m, params.A, params.B, params.alpha, params.gamma
    c = params.scale

    def free_ladder(lab):
        n, s, t = lab
        if s == -1 and n >= 1:           # raise sigma, lower n
            yield (n - 1, 1, t), c * math.sqrt(n)
        if s == 1:
            yield (n + 1, -1, t), c * math.sqrt(n + 1)

    def mass(lab):
        n, s, t = lab
        yield lab, m * s

    def field(lab):
        n, s, t = lab
        w = A * s + B                    # diagonal channel weight
        if t == -1 and n >= 1:
            yield (n - 1, s, 1), w * al * c * math.sqrt(n)
        if t == 1:
            yield (n + 1, s, -1), w * al * c * math.sqrt(n + 1)
        yield lab, w * ga * t

    return (free_ladder, mass, field)


def _rules_2d(params: ModelParams):
    # chiral normalization is fixed: element 2*sqrt(n_R), commutator 4
    m, A, B, al, ga = params.m, params.A, params.B, params.alpha, params.gamma

    def free_ladder(lab):
        nr, nl, s, t = lab
        if s == -1 and nr >= 1:
            yield (nr - 1, nl, 1, t), 2.0 * math.sqrt(nr)
        if s == 1:
            yield (nr + 1, nl, -1, t), 2.0 * math.sqrt(nr + 1)

    def mass(lab):
        nr, nl, s, t = lab
        yield lab, m * s

    def field(lab):
        nr, nl, s, t = lab
        w = A * s + B
        if t == -1 and nr >= 1:
            yield (nr - 1, nl, s, 1), w * al * 2.0 * math.sqrt(nr)
        if t == 1:
            yield (nr + 1, nl, s, -1), w * al * 2.0 * math.sqrt(nr + 1)
        yield lab, w * ga * t

    return (free_ladder, mass, field)


def _spin_dot_lower(lab, c):
    """Emit sigma.a applied to one d=3 label: lowers one quantum."""
    nx, ny, nz, s, sig, tau = lab
    if nx >= 1:
        yield (nx - 1, ny, nz, -s, sig, tau), c * math.sqrt(nx)
    if ny >= 1:
        yield (nx, ny - 1, nz, -s, sig, tau), c * math.sqrt(ny) * (1j * s)
    if nz >= 1:
        yield (nx, ny, nz - 1, s, sig, tau), c * math.sqrt(nz) * s


def _spin_dot_raise(lab, c):
    """Emit sigma.a^dag applied to one d=3 label."""
    nx, ny, nz, s, sig, tau = lab
    yield (nx + 1, ny, nz, -s, sig, tau), c * math.sqrt(nx + 1)
    yield (nx, ny + 1, nz, -s, sig, tau), c * math.sqrt(ny + 1) * (1j * s)
    yield (nx, ny, nz + 1, s, sig, tau), c * math.sqrt(nz + 1) * s


def _rules_3d(params: ModelParams):
    m, A, B, al, ga = params.m, params.A, params.B, params.alpha, params.gamma
    c = params.scale

    def free_ladder(lab):
        # Sigma_plus (sigma.a) + Sigma_minus (sigma.a^dag)
        sig = lab[4]
        if sig == -1:
            for tgt, amp in _spin_dot_lower(lab, c):
                yield tgt[:4] + (1,) + tgt[5:], amp
        else:
            for tgt, amp in _spin_dot_raise(lab, c):
                yield tgt[:4] + (-1,) + tgt[5:], amp

    def mass(lab):
        yield lab, m * lab[4]

    def field(lab):
        sig, tau = lab[4], lab[5]
        w = A + sig * B                  # d=3 diagonal channel weight
        if tau == -1:
            for tgt, amp in _spin_dot_lower(lab, c):
                yield tgt[:5] + (1,), w * al * amp
        else:
            for tgt, amp in _spin_dot_raise(lab, c):
                yield tgt[:5] + (-1,), w * al * amp
        yield lab, w * ga * tau

    return (free_ladder, mass, field)


def build_full_hamiltonian(params: ModelParams, n_max: int,
                           quanta_max: int | None = None) -> OperatorMatrix:
    """Full Hamiltonian on the truncated product basis.

    Parameters
    ----------
    params : model couplings; dimension selects the operator form
    n_max : per-mode Fock cap, must be >= 2
    quanta_max : optional total-quanta cap (d=3 oracles)

    Returns
    -------
    OperatorMatrix holding a dense Hermitian matrix.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    basis = product_basis(params.dimension, n_max, quanta_max)
    rules = {1: _rules_1d, 2: _rules_2d, 3: _rules_3d}[params.dimension](params)
    return OperatorMatrix(_accumulate(basis, rules), basis)


def invariant_value(label, params: ModelParams) -> float:
    """Conserved sector label of a single product-basis state.

    d=1: n + (sigma+tau)/2 - 1
    d=2: n_R + (sigma+tau)/2 - 1  (n_L is a spectator)
    d=3: n_x+n_y+n_z + (Sigma+tau)/2
    """
    if params.dimension == 1:
        n, s, t = label
        return n + 0.5 * (s + t) - 1.0
    if params.dimension == 2:
        nr, nl, s, t = label
        return nr + 0.5 * (s + t) - 1.0
    nx, ny, nz, s, sig, tau = label
    return nx + ny + nz + 0.5 * (sig + tau)


def build_invariant(params: ModelParams, n_max: int, which: str = "I",
                    quanta_max: int | None = None) -> OperatorMatrix:
    """Conserved partner operators of the Hamiltonian.

    which="I" returns the diagonal sector-label operator for any
    dimension.  which="J3T3" (d=2 only) returns the second conserved
    diagonal, orbital angular momentum plus spin halves plus the field
    doublet projection.  which="J3" (d=3 only) returns the z component
    of total angular momentum; it is Hermitian but not diagonal on the
    Cartesian labels.
    """
    basis = product_basis(params.dimension, n_max, quanta_max)
    if which == "I":
        diag = np.array([invariant_value(lab, params) for lab in basis.labels])
        return OperatorMatrix(np.diag(diag.astype(complex)), basis)
    if which == "J3T3":
        if params.dimension != 2:
            raise ValueError("J3T3 is the d=2 second invariant")
        # orbital n_R - n_L plus half of each doublet projection; both
        # couplings trade one right quantum for one raised doublet
        diag = np.array([nr - nl + 0.5 * (s + t)
                         for (nr, nl, s, t) in basis.labels])
        return OperatorMatrix(np.diag(diag.astype(complex)), basis)
    if which == "J3":
        if params.dimension != 3:
            raise ValueError("J3 applies to dimension 3")
        return OperatorMatrix(build_angular_momentum(basis, params.convention)[2], basis)
    raise ValueError(f"unknown invariant selector {which!r}")


def build_angular_momentum(basis: ProductBasis, convention: LadderConvention):
    """Total angular momentum components (orbital plus ordinary spin) for d=3.

    Orbital part is the antisymmetric ladder bilinear divided by scale^2,
    so the result is convention independent and exactly representable on
    a total-quanta-capped basis (it conserves quanta).
    """
    if basis.dimension != 3:
        raise ValueError("angular momentum builder is for dimension 3")

    def orbital(axes):
        # -i (a^dag_j a_k - a^dag_k a_j) / scale^2 for (j, k) = axes
        j, k = axes

        def rule(lab):
            f = list(lab[:3])
            if f[k] >= 1:
                g = f.copy()
                g[k] -= 1
                g[j] += 1
                yield tuple(g) + lab[3:], -1j * math.sqrt(f[k] * g[j])
            if f[j] >= 1:
                g = f.copy()
                g[j] -= 1
                g[k] += 1
                yield tuple(g) + lab[3:], 1j * math.sqrt(f[j] * g[k])

        return rule

    def spin(axis):
        def rule(lab):
            s = lab[3]
            if axis == 0:
                yield lab[:3] + (-s,) + lab[4:], 0.5
            elif axis == 1:
                yield lab[:3] + (-s,) + lab[4:], 0.5j * s
            else:
                yield lab, 0.5 * s
        return rule

    comps = []
    for axis, axes in ((0, (1, 2)), (1, (2, 0)), (2, (0, 1))):
        comps.append(_accumulate(basis, (orbital(axes), spin(axis))))
    return comps


class CartesianOracle3D:
    """Full-space d=3 oracle on a total-quanta-capped basis.

    Extracts the exact spectrum of individual (n, j) sectors by
    restricting H to one invariant eigenspace (exact, since I is
    diagonal and commutes with H) and then to one total-angular-momentum
    eigenvalue inside it.  The angular momentum operator is built once
    per basis and shared across parameter sets.
    """

    def __init__(self, params: ModelParams, quanta_max: int = 6):
        if params.dimension != 3:
            raise ValueError("the Cartesian oracle is for dimension 3")
        self.params = params
        self.quanta_max = quanta_max
        h = build_full_hamiltonian(params, quanta_max, quanta_max)
        self.basis = h.basis
        self.h = h.entries
        self._ivals = np.array([invariant_value(lab, params) for lab in self.basis.labels])
        jx, jy, jz = build_angular_momentum(self.basis, params.convention)
        self._j2 = jx @ jx + jy @ jy + jz @ jz

    def sector_values(self, n: int, j) -> np.ndarray:
        """Sorted eigenvalues of the (n, j) sector, all m_j copies included.

        Requires the sector's invariant eigenspace to sit fully inside
        the truncation (its Fock content reaches one quantum above the
        invariant value).
        """
        jf = float(j)
        big_n = 2 * n + jf - 0.5
        if big_n + 1 > self.quanta_max:
            raise ValueError("sector leaks out of the truncation; "
                             "raise quanta_max")
        sel = np.where(np.abs(self._ivals - big_n) < 1e-9)[0]
        j2_sub = self._j2[np.ix_(sel, sel)]
        w, u = np.linalg.eigh(j2_sub)
        cols = np.where(np.abs(w - jf * (jf + 1.0)) < 1e-6)[0]
        if cols.size == 0:
            raise ValueError(f"no states with j={j} at invariant value {big_n}")
        proj = u[:, cols]
        h_sub = self.h[np.ix_(sel, sel)]
        h_j = proj.conj().T @ h_sub @ proj
        return np.sort(np.linalg.eigvalsh(h_j))


def interior_mask(basis: ProductBasis, margin: int = 2) -> np.ndarray:
    """Boolean mask of states far enough from the truncation edge.

    A state is interior when every Fock quantum number is at most
    n_max - margin; on a quanta-capped basis the total is bounded the
    same way.
    """
    cap = basis.n_max - margin
    out = np.empty(basis.size, dtype=bool)
    for k, lab in enumerate(basis.labels):
        if basis.dimension == 1:
            ok = lab[0] <= cap
        elif basis.dimension == 2:
            ok = lab[0] <= cap and lab[1] <= cap
        else:
            ok = all(q <= cap for q in lab[:3])
            if basis.quanta_max is not None:
                ok = ok and sum(lab[:3]) <= basis.quanta_max - margin
        out[k] = ok
    return out


def _entries(op) -> np.ndarray:
    return op.entries if isinstance(op, OperatorMatrix) else np.asarray(op)


def commutator_norm(op_a, op_b, mask: np.ndarray | None = None) -> float:
    """Max-entry norm of [A, B], optionally restricted to masked states."""
    a, b = _entries(op_a), _entries(op_b)
    comm = a @ b - b @ a
    if mask is not None:
        comm = comm[np.ix_(mask, mask)]
    if comm.size == 0:
        return 0.0
    return float(np.max(np.abs(comm)))


def hermiticity_defect(op) -> float:
    """Largest entrywise deviation from self-adjointness."""
    a = _entries(op)
    return float(np.max(np.abs(a - a.conj().T)))
