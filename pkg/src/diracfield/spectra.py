"""Closed-form eigenvalues and eigenvectors of the solvable blocks, plus an
independent cyclic-Jacobi eigensolver used as the brute-force oracle.

The quartic closed form covers the gauge-field case A=0, B=1.  The
mirrored choice A=1, B=0 is *not* reachable from it: a diagonal sign
conjugation preserves both the diagonal and the product of couplings
around the cycle (1,2)(2,4)(4,3)(3,1), and that cycle product differs in
sign between the two cases, so no sign remap of (m, alpha, gamma) can
connect them.  Callers needing A=1, B=0 spectra use the numeric solver.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import ModelParams
from .sectors import BlockMatrix, block_1d, block_triplet

DEGENERACY_TOL = 1e-9


class DegenerateRadicalError(ArithmeticError):
    """Closed-form radicals left the real domain; use the numeric solver."""


class FormulaViolationError(ArithmeticError):
    """A closed form produced an out-of-domain intermediate value."""


@dataclass(frozen=True)
class QuarticIntermediates:
    p: float
    q: float
    r: float
    s: float


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with optional vectors and branch bookkeeping.

    branch_map[k] is the 1-based closed-form branch label of values[k],
    when a closed form supplied the values.  meta carries provenance
    flags such as eigenvector fallbacks.
    """

    values: np.ndarray
    vectors: np.ndarray | None = None
    branch_map: tuple | None = None
    meta: dict = field(default_factory=dict)


def _as_matrix(block) -> np.ndarray:
    if isinstance(block, BlockMatrix):
        return np.array(block.entries, dtype=float)
    return np.array(block, dtype=float)


def jacobi_eigensolver(block, tol: float = 1e-13) -> EigenSystem:
    """Full eigensystem of a small symmetric matrix by cyclic Jacobi sweeps.

    Kept deliberately independent of any library eigensolver so it can
    serve as the oracle for the closed forms.  Off-diagonal Frobenius
    norm is driven below `tol` (absolute).

    Parameters
    ----------
    block : BlockMatrix or array-like, symmetric, k <= 8

    Returns
    -------
    EigenSystem with ascending values and orthonormal columns.
    """
    a = _as_matrix(block)
    k = a.shape[0]
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("input must be square")
    if k > 8:
        raise ValueError("jacobi solver is restricted to blocks of size <= 8")
    if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
        raise ValueError("input must be symmetric")
    a = 0.5 * (a + a.T)
    v = np.eye(k)
    for _ in range(100):
        off = math.sqrt(sum(a[p, q] ** 2 for p in range(k) for q in range(p + 1, k)) * 2.0)
        if off < tol:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise ArithmeticError("jacobi sweep failed to converge")
    d = np.diag(a).copy()
    order = np.argsort(d, kind="stable")
    return EigenSystem(values=d[order], vectors=v[:, order])


def _require_gauge_case(params: ModelParams):
    if abs(params.A) > 1e-12 or abs(params.B - 1.0) > 1e-12:
        raise ValueError(
            "closed form covers A=0, B=1 only; the mirrored A=1, B=0 block "
            "is not sign-conjugate to it (the coupling-cycle product flips "
            "sign), so use the numeric solver there")


def quartic_intermediates(n: int, params: ModelParams) -> QuarticIntermediates:
    """Resolvent quantities (p, q, r, s) for the gauge-case quartic.

    s is evaluated with a complex principal cube root; a materially
    complex s signals a degenerate radical and raises.
    """
    _require_gauge_case(params)
    if n < 0:
        raise ValueError("n must be >= 0")
    m, al, ga = params.m, params.alpha, params.gamma
    a2, a4 = al * al, al ** 4
    m2, g2 = m * m, ga * ga
    p = (2.0 / 3.0) * ((2 * n + 3) * (1.0 + a2) + 2.0 * g2 + 2.0 * m2)
    q = (16.0 * m2 * (m2 - (1.0 + g2))
         + (1.0 + 4.0 * g2) ** 2
         + 2.0 * (1.0 + 4.0 * m2 - 8.0 * g2) * a2
         + a4
         - 16.0 * (1.0 + m2 * (a2 - 2.0) + g2 - a2 * (1.0 + 2.0 * g2) + a4) * (n + 2)
         + 16.0 * (1.0 - a2 + a4) * (n + 2) ** 2)
    det_fac = (((n + 2) * (1.0 - a2) + m2 - g2)
               * ((n + 1) * (1.0 - a2) + m2 - g2))
    r = 108.0 * (det_fac * p - p ** 3 / 16.0 + (m * a2 + ga) ** 2)
    z = (r + cmath.sqrt(complex(r * r - 4.0 * q ** 3))) / 2.0
    if abs(z) < 1e-300:
        s_c = complex(0.0)
    else:
        root = z ** (1.0 / 3.0)
        s_c = q / (3.0 * root) + root / 3.0
    if abs(s_c.imag) >= 1e-9 * max(1.0, abs(s_c.real)):
        raise DegenerateRadicalError(
            f"resolvent root is materially complex (Im s = {s_c.imag:.3e})")
    return QuarticIntermediates(p=p, q=q, r=r, s=s_c.real)


def _clip_radicand(x: float, scale: float, context: str) -> float:
    if x < -1e-9 * max(1.0, scale):
        raise DegenerateRadicalError(f"negative radicand in {context}: {x:.3e}")
    return max(x, 0.0)


def eigenvalues_gauge(n: int, params: ModelParams) -> EigenSystem:
    """Closed-form eigenvalues of the gauge-case block (A=0, B=1).

    Returns ascending values; branch_map records the closed-form branch
    label (1..4) of each sorted slot.
    """
    inter = quartic_intermediates(n, params)
    p, s = inter.p, inter.s
    g = params.m * params.alpha ** 2 + params.gamma
    half_outer = 0.5 * math.sqrt(_clip_radicand(p + s, abs(p), "outer root"))
    if half_outer < 1e-150:
        shift = 0.0 if abs(g) < 1e-12 else None
        if shift is None:
            raise DegenerateRadicalError("vanishing outer root with g != 0")
        inner1 = inner2 = 2.0 * p - s
    else:
        inner1 = 2.0 * p - s - 2.0 * g / half_outer
        inner2 = 2.0 * p - s + 2.0 * g / half_outer
    scale = max(abs(p), abs(s), 1.0)
    w1 = 0.5 * math.sqrt(_clip_radicand(inner1, scale, "first inner root"))
    w2 = 0.5 * math.sqrt(_clip_radicand(inner2, scale, "second inner root"))
    branch_values = {
        1: half_outer - w1,
        2: half_outer + w1,
        3: -half_outer - w2,
        4: -half_outer + w2,
    }
    order = sorted(branch_values, key=lambda i: branch_values[i])
    values = np.array([branch_values[i] for i in order])
    return EigenSystem(values=values, branch_map=tuple(order),
                       meta={"intermediates": inter})


def _gauge_vector(n: int, params: ModelParams, e: float) -> np.ndarray:
    m, al, ga = params.m, params.alpha, params.gamma
    a2 = al * al
    v1 = al * math.sqrt(n + 2) * ((n + 1) * (1.0 - a2) + (m - e) ** 2 - ga ** 2)
    v2 = ((m + ga) * ((n + 2) * (1.0 - a2) + a2 + m * m - ga * ga)
          - ((n + 2) * (1.0 + a2) - a2 + (m + ga) ** 2) * e
          + (ga - m) * e * e + e ** 3)
    v3 = al * ((2 * n + 3) * e - m - ga)
    v4 = math.sqrt(n + 1) * ((n + 2) * (a2 - 1.0) + (ga + e) ** 2 - m * m)
    return np.array([v1, v2, v3, v4])


def eigenvectors_gauge(n: int, params: ModelParams,
                       esys: EigenSystem | None = None) -> EigenSystem:
    """Closed-form eigenvectors of the gauge-case block, normalized.

    Falls back to the Jacobi vectors (flagged in meta) when the spectrum
    is degenerate within DEGENERACY_TOL or a closed-form vector has
    vanishing norm.
    """
    if esys is None:
        esys = eigenvalues_gauge(n, params)
    values = esys.values
    gaps = np.diff(values)
    fallback = None
    if gaps.size and float(np.min(gaps)) < DEGENERACY_TOL:
        fallback = "degenerate"
    vectors = None
    if fallback is None:
        cols = []
        for e in values:
            v = _gauge_vector(n, params, float(e))
            nv = float(np.linalg.norm(v))
            if nv < 1e-12 * max(1.0, abs(e) ** 3):
                fallback = "zero_norm"
                break
            cols.append(v / nv)
        if fallback is None:
            vectors = np.column_stack(cols)
    if fallback is not None:
        jac = jacobi_eigensolver(block_1d(n, params))
        vectors = jac.vectors
    meta = dict(esys.meta)
    if fallback:
        meta["vector_fallback"] = fallback
    return EigenSystem(values=values, vectors=vectors,
                       branch_map=esys.branch_map, meta=meta)


def eigenvalues_alpha0(n: int, params: ModelParams) -> EigenSystem:
    """Closed-form eigenvalues for the static-field-only case alpha=0."""
    if abs(params.alpha) > 1e-12:
        raise ValueError("closed form requires alpha = 0")
    if n < 0:
        raise ValueError("n must be >= 0")
    m, A, B, ga = params.m, params.A, params.B, params.gamma
    w_hi = math.sqrt((n + 2) + (m - A * ga) ** 2)
    w_lo = math.sqrt((n + 1) + (m + A * ga) ** 2)
    branch_values = {
        1: -B * ga - w_hi,
        2: -B * ga + w_hi,
        3: B * ga - w_lo,
        4: B * ga + w_lo,
    }
    order = sorted(branch_values, key=lambda i: branch_values[i])
    values = np.array([branch_values[i] for i in order])
    return EigenSystem(values=values, branch_map=tuple(order))


def eigenvectors_alpha0(n: int, params: ModelParams,
                        esys: EigenSystem | None = None) -> EigenSystem:
    """Eigenvectors for the alpha=0 case, normalized.

    Branches 1 and 2 live on basis slots (1,3), branches 3 and 4 on
    (2,4); the nontrivial component is the coupling ratio
    (E +/- (A+B)gamma - m) over the corresponding ladder element.
    """
    if esys is None:
        esys = eigenvalues_alpha0(n, params)
    m, A, B, ga = params.m, params.A, params.B, params.gamma
    sq2, sq1 = math.sqrt(n + 2), math.sqrt(n + 1)
    cols = []
    for slot, e in zip(esys.branch_map, esys.values):
        if slot in (1, 2):
            v = np.array([(e + (A + B) * ga - m) / sq2, 0.0, 1.0, 0.0])
        else:
            v = np.array([0.0, (e - (A + B) * ga - m) / sq1, 0.0, 1.0])
        cols.append(v / np.linalg.norm(v))
    return EigenSystem(values=esys.values, vectors=np.column_stack(cols),
                       branch_map=esys.branch_map, meta=dict(esys.meta))


def eigenvalues_massless(n: int, params: ModelParams) -> EigenSystem:
    """Closed-form eigenvalues for m = gamma = 0 (biquadratic case).

    E = +/- sqrt((b +/- a)/2) with a, b polynomial in n and the
    couplings; meta records (a, b).

    Valid only when one of A, B vanishes: the sum rule sum(E^2) = b
    forces b = tr(H_n^2)/2, and the polynomial b here exceeds that trace
    by 8*A*B*alpha^2, so for A*B != 0 the expressions do not reproduce
    the block spectrum and this function refuses to evaluate them.
    """
    if abs(params.m) > 1e-12 or abs(params.gamma) > 1e-12:
        raise ValueError("closed form requires m = gamma = 0")
    if abs(params.A * params.B) > 1e-12:
        raise ValueError(
            "massless closed form is valid only for A*B = 0; its b term "
            "misses tr(H^2)/2 by 8*A*B*alpha^2 otherwise, so use the "
            "numeric solver")
    if n < 0:
        raise ValueError("n must be >= 0")
    A, B, al = params.A, params.B, params.alpha
    a2 = al * al
    a_sq = (16.0 * B * B * a2 * (A * A * a2 + 1.0) * (n + 2) ** 2
            - 8.0 * B * a2 * (A * (A + B) ** 2 * a2 + A + 2.0 * B) * (n + 2)
            + (1.0 + (A + B) ** 2 * a2) ** 2)
    if a_sq < -1e-12:
        raise FormulaViolationError(f"negative discriminant a^2 = {a_sq:.3e}")
    a = math.sqrt(max(a_sq, 0.0))
    b = (2.0 * (1.0 + (A * A + B * B) * a2) * n
         + 3.0 * (1.0 + (A + B) ** 2 * a2))
    if b - a < -1e-12:
        raise FormulaViolationError(f"b - a = {b - a:.3e} is negative")
    w_in = math.sqrt(max(b - a, 0.0) / 2.0)
    w_out = math.sqrt((b + a) / 2.0)
    values = np.array(sorted((-w_out, -w_in, w_in, w_out)))
    return EigenSystem(values=values, meta={"a": a, "b": b})


def cubic_triplet_eigenvalues(params: ModelParams) -> np.ndarray:
    """Roots of the 3x3 triplet block via the trigonometric cubic formula.

    Symmetry of the block guarantees real roots, so the arccos argument
    is clipped only against floating-point spill.
    """
    mat = block_triplet(params).entries
    mean = np.trace(mat) / 3.0
    b0 = mat - mean * np.eye(3)
    p1 = math.sqrt(max(float(np.trace(b0 @ b0)) / 6.0, 0.0))
    if p1 < 1e-300:
        return np.full(3, mean)
    c = b0 / p1
    arg = float(np.linalg.det(c)) / 2.0
    arg = min(1.0, max(-1.0, arg))
    phi = math.acos(arg) / 3.0
    roots = [mean + 2.0 * p1 * math.cos(phi + 2.0 * math.pi * k / 3.0)
             for k in range(3)]
    return np.array(sorted(roots))
