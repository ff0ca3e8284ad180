"""Effective non-Hermitian Hamiltonian of the driven three-level complex.

After the collisional and photon continua are integrated out, the two
laser-dressed bound states and the Feshbach quasi-bound state evolve
under H_eff = (hbar*Gamma_F/2) * (A + i*B) with A, B real symmetric:

    A = [[delta1, delta,  q1*sqrt(g1)],
         [delta,  delta2, q2*sqrt(g2)],
         [q1*sqrt(g1), q2*sqrt(g2), -inv_kca]]

    B = -[[g1+gamma1, g12+eta, sqrt(g1)],
          [g12+eta,   g2+gamma2, sqrt(g2)],
          [sqrt(g1),  sqrt(g2),  1      ]]

Everything here works in the dimensionless matrix A + i*B; eigenvalues
are the complex mode energies E_tilde in units of hbar*Gamma_F/2.

The eigensolver is a closed-form Cardano solve of the characteristic
cubic followed by a Newton polish and adjugate-based eigenvectors: a
3x3 complex symmetric problem is small enough that the direct formula,
with care about branch choice and cancellation, beats a general-purpose
QR iteration on both speed and worst-case transparency.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure
from .params import DimensionlessParams

#: eigenvalue residual tolerance, relative to ||A + iB||_F
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class EffectivePair:
    """The real and imaginary symmetric parts (A, B) of the effective matrix."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("a", "b"):
            m = np.asarray(getattr(self, name), dtype=float)
            if m.shape != (3, 3):
                raise ValueError(f"{name} must be 3x3, got shape {m.shape}")
            if not np.array_equal(m, m.T):
                raise ValueError(f"{name} must be exactly symmetric")
            object.__setattr__(self, name, m)

    def matrix(self) -> np.ndarray:
        """The complex matrix A + i*B."""
        return self.a + 1j * self.b


def build(params: DimensionlessParams) -> EffectivePair:
    """Assemble (A, B) from a dimensionless parameter set."""
    s1 = math.sqrt(params.g1)
    s2 = math.sqrt(params.g2)
    a = np.array([
        [params.delta1, params.delta, params.q1 * s1],
        [params.delta, params.delta2, params.q2 * s2],
        [params.q1 * s1, params.q2 * s2, -params.inv_kca],
    ])
    off = params.g12 + params.eta
    b = -np.array([
        [params.g1 + params.gamma1, off, s1],
        [off, params.g2 + params.gamma2, s2],
        [s1, s2, 1.0],
    ])
    return EffectivePair(a=a, b=b)


def char_poly_b(params: DimensionlessParams) -> tuple[float, float, float]:
    """Coefficients (G2, G1, G0) of det(x*I - B) = x^3 + G2 x^2 + G1 x + G0.

    These compact forms hold only for coherent lasers, g12 = sqrt(g1*g2);
    a warning is emitted when that is violated by more than 1e-9.  For
    general g12 the constant term becomes
    gamma1*gamma2 - (g12 + eta - sqrt(g1*g2))^2.
    """
    p = params
    root = math.sqrt(p.g1 * p.g2)
    if abs(p.g12 - root) > 1e-9:
        warnings.warn(
            f"char_poly_b closed form assumes g12=sqrt(g1*g2)={root}, got g12={p.g12}",
            stacklevel=2)
    g2_coef = 1.0 + p.g1 + p.g2 + p.gamma1 + p.gamma2
    g1_coef = (p.gamma1 + p.gamma2 + p.g1 * p.gamma2 + p.g2 * p.gamma1
               + p.gamma1 * p.gamma2 - p.eta ** 2 - 2.0 * p.eta * p.g12)
    g0_coef = p.gamma1 * p.gamma2 - p.eta ** 2
    return (g2_coef, g1_coef, g0_coef)


def char_poly_b_constant_general(params: DimensionlessParams) -> float:
    """Constant term of det(x*I - B) without the coherent-laser assumption."""
    p = params
    mismatch = p.g12 + p.eta - math.sqrt(p.g1 * p.g2)
    return p.gamma1 * p.gamma2 - mismatch ** 2


def _det3(m: np.ndarray) -> complex:
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


def adjugate3(m: np.ndarray) -> np.ndarray:
    """Adjugate (transposed cofactor matrix) of a 3x3 complex matrix."""
    c = np.empty((3, 3), dtype=complex)
    c[0, 0] = m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]
    c[0, 1] = -(m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
    c[0, 2] = m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]
    c[1, 0] = -(m[0, 1] * m[2, 2] - m[0, 2] * m[2, 1])
    c[1, 1] = m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
    c[1, 2] = -(m[0, 0] * m[2, 1] - m[0, 1] * m[2, 0])
    c[2, 0] = m[0, 1] * m[1, 2] - m[0, 2] * m[1, 1]
    c[2, 1] = -(m[0, 0] * m[1, 2] - m[0, 2] * m[1, 0])
    c[2, 2] = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return c.T


def char_coeffs(m: np.ndarray) -> tuple[complex, complex, complex]:
    """(c2, c1, c0) with det(x*I - M) = x^3 - c2 x^2 + c1 x - c0."""
    c2 = m[0, 0] + m[1, 1] + m[2, 2]
    c1 = ((m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
          + (m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0])
          + (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1]))
    c0 = _det3(m)
    return c2, c1, c0


_CUBE_ROOTS_OF_UNITY = (1.0 + 0.0j,
                        complex(-0.5, math.sqrt(3.0) / 2.0),
                        complex(-0.5, -math.sqrt(3.0) / 2.0))


def cubic_roots(c2: complex, c1: complex, c0: complex) -> list[complex]:
    """Roots of x^3 - c2 x^2 + c1 x - c0 by Cardano's formula.

    The cube-root branch is picked to maximise |u|, which avoids the
    catastrophic cancellation in t = u - p/(3u) that the naive branch
    suffers when the depressed cubic is nearly pure-quadratic.
    """
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = -2.0 * c2 ** 3 / 27.0 + c2 * c1 / 3.0 - c0
    # x = t + c2/3 turns the monic cubic into t^3 + p t + q = 0
    scale = max(abs(p), abs(q), 1e-300)
    if abs(p) <= 1e-30 * scale and abs(q) <= 1e-30 * scale:
        return [shift, shift, shift]
    disc = cmath.sqrt(q * q / 4.0 + p ** 3 / 27.0)
    u3_plus = -q / 2.0 + disc
    u3_minus = -q / 2.0 - disc
    u3 = u3_plus if abs(u3_plus) >= abs(u3_minus) else u3_minus
    u = u3 ** (1.0 / 3.0)
    roots = []
    for w in _CUBE_ROOTS_OF_UNITY:
        uk = u * w
        t = uk - p / (3.0 * uk)
        roots.append(t + shift)
    return roots


def _polish_root(x: complex, c2: complex, c1: complex, c0: complex) -> complex:
    """Newton refinement of one cubic root; keeps the best iterate seen."""
    best, best_f = x, abs(((x - c2) * x + c1) * x - c0)
    for _ in range(40):
        f = ((x - c2) * x + c1) * x - c0
        fp = (3.0 * x - 2.0 * c2) * x + c1
        if fp == 0:
            break
        step = f / fp
        x = x - step
        fx = abs(((x - c2) * x + c1) * x - c0)
        if fx < best_f:
            best, best_f = x, fx
        if abs(step) <= 1e-16 * (1.0 + abs(x)):
            break
    return best


@dataclass(frozen=True)
class ComplexEigenSet:
    """Eigen decomposition of A + i*B.

    eigenvalues   (3,) complex, sorted by descending imaginary part and,
                  on ties, ascending real part; index 0 is the
                  least-damped mode E_tilde_1
    eigenvectors  (3, 3) complex, column k belongs to eigenvalues[k],
                  unit norm with the first significant component real
                  positive
    residuals     (3,) float, ||M v - lam v||_2 per mode
    defective     True when two modes coincide and their returned
                  eigenvectors are parallel, i.e. the columns of
                  ``eigenvectors`` do not form a complete basis
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    defective: bool


def _eigenvector_for(m: np.ndarray, lam: complex, scale: float) -> np.ndarray:
    n = m - lam * np.eye(3)
    adj = adjugate3(n)
    norms = np.linalg.norm(adj, axis=0)
    k = int(np.argmax(norms))
    # adj(N) columns span the null space of N when rank(N) = 2; a tiny
    # adjugate means rank(N) <= 1 and needs the SVD fallback
    if norms[k] > 1e-13 * scale * scale:
        v = adj[:, k]
    else:
        _, _, vh = np.linalg.svd(n)
        v = vh[-1].conj()
    v = v / np.linalg.norm(v)
    for comp in v:
        if abs(comp) > 1e-12:
            v = v * (comp.conjugate() / abs(comp))
            break
    return v


def eigensystem(pair: EffectivePair) -> ComplexEigenSet:
    """All three complex eigenpairs of A + i*B.

    Raises ConvergenceFailure if any residual exceeds
    RESIDUAL_RTOL * ||A + iB||_F even after inverse-iteration rescue.
    """
    m = pair.matrix()
    c2, c1, c0 = char_coeffs(m)
    roots = [_polish_root(r, c2, c1, c0) for r in cubic_roots(c2, c1, c0)]
    roots.sort(key=lambda z: (-z.imag, z.real))

    norm_m = float(np.linalg.norm(m))
    scale = max(norm_m, 1.0)
    # Vieta guard: a collapsed root multiset passes per-pair residual
    # checks (each pair is individually genuine), the trace sum does not
    if abs(sum(roots) - c2) > 1e-8 * scale:
        raise ConvergenceFailure(
            f"root sum {sum(roots)!r} deviates from trace {c2!r}")
    vecs = np.empty((3, 3), dtype=complex)
    residuals = np.empty(3)
    for k, lam in enumerate(roots):
        v = _eigenvector_for(m, lam, scale)
        r = float(np.linalg.norm(m @ v - lam * v))
        if r > RESIDUAL_RTOL * scale:
            # inverse iteration against a slightly shifted matrix pulls a
            # stray vector back onto the true eigendirection
            shifted = m - (lam + 1e-14 * scale) * np.eye(3)
            for _ in range(3):
                try:
                    w = np.linalg.solve(shifted, v)
                except np.linalg.LinAlgError:
                    break
                v = w / np.linalg.norm(w)
                r = float(np.linalg.norm(m @ v - lam * v))
                if r <= RESIDUAL_RTOL * scale:
                    break
            for comp in v:
                if abs(comp) > 1e-12:
                    v = v * (comp.conjugate() / abs(comp))
                    break
        vecs[:, k] = v
        residuals[k] = r
    if np.max(residuals) > RESIDUAL_RTOL * scale:
        raise ConvergenceFailure(
            f"eigen residual {np.max(residuals):.3e} exceeds {RESIDUAL_RTOL:.1e} * ||M|| = "
            f"{RESIDUAL_RTOL * scale:.3e}")

    defective = False
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(roots[i] - roots[j]) < 1e-8 * scale:
                overlap = abs(np.vdot(vecs[:, i], vecs[:, j]))
                if overlap > 1.0 - 1e-6:
                    defective = True
    return ComplexEigenSet(
        eigenvalues=np.array(roots, dtype=complex),
        eigenvectors=vecs,
        residuals=residuals,
        defective=defective,
    )


def null_space_b(pair: EffectivePair, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal real null vectors of B (eigenvectors with |lam| <= tol)."""
    w, v = np.linalg.eigh(pair.b)
    return [v[:, k].copy() for k in range(3) if abs(w[k]) <= tol]
