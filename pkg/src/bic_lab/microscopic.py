"""From microscopic couplings to the dimensionless effective parameters.

The starting point is the rotating-frame Hamiltonian of two laser-dressed
bound states |e1>, |e2> and the Feshbach state |c> coupled to the
collisional continuum (couplings Lambda1(E), Lambda2(E), V3(E)) and to
two photon continua (vacuum couplings V1f, V2f at the emitted-photon
energies).  Eliminating the continua at the quasi-bound energy E3 gives

    shifts     E_sh_n = PV int |Lambda_n(E)|^2 / (E3 - E) dE   (same for V3)
    crossings  alpha  = PV int Lambda1 Lambda2 / (E3 - E) dE
               beta_n = PV int Lambda_n V3     / (E3 - E) dE
    widths     Gamma_n = 2 pi Lambda_n(E3)^2,  Gamma_F = 2 pi V3(E3)^2
    coherences gamma_LIC = 2 pi Lambda1(E3) Lambda2(E3)
               Gamma_nF  = 2 pi Lambda_n(E3) V3(E3)
    vacuum     gamma_n   = 4 pi V_nf^2
               gamma_VIC = 2 pi V1f V2f * dipole_overlap   (as written)

with hbar = 1 (rates and energies identified).  Everything is evaluated
at E = E3 -- the pole approximation of the underlying derivation -- and
all vacuum-induced *shifts* are dropped, as in the source treatment.

Note the internal tension in the vacuum sector: the diagonal rates carry
4 pi where the cross term carries 2 pi, so parallel dipoles as written
give gamma_VIC = sqrt(gamma1*gamma2)/2, half the value the bound-state
condition eta = sqrt(gamma1_t*gamma2_t) needs.  ``vic_convention``
selects 'as_written' (default) or 'max_interference', which uses 4 pi in
the cross term so that parallel dipoles saturate the Cauchy-Schwarz
bound.  Nothing downstream hides the choice: it only rescales gamma_VIC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import DivergentTail, SingularEndpoint, ZeroCross, ZeroWidth
from .params import DimensionlessParams

VIC_CONVENTIONS = ("as_written", "max_interference")


# ---------------------------------------------------------------------------
# coupling shapes


@dataclass(frozen=True)
class GaussianCoupling:
    """amplitude * exp(-(E - center)^2 / (2 width^2)), defined for E >= 0."""

    amplitude: float
    center: float
    width: float

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError(f"width must be positive, got {self.width!r}")

    def __call__(self, e):
        e = np.asarray(e, dtype=float)
        out = self.amplitude * np.exp(-((e - self.center) ** 2) / (2.0 * self.width ** 2))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class WignerCoupling:
    """amplitude * E^(1/4) * exp(-E/scale): threshold-law rise, decaying tail."""

    amplitude: float
    scale: float

    def __post_init__(self):
        if self.scale <= 0.0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    def __call__(self, e):
        e = np.asarray(e, dtype=float)
        out = np.where(e > 0.0,
                       self.amplitude * np.abs(e) ** 0.25 * np.exp(-e / self.scale),
                       0.0)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class FlatCoupling:
    """Constant coupling; usable only with a finite integration window."""

    amplitude: float

    def __call__(self, e):
        e = np.asarray(e, dtype=float)
        out = np.full(e.shape, self.amplitude) if e.ndim else self.amplitude
        return out


@dataclass(frozen=True)
class CouplingModel:
    """Microscopic inputs: coupling shapes plus scalar couplings.

    lambda1, lambda2, v3 are real functions of collision energy E >= 0;
    e_max truncates their PV integrals (None means integrate to
    infinity, requiring decaying shapes).  v1f, v2f are the vacuum
    couplings at the two emitted-photon energies, dipole_overlap the
    cosine between the two transition dipoles, omega13/omega23 the
    direct bound-bound couplings, e3 the quasi-bound energy.
    """

    lambda1: Callable[[float], float]
    lambda2: Callable[[float], float]
    v3: Callable[[float], float]
    v1f: float
    v2f: float
    omega13: float
    omega23: float
    e3: float
    dipole_overlap: float
    e_max: float | None = None

    def __post_init__(self):
        if not -1.0 <= self.dipole_overlap <= 1.0:
            raise ValueError(
                f"dipole_overlap must lie in [-1, 1], got {self.dipole_overlap!r}")
        if self.e3 <= 0.0:
            raise ValueError(f"e3 must be positive, got {self.e3!r}")
        if self.e_max is not None and self.e_max <= self.e3:
            raise ValueError(
                f"e_max={self.e_max!r} must exceed e3={self.e3!r} (or be None)")


# ---------------------------------------------------------------------------
# principal-value quadrature


def _difference_quotient(f, e3: float, f_e3: float):
    """(f(E) - f(E3))/(E3 - E) with a symmetric-difference guard at the pole."""
    scale = max(1.0, abs(e3))

    def g(e: float) -> float:
        d = e3 - e
        if abs(d) < 1e-9 * scale:
            h = 1e-6 * scale
            return -(f(e3 + h) - f(e3 - h)) / (2.0 * h)
        return (f(e) - f_e3) / d

    return g


def pv_integral(f: Callable[[float], float], e3: float,
                upper: float | None = None, rtol: float = 1e-10,
                return_error: bool = False):
    """Cauchy principal value of int_0^upper f(E)/(E3 - E) dE.

    Computed by singularity subtraction:

        PV int f/(E3-E) = int (f(E) - f(E3))/(E3 - E) dE
                          + f(E3) * ln(E3 / (upper - E3))

    where the log term is the analytic principal value of the constant
    remainder (for f == 1, E3=1, upper=3 this correctly gives -ln 2).
    upper=None integrates to infinity: the subtraction runs over the
    pole-symmetric interval [0, 2*E3] (log term zero) and the plain tail
    is accumulated over geometrically growing segments; DivergentTail is
    raised when the segments stop shrinking.
    """
    if upper is not None and not math.isinf(upper):
        if e3 <= 0.0 or e3 >= upper:
            raise SingularEndpoint(
                f"pole E3={e3!r} must lie strictly inside (0, {upper!r})")
    elif e3 <= 0.0:
        raise SingularEndpoint(f"pole E3={e3!r} must be positive")

    f_e3 = float(f(e3))
    g = _difference_quotient(f, e3, f_e3)
    total = 0.0
    err = 0.0
    infinite = upper is None or math.isinf(upper)
    sub_upper = 2.0 * e3 if infinite else upper
    for a, b in ((0.0, e3), (e3, sub_upper)):
        val, ee = quad(g, a, b, epsabs=1e-14, epsrel=rtol, limit=400)
        total += val
        err += ee
    if infinite:
        # plain tail of f/(E3 - E) beyond the symmetric interval
        a = sub_upper
        width = max(e3, 1.0)
        converged = 0
        floor = max(rtol * abs(total), 1e-15 * (1.0 + abs(total)))
        for _ in range(80):
            b = a + width
            val, ee = quad(lambda e: f(e) / (e3 - e), a, b,
                           epsabs=1e-16, epsrel=rtol, limit=200)
            total += val
            err += ee
            floor = max(rtol * abs(total), 1e-15 * (1.0 + abs(total)))
            if abs(val) <= floor:
                converged += 1
                if converged >= 2:
                    break
            else:
                converged = 0
            a = b
            width *= 2.0
        else:
            raise DivergentTail(
                f"tail segments of the PV integral past E={a:.3e} keep contributing")
    else:
        total += f_e3 * math.log(e3 / (upper - e3))
    if return_error:
        return total, err
    return total


# ---------------------------------------------------------------------------
# derived effective parameters


@dataclass(frozen=True)
class MicroscopicResult:
    """Shifts, widths and coherences produced by continuum elimination.

    All entries are energies (hbar = 1); the vic_convention used for
    gamma_vic is recorded alongside the numbers.
    """

    e_sh_1: float
    e_sh_2: float
    e_sh_f: float
    alpha: float
    beta1: float
    beta2: float
    gamma_1: float
    gamma_2: float
    gamma_f: float
    gamma_lic: float
    gamma_1f: float
    gamma_2f: float
    gamma1_sp: float
    gamma2_sp: float
    gamma_vic: float
    vic_convention: str


def derive_couplings(model: CouplingModel,
                     vic_convention: str = "as_written",
                     rtol: float = 1e-10) -> MicroscopicResult:
    """Evaluate every shift, width and coherence of the elimination.

    PV integrals use the pole approximation (all evaluated at E3), and
    widths take the on-shell coupling values Lambda_n(E3), V3(E3).
    Vacuum-induced shifts are zero by construction here; only the vacuum
    widths and the VIC cross term survive.
    """
    if vic_convention not in VIC_CONVENTIONS:
        raise ValueError(
            f"vic_convention must be one of {VIC_CONVENTIONS}, got {vic_convention!r}")
    l1, l2, v3 = model.lambda1, model.lambda2, model.v3
    e3, upper = model.e3, model.e_max
    e_sh_1 = pv_integral(lambda e: l1(e) ** 2, e3, upper, rtol)
    e_sh_2 = pv_integral(lambda e: l2(e) ** 2, e3, upper, rtol)
    e_sh_f = pv_integral(lambda e: v3(e) ** 2, e3, upper, rtol)
    alpha = pv_integral(lambda e: l1(e) * l2(e), e3, upper, rtol)
    beta1 = pv_integral(lambda e: l1(e) * v3(e), e3, upper, rtol)
    beta2 = pv_integral(lambda e: l2(e) * v3(e), e3, upper, rtol)
    l1f, l2f, v3f = float(l1(e3)), float(l2(e3)), float(v3(e3))
    two_pi = 2.0 * math.pi
    vic_factor = two_pi if vic_convention == "as_written" else 2.0 * two_pi
    return MicroscopicResult(
        e_sh_1=e_sh_1, e_sh_2=e_sh_2, e_sh_f=e_sh_f,
        alpha=alpha, beta1=beta1, beta2=beta2,
        gamma_1=two_pi * l1f ** 2,
        gamma_2=two_pi * l2f ** 2,
        gamma_f=two_pi * v3f ** 2,
        gamma_lic=two_pi * l1f * l2f,
        gamma_1f=two_pi * l1f * v3f,
        gamma_2f=two_pi * l2f * v3f,
        gamma1_sp=2.0 * two_pi * model.v1f ** 2,
        gamma2_sp=2.0 * two_pi * model.v2f ** 2,
        gamma_vic=vic_factor * model.v1f * model.v2f * model.dipole_overlap,
        vic_convention=vic_convention,
    )


def to_dimensionless(res: MicroscopicResult, model: CouplingModel,
                     laser1_freq: float = 0.0, laser2_freq: float = 0.0,
                     e1: float = 0.0, e2: float = 0.0) -> DimensionlessParams:
    """Scale the derived energies by hbar*Gamma_F/2 into model parameters.

    e1, e2 and the laser frequencies are energies in the same units as
    the coupling model; only the rotating-frame combinations
    e_n - laser_n_freq enter.  The Fano parameters use
    q_n = (beta_n + omega_n3) / (Gamma_nF / 2), with q_n = 0 adopted
    when numerator and denominator both vanish.
    """
    if res.gamma_f <= 0.0:
        raise ZeroWidth(f"Gamma_F={res.gamma_f!r} must be positive")
    ef = res.gamma_f / 2.0

    def q_of(beta_n: float, omega_n3: float, gamma_nf: float, label: str) -> float:
        num = beta_n + omega_n3
        den = gamma_nf / 2.0
        if den == 0.0:
            if num == 0.0:
                return 0.0
            raise ZeroCross(
                f"q{label} undefined: Gamma_{label}F = 0 while beta+omega = {num!r}")
        return num / den

    return DimensionlessParams(
        g1=res.gamma_1 / res.gamma_f,
        g2=res.gamma_2 / res.gamma_f,
        g12=res.gamma_lic / res.gamma_f,
        q1=q_of(res.beta1, model.omega13, res.gamma_1f, "1"),
        q2=q_of(res.beta2, model.omega23, res.gamma_2f, "2"),
        delta1=(e1 - laser1_freq + res.e_sh_1) / ef,
        delta2=(e2 - laser2_freq + res.e_sh_2) / ef,
        delta=res.alpha / ef,
        gamma1=res.gamma1_sp / res.gamma_f,
        gamma2=res.gamma2_sp / res.gamma_f,
        eta=res.gamma_vic / res.gamma_f,
        inv_kca=-2.0 * (model.e3 + res.e_sh_f) / res.gamma_f,
    )


@dataclass(frozen=True)
class ScatteringLength:
    """Inverse product 1/(k_c a_s) and the scattering length itself.

    ``infinite`` flags the on-resonance case E3 + E_sh_F = 0, where
    inv_kca = 0 is the valid output and a_s diverges.
    """

    inv_kca: float
    a_s: float
    infinite: bool


def scattering_length(e3_plus_shift: float, gamma_f: float, k_c: float) -> ScatteringLength:
    """inv_kca = -2 (E3 + E_sh_F) / Gamma_F and a_s = 1/(k_c * inv_kca)."""
    if gamma_f <= 0.0:
        raise ZeroWidth(f"Gamma_F={gamma_f!r} must be positive")
    if k_c <= 0.0:
        raise ValueError(f"k_c={k_c!r} must be positive")
    inv_kca = -2.0 * e3_plus_shift / gamma_f
    if inv_kca == 0.0:
        return ScatteringLength(inv_kca=0.0, a_s=math.inf, infinite=True)
    return ScatteringLength(inv_kca=inv_kca, a_s=1.0 / (k_c * inv_kca), infinite=False)


def reference_gaussian_model() -> CouplingModel:
    """The bundled Gaussian fixture used across tests and demos.

    Couplings peak near the quasi-bound energy e3 = 1 with order-0.1
    amplitudes, mildly off-center so every PV shift and cross term is
    nonzero; vacuum couplings and a partial dipole overlap give all
    three decoherence channels nonzero values.
    """
    return CouplingModel(
        lambda1=GaussianCoupling(amplitude=0.16, center=1.25, width=0.45),
        lambda2=GaussianCoupling(amplitude=0.12, center=0.85, width=0.55),
        v3=GaussianCoupling(amplitude=0.20, center=1.05, width=0.60),
        v1f=0.05, v2f=0.04,
        omega13=0.05, omega23=-0.03,
        e3=1.0,
        dipole_overlap=0.8,
        e_max=None,
    )
