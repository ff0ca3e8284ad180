"""Parameter containers for the three-level effective model.

All model inputs are expressed in units of half the Feshbach width
hbar*Gamma_F/2, which makes every quantity below dimensionless:

* ``g1, g2``     laser-induced widths of the two dressed bound states,
* ``g12``        laser-induced coherence (defaults to sqrt(g1*g2), the
                 value it takes when both lasers share a single phase),
* ``q1, q2``     Fano asymmetry parameters of the two photoassociation lines,
* ``delta1, delta2``  shifted laser detunings,
* ``delta``      cross coupling of the two bound states via the continuum,
* ``gamma1, gamma2``  spontaneous-emission widths of the dressed states,
* ``eta``        vacuum-induced coherence (defaults to sqrt(gamma1*gamma2),
                 the maximal-interference value reached for parallel dipoles),
* ``inv_kca``    1/(k_c * a_s), inverse scattering length at the collision
                 wave number.

``PhysicalScales`` carries the few dimensionful constants needed to map
dimensionless results back to laboratory units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .errors import ValidationError

HBAR = 1.054571817e-34  # J*s

#: keys accepted by :func:`from_dict`, in canonical order
PARAM_KEYS = (
    "g1", "g2", "g12", "q1", "q2",
    "delta1", "delta2", "delta",
    "gamma1", "gamma2", "eta", "inv_kca",
)
_OPTIONAL_KEYS = frozenset({"g12", "eta", "inv_kca"})

VALIDATION_MODES = ("permissive", "physical", "strict")

# absolute slack for the strict equalities and the physical inequalities
_EQ_TOL = 1e-12


def default_g12(g1: float, g2: float) -> float:
    """Coherent laser-induced cross width for equal laser phases.

    Requires g1, g2 >= 0.
    """
    if g1 < 0.0 or g2 < 0.0:
        raise ValidationError([f"default_g12 needs g1, g2 >= 0, got g1={g1!r}, g2={g2!r}"])
    return math.sqrt(g1 * g2)


@dataclass(frozen=True)
class DimensionlessParams:
    """Complete dimensionless input set for the effective Hamiltonian.

    ``g12`` and ``eta`` may be passed as ``None`` to request their
    coherent defaults sqrt(g1*g2) and sqrt(gamma1*gamma2).
    """

    g1: float
    g2: float
    q1: float
    q2: float
    delta1: float
    delta2: float
    delta: float
    gamma1: float = 0.0
    gamma2: float = 0.0
    g12: float | None = None
    eta: float | None = None
    inv_kca: float = 0.0

    def __post_init__(self):
        problems = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            try:
                v = float(v)
            except (TypeError, ValueError):
                problems.append(f"{f.name}={v!r} is not a real number")
                continue
            if not math.isfinite(v):
                problems.append(f"{f.name}={v!r} is not finite")
            object.__setattr__(self, f.name, v)
        if problems:
            raise ValidationError(problems)
        if self.g1 < 0.0 or self.g2 < 0.0:
            raise ValidationError(
                [f"laser-induced widths must be >= 0, got g1={self.g1}, g2={self.g2}"])
        if self.gamma1 < 0.0 or self.gamma2 < 0.0:
            raise ValidationError(
                [f"spontaneous widths must be >= 0, got gamma1={self.gamma1}, gamma2={self.gamma2}"])
        if self.g12 is None:
            object.__setattr__(self, "g12", math.sqrt(self.g1 * self.g2))
        if self.eta is None:
            object.__setattr__(self, "eta", math.sqrt(self.gamma1 * self.gamma2))

    def replace(self, **changes) -> "DimensionlessParams":
        """Return a copy with the given fields replaced (re-validated).

        A coherence that currently sits at its coherent default follows
        its parent widths: replacing g1 or g2 re-derives g12, replacing
        gamma1 or gamma2 re-derives eta, unless the coherence itself is
        part of the change.
        """
        if ("g12" not in changes and ("g1" in changes or "g2" in changes)
                and self.g12 == math.sqrt(self.g1 * self.g2)):
            changes["g12"] = None
        if ("eta" not in changes and ("gamma1" in changes or "gamma2" in changes)
                and self.eta == math.sqrt(self.gamma1 * self.gamma2)):
            changes["eta"] = None
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in PARAM_KEYS}


def from_dict(data: dict) -> DimensionlessParams:
    """Build a parameter set from a plain mapping (the on-disk schema).

    Required keys: g1, g2, q1, q2, delta1, delta2, delta, gamma1, gamma2.
    Optional: g12, eta (coherent defaults), inv_kca (default 0).
    Unknown keys are rejected so config typos fail loudly.
    """
    if not isinstance(data, dict):
        raise ValidationError([f"parameter block must be a mapping, got {type(data).__name__}"])
    problems = []
    unknown = sorted(set(data) - set(PARAM_KEYS))
    if unknown:
        problems.append(f"unknown parameter keys: {', '.join(unknown)}")
    missing = [k for k in PARAM_KEYS
               if k not in _OPTIONAL_KEYS and k not in data]
    if missing:
        problems.append(f"missing required parameter keys: {', '.join(missing)}")
    if problems:
        raise ValidationError(problems)
    kwargs = {k: data[k] for k in PARAM_KEYS if k in data}
    return DimensionlessParams(**kwargs)


def validate(params: DimensionlessParams, mode: str = "physical") -> DimensionlessParams:
    """Check a parameter set against one of three strictness levels.

    permissive  finiteness and g, gamma >= 0 (already enforced on build).
    physical    additionally the Cauchy-Schwarz bounds
                |eta| <= sqrt(gamma1*gamma2) and |g12| <= sqrt(g1*g2).
    strict      additionally the coherent equalities
                eta = sqrt(gamma1*gamma2) and g12 = sqrt(g1*g2).

    Returns the (unchanged) params on success; raises ValidationError
    listing every violated constraint otherwise.
    """
    if mode not in VALIDATION_MODES:
        raise ValidationError(
            [f"unknown validation mode {mode!r}; expected one of {VALIDATION_MODES}"])
    problems = []
    # permissive-level checks are structural and re-run here so that a
    # hand-mutated object cannot sneak through
    for k in PARAM_KEYS:
        v = getattr(params, k)
        if not isinstance(v, float) or not math.isfinite(v):
            problems.append(f"{k}={v!r} is not a finite float")
    if not problems:
        if params.g1 < 0.0:
            problems.append(f"g1={params.g1} must be >= 0")
        if params.g2 < 0.0:
            problems.append(f"g2={params.g2} must be >= 0")
        if params.gamma1 < 0.0:
            problems.append(f"gamma1={params.gamma1} must be >= 0")
        if params.gamma2 < 0.0:
            problems.append(f"gamma2={params.gamma2} must be >= 0")
    if not problems and mode in ("physical", "strict"):
        eta_max = math.sqrt(params.gamma1 * params.gamma2)
        g12_max = math.sqrt(params.g1 * params.g2)
        if abs(params.eta) > eta_max + _EQ_TOL:
            problems.append(
                f"eta={params.eta} exceeds sqrt(gamma1*gamma2)={eta_max}")
        if abs(params.g12) > g12_max + _EQ_TOL:
            problems.append(
                f"g12={params.g12} exceeds sqrt(g1*g2)={g12_max}")
        if mode == "strict":
            if abs(params.eta - eta_max) > _EQ_TOL:
                problems.append(
                    f"strict mode needs eta=sqrt(gamma1*gamma2)={eta_max}, got {params.eta}")
            if abs(params.g12 - g12_max) > _EQ_TOL:
                problems.append(
                    f"strict mode needs g12=sqrt(g1*g2)={g12_max}, got {params.g12}")
    if problems:
        raise ValidationError(problems)
    return params


@dataclass(frozen=True)
class PhysicalScales:
    """Dimensionful constants fixing the unit system.

    gamma_f  Feshbach width Gamma_F as an angular frequency (rad/s), > 0
    mu       reduced mass of the colliding pair (kg), > 0
    k_c      collision wave number (1/m), > 0
    """

    gamma_f: float
    mu: float
    k_c: float
    hbar: float = field(default=HBAR)

    def __post_init__(self):
        problems = []
        for name in ("gamma_f", "mu", "k_c", "hbar"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
                problems.append(f"{name}={v!r} must be a positive finite number")
        if problems:
            raise ValidationError(problems)

    @property
    def energy_unit(self) -> float:
        """hbar*Gamma_F/2 in joules; one dimensionless energy unit."""
        return self.hbar * self.gamma_f / 2.0

    @property
    def collision_energy(self) -> float:
        """hbar^2 k_c^2 / (2 mu) in joules."""
        return (self.hbar * self.k_c) ** 2 / (2.0 * self.mu)

    def to_joules(self, e_tilde: float) -> float:
        return e_tilde * self.energy_unit

    def from_joules(self, energy: float) -> float:
        return energy / self.energy_unit
