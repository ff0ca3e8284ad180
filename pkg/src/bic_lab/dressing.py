"""Magnetic dressing of the two excited bound states.

A resonant magnetic field of Rabi frequency Omega_m and detuning Delta_m
mixes the bare excited levels into the dressed pair actually coupled by
the photoassociation lasers.  The mixing angle controls how the bare
spontaneous widths recombine, and a large Omega_m relative to the bare
widths is what makes the vacuum-induced coherence between the dressed
states effective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateDressing, ZeroLinewidth


def mixing_angle(omega_m: float, delta_m: float) -> float:
    """Rotation angle theta of the bare -> dressed basis change.

    theta = atan2(Omega_m, Delta_m) / 2, continuous through Delta_m = 0
    for Omega_m > 0 and odd in Omega_m.  Undefined when both arguments
    vanish (the two bare states are then exactly degenerate and any
    basis is as good as any other).
    """
    if omega_m == 0.0 and delta_m == 0.0:
        raise DegenerateDressing("Omega_m = Delta_m = 0 leaves the dressed basis undefined")
    return 0.5 * math.atan2(omega_m, delta_m)


def dressed_splitting(omega_m: float, delta_m: float) -> float:
    """Energy separation of the dressed pair, sqrt(Omega_m^2 + Delta_m^2)."""
    return math.hypot(omega_m, delta_m)


def vic_feasibility(omega_m: float, gamma1_bare: float, gamma2_bare: float) -> float:
    """Figure of merit Omega_m / sqrt(gamma1_bare * gamma2_bare).

    Values >> 1 mean the dressed states are split by much more than the
    geometric mean of the bare widths, so the cross damping between them
    survives the secular approximation.
    """
    if gamma1_bare <= 0.0 or gamma2_bare <= 0.0:
        raise ZeroLinewidth(
            f"bare widths must be positive, got {gamma1_bare!r}, {gamma2_bare!r}")
    return omega_m / math.sqrt(gamma1_bare * gamma2_bare)


@dataclass(frozen=True)
class DressedPair:
    """Dressed-basis summary: angle, basis coefficients and splitting."""

    theta: float
    cos_theta: float
    sin_theta: float
    splitting: float
    feasibility: float | None = None


def dress(omega_m: float, delta_m: float,
          gamma1_bare: float | None = None,
          gamma2_bare: float | None = None) -> DressedPair:
    """Full dressing summary for one magnetic-field working point.

    The feasibility ratio is only computed when both bare widths are
    supplied (it needs them to be positive).
    """
    theta = mixing_angle(omega_m, delta_m)
    feas = None
    if gamma1_bare is not None and gamma2_bare is not None:
        feas = vic_feasibility(omega_m, gamma1_bare, gamma2_bare)
    return DressedPair(
        theta=theta,
        cos_theta=math.cos(theta),
        sin_theta=math.sin(theta),
        splitting=dressed_splitting(omega_m, delta_m),
        feasibility=feas,
    )
