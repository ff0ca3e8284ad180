"""Bound states in the continuum protected by vacuum-induced coherence.

A small numerical laboratory for a three-level photoassociation model:
two laser-dressed molecular states and a Feshbach quasi-bound state
coupled through a collisional continuum and two photon continua.  The
package assembles the non-Hermitian effective Hamiltonian, solves the
bound-state-in-continuum conditions in closed form, computes Fano
spectra with ultra-narrow-peak metrics, derives the effective
parameters from microscopic couplings, and validates the continuum
elimination against a brute-force discretized model.
"""

__version__ = "0.1.0"

from .bic import (BicSolution, CertificationReport, bic_no_decay, bic_vector,
                  certify, solve_bic, vic_residual)
from .dressing import DressedPair, dress, dressed_splitting, mixing_angle, vic_feasibility
from .discretized import (DiscretizedModel, GridSpec, PoleComparison,
                          ResolventReport, compare_pole_approximation,
                          default_probes, discretize, resolvent_check,
                          smoothed_kernel_sum)
from .errors import (BicLabError, ConvergenceFailure, DegenerateDressing,
                     DegenerateVector, DivergentTail, FixedPointDivergence,
                     GridCoverage, MultiPeak, NoPeak, PoleHit, ProbeOnSpectrum,
                     SingularEndpoint, SingularSolve, TrackingAmbiguity,
                     ValidationError, ZeroCross, ZeroLinewidth, ZeroWidth)
from .hamiltonian import (ComplexEigenSet, EffectivePair, build, char_poly_b,
                          char_poly_b_constant_general, eigensystem, null_space_b)
from .microscopic import (CouplingModel, FlatCoupling, GaussianCoupling,
                          MicroscopicResult, ScatteringLength, WignerCoupling,
                          derive_couplings, pv_integral, reference_gaussian_model,
                          scattering_length, to_dimensionless)
from .params import (DimensionlessParams, PhysicalScales, default_g12,
                     from_dict, validate)
from .spectrum import (EtaPoint, EtaSweepResult, PeakMetrics, SpectrumSeries,
                       amplitude, eigentrack, peak_metrics, refine_peak,
                       spectrum_series, sweep_eta)

__all__ = [name for name in dir() if not name.startswith("_")]
