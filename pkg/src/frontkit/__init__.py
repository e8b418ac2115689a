"""Exact computations for wave fronts evolving from polynomial hypersurfaces.

Main entry points are re-exported here; see the submodules for details.
"""

from .poly import Ring, Polynomial, ParseError
from .groebner import buchberger, quotient_algebra, local_multiplicity
from .wavefront import InitialFront, build_phase, phase_at, extract_iota, verify_assumptions, sample_front
from .divisor import (DeformationFamily, sigma_matrices, discriminant_poly, build_T,
                      transversality_verdict, stratum_tangent_check)

__version__ = "0.1.0"
