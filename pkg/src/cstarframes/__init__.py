"""Continuous frames in finite-dimensional Hilbert C*-modules.

The coefficient algebra is a finite direct sum of full matrix algebras,
the module is a finite-dimensional space of rectangular matrices, and
frames are piecewise-polynomial maps on a measure space made of
intervals and point masses.
"""

__version__ = "0.1.0"

from .algebra import (DEFAULT_TOL, AlgebraElement, BlockSpec, alg_adjoint, alg_invert,
                      alg_is_positive, alg_mul, alg_norm, alg_spectrum)
from .descriptor import (Descriptor, dumps_descriptor, load_descriptor, loads_descriptor,
                         parse_descriptor, save_descriptor, shipped_example)
from .errors import (DegreeCapExceeded, DescriptorError, FrameError, HypothesisFails, InvalidSpace,
                     KernelViolation, NotACoefficient, NotAFrame, NotApplicable, NotDual, NotInSpan,
                     OutOfDomain, PreconditionFailed, Singular, SpaceMismatch, SpecMismatch,
                     ZeroVector)
from .exactness import (FRAME_WITH_BOUND, MEASURE_ZERO, NOT_FRAME, ExactnessScan, NonRieszReport,
                        RemovalReport, RieszReport, SubsetRemovalReport, exactness_scan,
                        minimal_coefficient_defect, non_riesz_via_removal, psi_identity_defect,
                        psi_map, removal_check_atom, riesz_type_check, subset_removal_check)
from .frame import (COMMUTATIVE_EXACT, DIRECTION_SAMPLED, BoundsReport, DualityReport, FrameMap,
                    LowerBoundCheck, analysis_apply, canonical_dual, dual_pair_lower_bound_check,
                    duality_defect, frame_bounds, frame_eval, frame_operator, mixed_operator,
                    synthesis_apply)
from .hmodule import (ModuleElement, ModuleOperator, ModuleSpace, ValidationReport, coords_many,
                      mod_act, mod_coords, mod_inner, mod_norm, mod_validate, op_apply,
                      op_compose, op_identity_defect, op_inverse)
from .measure import (DEGREE_CAP, AlgebraPoly, MeasureSpace, evaluate, integrate_alg_poly,
                      l2_inner, moment)

__all__ = [n for n in dir() if not n.startswith("_")]
