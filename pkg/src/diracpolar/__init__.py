"""Polar form of Dirac spinor fields, their Lie derivatives along Killing fields,
and a spherical-symmetry no-go certificate."""

from .clifford import (ETA, REST_SPINOR, GammaBasis, SpinGroupElement, build_gamma_basis,
                       check_algebra_identities, exp_spin, lorentz_of_spin)
from .dynamics import (DynamicsContext, ZYPair, dirac_residuals, divergence_residual, energy_tensor,
                       momentum, p_minus_v, zy_vectors)
from .errors import (DegenerateTetrad, DiracPolarError, InvalidPolarData, InvalidScenario, NonRealBilinear,
                     NotKilling, NotSpinGroup, NotWeaklyInvariant, OutOfDomain, ParseError, SingularSpinor)
from .expr import Expr, parse_field_expr
from .fields import FieldPoint, LFactor, PolarField, field_from_spec
from .geometry import (GeometryPoint, KillingField, SpacetimeChart, chart_from_spec, flat_cartesian,
                       flat_spherical, killing_residual, riemann, schwarzschild, spin_connection,
                       stationary_spherical)
from .lie import (LieReport, bracket_operator, cond_scalar, equivalence_check, lie_bilinears,
                  lie_gamma_residual, lie_report, lie_spinor, polar_lie_decomposition, weak_residuals)
from .observables import Bilinears, Spinor, bilinears, fierz_residuals, is_singular
from .polar import PolarData, frame_transform, polar_decompose, polar_reconstruct
from .scenario import BUILTIN, Scenario, load_scenario
from .spherical import (SphericalScenario, ansatz_field, nogo_certificate, parity_constraints,
                        random_scenarios, spherical_killing_fields)
from .tensorial import (TensorialConnection, curvature_residuals, tensorial_connection, transport_residuals)

__version__ = "0.1.0"

__all__ = [name for name, obj in dict(globals()).items()
           if not name.startswith("_") and type(obj).__name__ != "module"]
