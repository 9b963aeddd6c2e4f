"""Piecewise-linear chord-arc and Legendrian curve toolkit.

Curves are polylines in the plane or in contact 3-space (R^3 with a
form dz + beta).  The package provides chord-arc diagnostics, Legendrian
lifting and projection, bypass isotopies and integral-correction flows,
corner smoothing, linking / writhe / Thurston-Bennequin numbers, and a
gallery of explicit example curves, all behind the `leglab` CLI.
"""

from .errors import (LeglabError, ValidationError, DegenerateInputError,
                     NonInjectiveProjectionError, DomainExitError,
                     NumericalError, GenericityError, RangeError)
from .geometry import (PlaneCurve, SpaceCurve, ChordArcReport, arc_length,
                       chord_arc_constant, bilipschitz_constant, corner_angle,
                       min_corner_angle, subarc, resample, subdivide_edges,
                       curve_from_json, curve_from_json_dict)
from .forms import (ContactForm, LegendrianVerdict, form_xdy, form_minus_ydx,
                    form_rot, form_poly, form_from_json_dict, BUILTIN_FORMS,
                    line_integral_beta, line_integral_alpha,
                    legendrian_residual, angle_profile, Hamiltonian,
                    hamiltonian_field, flow)
from .lifting import LiftResult, ProjectionBoundsReport, lift, project, \
    projection_bounds_check
from .moves import (DiskChart, IsotopyTrace, CorrectionSquare, mobius_arc,
                    bypass_isotopy, corner_round, correction_field,
                    solve_correction, legendrian_isotopy_lift,
                    region_beta_boundary_integral)
from .invariants import (CrossingRecord, linking_number, gauss_linking,
                         writhe, thurston_bennequin, transverse_pushoff,
                         alpha_edge_values, crossings_to_csv)
from . import gallery

__version__ = "0.1.0"
