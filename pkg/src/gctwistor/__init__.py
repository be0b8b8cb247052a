"""Exact verification kernel for generalized complex structures and twistor spaces.

The package is organized in four layers:

* :mod:`gctwistor.gclinalg` -- the finite-dimensional algebra of V + V*
  with its split-signature pairing: structures, transforms, orthonormal
  bases, orientations and the fibre geometry of the space of compatible
  complex structures;
* :mod:`gctwistor.courant` -- sections of TM + T*M over a chart, the
  Courant bracket and the Nijenhuis tensor of structure fields;
* :mod:`gctwistor.twistor` -- connections, curvature, horizontal lifts,
  the two twistor structures and the closed-form Nijenhuis evaluator,
  plus :mod:`gctwistor.oracle`, the direct chart computation it is
  checked against;
* :mod:`gctwistor.harness` -- scenario-driven suites behind the
  ``gctwistor verify`` command line.
"""

from .gclinalg import (
    Endo,
    GCStructure,
    GElement,
    OrthonormalBasis,
    Scalar,
    b_transform,
    beta_transform,
    commute_check,
    dim2_basis_orientation,
    direct_sum,
    fiber_kahler_structure,
    from_complex,
    from_symplectic,
    gl_action,
    hyperboloid_point,
    neutral_pairing,
    orientation_sign,
    projection_nondegeneracy_check,
    random_orthonormal_basis,
    reference_basis,
    skew_decompose,
    skew_frames,
    skew_generators,
    structure_orientation,
    vertical_complex_action,
    vertical_space_basis,
)
from .courant import (
    ChartPoint,
    GACField,
    Jet1,
    JetSection,
    TwoFormField,
    b_automorphism_defect,
    chart_point,
    constant_field,
    courant_bracket,
    field_from_coefficients,
    integrability_scan,
    lie_bracket,
    nijenhuis,
    scan_report_to_json,
    section_from_coefficients,
    two_form_field,
)
from .twistor import (
    Connection,
    CurvatureValue,
    MuForm,
    TwistorPoint,
    TwistorTangent,
    ahs_identity_check,
    connection,
    curvature,
    curvature_from_mu,
    flat_connection,
    horizontal_lift,
    hybrid_nijenhuis_horizontal,
    mu_forced_zero_check,
    nijenhuis_closed_form,
    nijenhuis_coform,
    nijenhuis_horizontal,
    nijenhuis_mixed,
    nijenhuis_vertical,
    twistor_J,
    twistor_pairing,
)
from .oracle import (
    OracleSample,
    TwistorChart,
    lift_bracket_curvature_check,
    oracle_compare_nijenhuis,
    seeded_oracle_samples,
)
from .harness import (
    PRESETS,
    Report,
    Scenario,
    emit_report,
    load_scenario,
    run_courant_examples,
    run_integrability_suite,
    run_linalg_suite,
    run_oracle,
    run_scenario,
)

__all__ = [name for name in dir() if not name.startswith("_")]
