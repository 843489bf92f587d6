"""Integrable discretizations of sine-Gordon: discrete K-surfaces,
Backlund transformations, and convergence experiments.

The package is organized bottom-up:

    linalg2    stacked 2x2 complex / su(2) helpers
    goursat    lattice Goursat problems for two edge fields
    sinegordon naive and Hirota schemes, Backlund extension, compatibility
    frames     Lax transition matrices, frames, Sym formula
    surfaces   K-surface meshes, validation, Backlund towers, OBJ export
    ndsys      general d-dimensional compatible lattice systems
    harness    convergence sweeps on nested lattices
    cli        the `ksurf` command
"""

from .goursat import (
    BlowUpError,
    CompatibilityError,
    EdgeField2,
    GoursatData2,
    LatticeDomain2,
    Rhs2,
    delta_x,
    delta_y,
    discrete_ck_norm,
    load_field_csv,
    nested_levels,
    save_field_csv,
    solve_goursat_2d,
    sup_error,
)
from .sinegordon import (
    BacklundParam,
    LayeredField3,
    PhiField,
    Rhs3,
    SchemeKind,
    backlund_rhs_continuous,
    backlund_rhs_discrete,
    check_compatibility_3d,
    continuous_rhs,
    hirota_backlund_system,
    hirota_rhs,
    hirota_system,
    load_backlund_chain,
    naive_backlund_system,
    naive_rhs,
    naive_system,
    reconstruct_phi,
    solve_goursat_3d,
    system_for,
)
from .frames import (
    FrameField,
    FrameSample,
    ZeroCurvatureError,
    backlund_W,
    lax_U_cont,
    lax_U_disc,
    lax_V_cont,
    lax_V_disc,
    lax_dlambda,
    propagate_frame,
    sym_point,
    transform_frame,
    zero_curvature_residual,
)
from .surfaces import (
    KSurfaceReport,
    SurfaceMesh,
    associated_family,
    backlund_surface,
    backlund_two_route_residual,
    build_surface,
    ell,
    export_obj,
    load_obj_points,
    validate_k_surface,
)
from .ndsys import (
    StateND,
    SystemSpecND,
    check_dependency,
    check_identity,
    sine_gordon_2d_spec,
    sine_gordon_3d_spec,
    solve_goursat_nd,
)
from .harness import (
    ConvergenceReport,
    SweepConfig,
    demo_data,
    emit_report,
    fit_slope,
    load_report,
    run_sweep,
    zero_data,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
