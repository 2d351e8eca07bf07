"""Finite-element toolkit for activator-inhibitor reaction-diffusion
systems on disk domains: meshing, P1 assembly, IMEX/explicit time
stepping, phase-plane analysis, radial post-processing, steady-state
diagnostics, and unit scaling.
"""

from .analysis import (
    DecayFit,
    attraction_test,
    decay_rate_fit,
    h1_seminorm,
    l2_norm,
    poincare_constant,
    solve_steady_newton,
    summary_report,
    time_derivative_norms,
)
from .assembly import (
    SourceField,
    annulus_source,
    apply_dirichlet,
    assemble_boundary_mass,
    assemble_mass,
    assemble_stiffness,
    project_source,
)
from .config import ExperimentSpec, dump_config, parse_config
from .errors import (
    ConfigError,
    GmrdError,
    MeshError,
    MeshResourceError,
    SimulationError,
    SolverError,
)
from .kinetics import (
    FixedPoint,
    KineticsParams,
    classify_fixed_point,
    fixed_points,
    nullclines,
    reaction_jacobian,
    reaction_rates,
    regime_type,
)
from .mesh import (
    Mesh,
    MeshQuality,
    build_disk_mesh,
    estimate_disk_nodes,
    load_mesh,
    mesh_quality,
    save_mesh,
)
from .presets import PRESETS, Preset, get_preset
from .radial import (
    RadialProfile,
    asymmetry_index,
    radial_phase_curve,
    radial_profile,
    ring_structure,
    wavefront_radius,
)
from .scaling import PhysicalParams, dimensionalize, nondimensionalize
from .simulate import (
    Schedule,
    SimState,
    Trajectory,
    default_snapshots,
    detect_steady,
    init_state,
    run,
    step_explicit,
    step_imex,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
