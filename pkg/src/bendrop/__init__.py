"""Bending-regularized charged droplets.

Curvature energies on star-shaped surfaces and curves, Riesz equilibrium
measures, relaxed-energy minimization, instability thresholds, mollification
of graph surfaces, and a decay-iteration toolkit, with a CLI harness on top.
"""

from .capacity import (
    ChargeDistribution,
    DiscretizedSet,
    KernelSpec,
    ball_cells,
    circle_panels,
    curve_panels,
    dilate_set,
    disk_cells,
    equilibrium_measure,
    fibonacci_sphere_panels,
    perturbation_bound_check,
    scaling_check,
    surface_panels,
    translate_set,
)
from .curves import CurveShape, curve_c1_norm, curve_measures, random_curve
from .energy import (
    EnergyBreakdown,
    ModelParams,
    evaluate,
    genus_zero_energy_gap,
    params_for_mass,
    threshold_diagnostics,
)
from .errors import (
    BendropError,
    InputError,
    NumericalError,
    ShapeError,
    UsageError,
)
from .io import (
    read_csv,
    read_curve,
    read_field,
    read_json_record,
    read_set,
    read_shape,
    write_csv,
    write_curve,
    write_field,
    write_json_record,
    write_set,
)
from .optimize import (
    HessianAtBall,
    OptimizerConfig,
    ThresholdSweep,
    Trajectory,
    ball_field,
    disk_shape,
    distance_to_round,
    hessian_at_ball,
    minimize,
    project_volume,
    threshold_sweep,
)
from .smoothing import (
    SurfaceMap,
    admissible_epsilon,
    degree_damping,
    identity_map,
    mollify,
    radial_graph,
    rotate_map,
    sobolev2_distance,
    wedge_and_grad_bounds,
)
from .sphere import (
    SphereField,
    SphereGrid,
    area,
    bending_energies,
    c1_norm,
    gauss_bonnet_defect,
    get_grid,
    li_yau_margin,
    random_band_field,
    rotate_field,
    surface_from_field,
    volume,
)
from .toolkit import (
    DecayHypothesis,
    decay_exponent,
    random_decay_audit,
    stability_ratio_harness,
    verify_decay,
)

__version__ = "0.1.0"

__all__ = [
    "BendropError",
    "ChargeDistribution",
    "CurveShape",
    "DecayHypothesis",
    "DiscretizedSet",
    "EnergyBreakdown",
    "HessianAtBall",
    "InputError",
    "KernelSpec",
    "ModelParams",
    "NumericalError",
    "OptimizerConfig",
    "ShapeError",
    "SphereField",
    "SphereGrid",
    "SurfaceMap",
    "ThresholdSweep",
    "Trajectory",
    "UsageError",
    "admissible_epsilon",
    "area",
    "ball_cells",
    "ball_field",
    "bending_energies",
    "c1_norm",
    "circle_panels",
    "curve_c1_norm",
    "curve_measures",
    "curve_panels",
    "decay_exponent",
    "degree_damping",
    "dilate_set",
    "disk_cells",
    "disk_shape",
    "distance_to_round",
    "equilibrium_measure",
    "evaluate",
    "fibonacci_sphere_panels",
    "gauss_bonnet_defect",
    "genus_zero_energy_gap",
    "get_grid",
    "hessian_at_ball",
    "identity_map",
    "li_yau_margin",
    "minimize",
    "mollify",
    "params_for_mass",
    "perturbation_bound_check",
    "project_volume",
    "radial_graph",
    "random_band_field",
    "random_curve",
    "random_decay_audit",
    "read_csv",
    "read_curve",
    "read_field",
    "read_json_record",
    "read_set",
    "read_shape",
    "rotate_field",
    "rotate_map",
    "scaling_check",
    "sobolev2_distance",
    "stability_ratio_harness",
    "surface_from_field",
    "surface_panels",
    "threshold_diagnostics",
    "threshold_sweep",
    "translate_set",
    "verify_decay",
    "volume",
    "wedge_and_grad_bounds",
    "write_csv",
    "write_curve",
    "write_field",
    "write_json_record",
    "write_set",
]
