"""Command-line harness: evaluations, solves, optimizations and sweeps.

Every subcommand writes its machine-readable outputs (JSON records, CSV
tables, shape files) into an output directory plus a ``manifest.json``
capturing the resolved parameters, package and dependency versions and the
seed, so a run can be reproduced exactly.  With ``--threads 1`` all linear
algebra and kernel pools are pinned to one thread and reruns are
bit-identical.  Errors exit nonzero with a one-line JSON record on stderr
carrying the error category.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import _accel
from .axisym import bump_pair
from .capacity import (
    KernelSpec,
    circle_panels,
    curve_panels,
    equilibrium_measure,
    fibonacci_sphere_panels,
    surface_panels,
)
from .curves import random_curve
from .energy import ModelParams, evaluate
from .errors import BendropError, InputError, UsageError
from .io import (
    read_json_record,
    read_set,
    read_shape,
    write_csv,
    write_curve,
    write_field,
    write_json_record,
)
from .optimize import (
    OptimizerConfig,
    ball_field,
    disk_shape,
    hessian_at_ball,
    minimize,
    project_volume,
    threshold_sweep,
)
from .smoothing import (
    degree_damping,
    mollify,
    radial_graph,
    sobolev2_distance,
    wedge_and_grad_bounds,
)
from .sphere import SphereField, get_grid, random_band_field, surface_from_field
from .toolkit import decay_exponent, random_decay_audit

__all__ = ["main"]

_THREAD_CONTROLLER = None


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("bendrop")
    except Exception:
        return "unknown"


def _limit_threads(n: int | None) -> None:
    """Pin every compute pool to n threads; n=1 makes runs bit-identical."""
    global _THREAD_CONTROLLER
    if n is None:
        return
    if n < 1:
        raise UsageError(f"--threads must be at least 1, got {n}")
    os.environ["OMP_NUM_THREADS"] = str(n)
    try:
        import numba

        numba.set_num_threads(n)
    except Exception:
        pass
    try:
        import threadpoolctl

        _THREAD_CONTROLLER = threadpoolctl.threadpool_limits(limits=n)
    except Exception:
        pass


def _out_dir(args, command: str) -> str:
    if args.out:
        path = args.out
    else:
        root = os.environ.get("BENDROP_OUT_ROOT", "bendrop-out")
        path = os.path.join(root, command)
    os.makedirs(path, exist_ok=True)
    return path


def _write_manifest(out: str, command: str, spec: dict, args) -> None:
    import scipy

    record = {
        "command": command,
        "package": "bendrop",
        "package_version": _package_version(),
        "numpy_version": np.__version__,
        "scipy_version": scipy.__version__,
        "accel_lane": "numba" if _accel.using_numba() else "numpy",
        "threads": args.threads,
        "seed": getattr(args, "seed", None),
        "spec": spec,
    }
    write_json_record(os.path.join(out, "manifest.json"), record)


def _default_alpha(dimension: int) -> float:
    return 2.0 if dimension == 3 else 1.5


def _params_from_args(args, dimension: int) -> ModelParams:
    kwargs = {
        "dimension": dimension,
        "alpha": args.alpha if args.alpha is not None else _default_alpha(dimension),
        "eta": args.eta,
        "charge": args.charge,
        "lambda_perimeter": args.lambda_perimeter,
    }
    if args.penalty is not None:
        kwargs["penalty"] = args.penalty
    return ModelParams(**kwargs)


def _params_dict(params: ModelParams) -> dict:
    return dataclasses.asdict(params)


def _float_list(text: str, what: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad {what} list: {text!r}") from None
    if not vals:
        raise UsageError(f"empty {what} list")
    return vals


# -- energy ---------------------------------------------------------------


def cmd_energy(args) -> int:
    shape = read_shape(args.shape_file)
    dimension = 3 if isinstance(shape, SphereField) else 2
    params = _params_from_args(args, dimension)
    grid = None
    if dimension == 3 and args.band_limit is not None:
        grid = get_grid(args.band_limit)
    breakdown = evaluate(shape, params, grid=grid)
    out = _out_dir(args, "energy")
    record = {"params": _params_dict(params), "breakdown": breakdown.as_dict()}
    write_json_record(os.path.join(out, "breakdown.json"), record)
    _write_manifest(
        out, "energy", {"shape_file": args.shape_file, **_params_dict(params)}, args
    )
    b = breakdown
    print(f"dimension {b.dimension}  panels {b.n_panels}")
    print(f"perimeter        {b.perimeter:.12g}")
    print(f"willmore         {b.willmore:.12g}")
    print(f"capacitary       {b.capacitary:.12g}")
    print(f"volume           {b.volume:.12g}")
    print(f"total_model      {b.total_model:.12g}")
    print(f"total_relaxed    {b.total_relaxed:.12g}")
    print(f"wrote {out}/breakdown.json")
    return 0


# -- capacity -------------------------------------------------------------


def _load_set_for_capacity(args):
    name = args.set_file
    if name == "unit-sphere":
        return fibonacci_sphere_panels(args.panels or 2048), 3
    if name == "unit-circle":
        return circle_panels(args.panels or 1024), 2
    try:
        obj = read_set(name)
        return obj, obj.dimension
    except InputError:
        pass
    shape = read_shape(name)
    if isinstance(shape, SphereField):
        grid = get_grid(args.band_limit) if args.band_limit is not None else None
        geom = surface_from_field(shape, grid=grid)
        return surface_panels(geom), 3
    return curve_panels(shape, args.panels), 2


def cmd_capacity(args) -> int:
    dset, dimension = _load_set_for_capacity(args)
    alpha = args.alpha if args.alpha is not None else _default_alpha(dimension)
    spec = KernelSpec(dimension=dimension, alpha=alpha, eta=args.eta)
    mu = equilibrium_measure(dset, spec)
    out = _out_dir(args, "capacity")
    record = {
        "dimension": dimension,
        "alpha": alpha,
        "eta": args.eta,
        "n_elements": int(dset.n_elements),
        "value": mu.value,
        "riesz_part": mu.riesz_part,
        "eta_part": mu.eta_part,
        "residual": mu.residual,
        "iterations": mu.iterations,
        "total_mass": mu.total_mass(),
    }
    write_json_record(os.path.join(out, "capacity.json"), record)
    _write_manifest(
        out,
        "capacity",
        {
            "set_file": args.set_file,
            "panels": args.panels,
            "alpha": alpha,
            "eta": args.eta,
        },
        args,
    )
    print(
        f"interaction energy {mu.value:.12g} over {dset.n_elements} elements "
        f"(riesz {mu.riesz_part:.12g}, eta part {mu.eta_part:.12g}, "
        f"{mu.iterations} iterations)"
    )
    print(f"wrote {out}/capacity.json")
    return 0


# -- minimize -------------------------------------------------------------

_MINIMIZE_KEYS = {
    "name",
    "dimension",
    "alpha",
    "eta",
    "charge",
    "lambda_perimeter",
    "penalty",
    "target_volume",
    "quadrature_factor",
    "band_limit",
    "degree",
    "n_samples",
    "initial",
    "amplitude",
    "degree_max",
    "seed",
    "max_iterations",
    "gradient_step",
    "initial_step",
    "gradient_tolerance",
    "energy_tolerance",
    "volume_mode",
    "freeze_translations",
    "rel_residual",
}


def _initial_shape(cfg: dict, params: ModelParams, seed: int | None):
    kind = cfg.get("initial", "random")
    target = params.effective_target()
    if params.dimension == 3:
        band = int(cfg.get("band_limit", 8))
        if kind == "ball":
            return ball_field(target, band)
        if kind == "random":
            rng = np.random.default_rng(seed)
            grid = get_grid(band)
            field = random_band_field(
                grid,
                rng,
                degree_max=int(cfg.get("degree_max", max(2, band // 2))),
                amplitude=float(cfg.get("amplitude", 0.2)),
                norm="c1",
            )
            return project_volume(field, target)
        return read_shape(kind)
    degree = int(cfg.get("degree", 8))
    n_samples = int(cfg.get("n_samples", 512))
    if kind == "ball":
        return disk_shape(target, degree=degree, n_samples=n_samples)
    if kind == "random":
        rng = np.random.default_rng(seed)
        shape = random_curve(
            rng,
            degree_max=int(cfg.get("degree_max", max(2, degree // 2))),
            amplitude=float(cfg.get("amplitude", 0.2)),
            degree=degree,
            n_samples=n_samples,
            norm="c1",
        )
        return project_volume(shape, target)
    return read_shape(kind)


def cmd_minimize(args) -> int:
    cfg = read_json_record(args.config_file)
    unknown = set(cfg) - _MINIMIZE_KEYS
    if unknown:
        raise UsageError(
            f"unknown config keys {sorted(unknown)}; allowed: "
            f"{sorted(_MINIMIZE_KEYS)}"
        )
    dimension = int(cfg.get("dimension", 3))
    seed = args.seed if args.seed is not None else cfg.get("seed")
    param_kwargs = {
        "dimension": dimension,
        "alpha": cfg.get("alpha", _default_alpha(dimension)),
        "eta": cfg.get("eta", 0.0),
        "charge": cfg.get("charge", 0.0),
        "lambda_perimeter": cfg.get("lambda_perimeter", 1.0),
    }
    for key in ("penalty", "target_volume", "quadrature_factor"):
        if key in cfg:
            param_kwargs[key] = cfg[key]
    params = ModelParams(**param_kwargs)
    opt_kwargs = {"params": params, "seed": seed}
    for key in (
        "max_iterations",
        "gradient_step",
        "initial_step",
        "gradient_tolerance",
        "energy_tolerance",
        "volume_mode",
        "freeze_translations",
        "rel_residual",
    ):
        if key in cfg:
            opt_kwargs[key] = cfg[key]
    config = OptimizerConfig(**opt_kwargs)
    initial = _initial_shape(cfg, params, seed)

    final, traj = minimize(initial, config)
    out = _out_dir(args, "minimize")
    rows = [
        [
            r.iteration,
            r.energy,
            r.gradient_norm,
            r.step,
            r.backtracks,
            r.volume,
            r.max_deformation,
        ]
        for r in traj.records
    ]
    write_csv(
        os.path.join(out, "trajectory.csv"),
        "trajectory v1",
        [
            "iteration",
            "energy",
            "gradient_norm",
            "step",
            "backtracks",
            "volume",
            "max_deformation",
        ],
        rows,
    )
    if isinstance(final, SphereField):
        shape_path = os.path.join(out, "final.field")
        write_field(shape_path, final)
    else:
        shape_path = os.path.join(out, "final.curve")
        write_curve(shape_path, final)
    last = traj.records[-1]
    result = {
        "name": cfg.get("name", "minimize"),
        "status": traj.status,
        "seed": seed,
        "iterations": last.iteration,
        "n_evaluations": traj.n_evaluations,
        "distance_to_round": traj.distance_to_round,
        "final_energy": last.energy,
        "final_breakdown": last.breakdown.as_dict(),
        "params": _params_dict(params),
    }
    write_json_record(os.path.join(out, "result.json"), result)
    _write_manifest(out, "minimize", {"config_file": args.config_file, **cfg}, args)
    print(
        f"{result['name']}: {traj.status} after {last.iteration} iterations, "
        f"energy {last.energy:.12g}, distance to round {traj.distance_to_round:.3e}"
    )
    print(f"wrote {out}/trajectory.csv, {os.path.basename(shape_path)}, result.json")
    return 0


# -- sweep ----------------------------------------------------------------


def cmd_sweep(args) -> int:
    dimension = args.dimension
    alpha = args.alpha if args.alpha is not None else _default_alpha(dimension)
    masses = _float_list(
        args.masses or ("0.5,0.75,1.0,1.5,2.25" if dimension == 3 else
                        "1.5,2.25,3.14159265358979312,4.5,6.5"),
        "mass",
    )
    params = ModelParams(
        dimension=dimension,
        alpha=alpha,
        eta=args.eta,
        lambda_perimeter=args.lambda_perimeter,
    )
    sweep = threshold_sweep(params, masses, max_degree=args.max_degree)
    out = _out_dir(args, "sweep")
    write_csv(
        os.path.join(out, "sweep.csv"),
        "threshold-sweep v1",
        ["mass", "critical_charge", "critical_degree"],
        [
            [m, q, int(k)]
            for m, q, k in zip(
                sweep.masses, sweep.critical_charges, sweep.critical_degrees
            )
        ],
    )
    record = {
        "dimension": dimension,
        "alpha": alpha,
        "eta": args.eta,
        "lambda_perimeter": args.lambda_perimeter,
        "masses": list(map(float, sweep.masses)),
        "critical_charges": list(map(float, sweep.critical_charges)),
        "slope": sweep.slope,
        "intercept": sweep.intercept,
    }
    write_json_record(os.path.join(out, "sweep.json"), record)
    _write_manifest(
        out,
        "sweep",
        {
            "dimension": dimension,
            "alpha": alpha,
            "eta": args.eta,
            "lambda_perimeter": args.lambda_perimeter,
            "masses": masses,
            "max_degree": args.max_degree,
        },
        args,
    )
    print(
        f"threshold slope d(log Q*)/d(log m) = {sweep.slope:.8f} over "
        f"{len(masses)} masses (alpha {alpha}, {dimension}D)"
    )
    print(f"wrote {out}/sweep.csv, sweep.json")
    return 0


# -- hessian --------------------------------------------------------------


def cmd_hessian(args) -> int:
    dimension = args.dimension
    params = _params_from_args(args, dimension)
    hess = hessian_at_ball(params, max_degree=args.max_degree, step=args.step)
    eig = hess.eigenvalues(args.charge)
    out = _out_dir(args, "hessian")
    rows = [
        [
            int(d),
            int(o),
            g,
            c,
            e,
            hg,
            hc,
        ]
        for d, o, g, c, e, hg, hc in zip(
            hess.degrees,
            hess.orders,
            hess.geometric,
            hess.capacitary,
            eig,
            hess.halving_gap_geometric,
            hess.halving_gap_capacitary,
        )
    ]
    write_csv(
        os.path.join(out, "hessian.csv"),
        "hessian v1",
        [
            "degree",
            "order",
            "geometric",
            "capacitary",
            "eigenvalue",
            "halving_gap_geometric",
            "halving_gap_capacitary",
        ],
        rows,
    )
    try:
        q_star = hess.critical_charge()
        note = None
    except BendropError as exc:
        q_star = None
        note = str(exc)
    record = {
        "dimension": dimension,
        "params": _params_dict(params),
        "charge_evaluated": args.charge,
        "step": hess.step,
        "critical_charge": q_star,
        "critical_degree": None if q_star is None else int(hess.critical_degree()),
        "warnings": list(hess.warnings),
        "note": note,
    }
    write_json_record(os.path.join(out, "hessian.json"), record)
    _write_manifest(
        out,
        "hessian",
        {
            "dimension": dimension,
            "max_degree": args.max_degree,
            "step": args.step,
            **_params_dict(params),
        },
        args,
    )
    if q_star is None:
        print(f"critical charge unavailable: {note}")
    else:
        print(
            f"critical charge {q_star:.8f} (first unstable degree "
            f"{record['critical_degree']})"
        )
    print(f"wrote {out}/hessian.csv, hessian.json")
    return 0


# -- smooth ---------------------------------------------------------------


def cmd_smooth(args) -> int:
    shape = read_shape(args.shape_file)
    if not isinstance(shape, SphereField):
        raise UsageError("smooth expects a scalar field file (3D graph shapes)")
    surface = radial_graph(shape)
    smoothed = mollify(surface, args.epsilon, n_quad=args.quad)
    wedge0, grad0 = wedge_and_grad_bounds(surface)
    wedge1, grad1 = wedge_and_grad_bounds(smoothed)
    degrees, ratios = degree_damping(surface, smoothed)
    out = _out_dir(args, "smooth")
    record = {
        "epsilon": args.epsilon,
        "n_quad": args.quad,
        "conformal_deviation": surface.conformal_deviation(),
        "input_min_wedge": wedge0,
        "input_max_grad": grad0,
        "output_min_wedge": wedge1,
        "output_max_grad": grad1,
        "bounds_hold": bool(wedge1 >= 0.125 and grad1 <= 2.0),
        "sobolev2_distance": sobolev2_distance(surface, smoothed),
    }
    write_json_record(os.path.join(out, "smooth.json"), record)
    write_csv(
        os.path.join(out, "damping.csv"),
        "degree-damping v1",
        ["degree", "ratio"],
        [[int(d), r] for d, r in zip(degrees, ratios)],
    )
    triples = smoothed.to_node_triples()
    write_csv(
        os.path.join(out, "map.csv"),
        "surface-map v1",
        ["node", "x", "y", "z"],
        [[i, *row] for i, row in enumerate(triples)],
    )
    _write_manifest(
        out,
        "smooth",
        {
            "shape_file": args.shape_file,
            "epsilon": args.epsilon,
            "n_quad": args.quad,
        },
        args,
    )
    print(
        f"wedge {wedge0:.6f} -> {wedge1:.6f} (floor 0.125), gradient "
        f"{grad0:.6f} -> {grad1:.6f} (ceiling 2)"
    )
    print(f"wrote {out}/smooth.json, damping.csv, map.csv")
    return 0


# -- decay ----------------------------------------------------------------


def cmd_decay(args) -> int:
    beta, constant = decay_exponent(args.theta, args.gamma, args.delta)
    audit = random_decay_audit(args.audit, seed=args.seed or 0)
    out = _out_dir(args, "decay")
    record = {
        "theta": args.theta,
        "gamma": args.gamma,
        "delta": args.delta,
        "beta": beta,
        "constant": constant,
        "rate_constraint_ok": bool(args.gamma < args.theta**beta),
        "exponent_constraint_ok": bool(beta < args.delta),
        "audit": audit,
    }
    write_json_record(os.path.join(out, "decay.json"), record)
    _write_manifest(
        out,
        "decay",
        {
            "theta": args.theta,
            "gamma": args.gamma,
            "delta": args.delta,
            "audit": args.audit,
        },
        args,
    )
    if audit["all_hold"]:
        verdict = "all hold"
    else:
        verdict = f"{audit['n_failures']} failures"
    print(
        f"beta {beta:.8f}, constant {constant:g}, audit "
        f"{audit['n_instances']} instances -> {verdict}"
    )
    print(f"wrote {out}/decay.json")
    return 0


# -- compare-reg ----------------------------------------------------------


def cmd_compare_reg(args) -> int:
    params = _params_from_args(args, 3)
    rhos = _float_list(args.rhos, "rho")
    spec = KernelSpec(dimension=3, alpha=params.alpha, eta=params.eta)
    penalty = params.effective_penalty()
    q2 = params.charge**2
    scale = 1.25
    rows = []
    interaction_drops = []
    for rho in rhos:
        sphere_set, bump_set, info = bump_pair(rho)
        sphere_m = info["sphere_measures"]
        bump_m = info["bump_measures"]
        d_willmore = bump_m["willmore"] - sphere_m["willmore"]
        d_volume = bump_m["volume"] - sphere_m["volume"]
        i_sphere = equilibrium_measure(sphere_set, spec).value
        i_bump = equilibrium_measure(bump_set, spec).value
        d_interaction = i_sphere - i_bump
        net = d_willmore + penalty * abs(d_volume) - q2 * d_interaction
        net_scaled = (
            d_willmore
            + penalty * abs(d_volume) * scale**3
            - q2 * d_interaction * scale ** (params.alpha - 3.0)
        )
        interaction_drops.append(d_interaction)
        rows.append(
            [rho, d_willmore, d_interaction, q2 * d_interaction, d_volume, net,
             net_scaled]
        )
    drops = np.array(interaction_drops)
    slope = float(
        np.polyfit(np.log(np.array(rhos)), np.log(np.maximum(drops, 1e-300)), 1)[0]
    )
    out = _out_dir(args, "compare-reg")
    write_csv(
        os.path.join(out, "compare_reg.csv"),
        "regularization-compare v1",
        [
            "rho",
            "delta_willmore",
            "delta_interaction",
            "q2_delta_interaction",
            "delta_volume",
            "net_change",
            "net_change_rescaled",
        ],
        rows,
    )
    record = {
        "alpha": params.alpha,
        "charge": params.charge,
        "eta": params.eta,
        "penalty": penalty,
        "rhos": rhos,
        "interaction_slope": slope,
        "interaction_slope_floor": (3.0 - params.alpha) - 0.3,
        "min_delta_willmore": float(min(r[1] for r in rows)),
        "all_net_positive": bool(all(r[5] > 0 for r in rows)),
        "all_net_rescaled_positive": bool(all(r[6] > 0 for r in rows)),
    }
    write_json_record(os.path.join(out, "compare_reg.json"), record)
    _write_manifest(
        out,
        "compare-reg",
        {
            "alpha": params.alpha,
            "charge": params.charge,
            "eta": params.eta,
            "rhos": rhos,
        },
        args,
    )
    print(
        f"bending increase stays >= {record['min_delta_willmore']:.4f} while "
        f"capacitary gain falls with slope {slope:.3f} "
        f"(floor {record['interaction_slope_floor']:.3f})"
    )
    print(f"wrote {out}/compare_reg.csv, compare_reg.json")
    return 0


# -- parser ---------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bendrop",
        description=(
            "Charged-drop bending/capacity energies: evaluate, solve, "
            "optimize and sweep at desk scale."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=None,
                        help="Riesz order (default 2.0 in 3D, 1.5 in 2D)")
    common.add_argument("--eta", type=float, default=0.0,
                        help="capacity regularization strength")
    common.add_argument("--charge", type=float, default=0.0, help="total charge Q")
    common.add_argument("--lambda-perimeter", type=float, default=1.0,
                        dest="lambda_perimeter", help="perimeter weight")
    common.add_argument("--penalty", type=float, default=None,
                        help="volume penalty strength (default max(10 Q^2, 1))")
    common.add_argument("--band-limit", type=int, default=None, dest="band_limit",
                        help="evaluation band limit override (3D)")
    common.add_argument("--panels", type=int, default=None,
                        help="panel count for built-in or curve discretizations")
    common.add_argument("--seed", type=int, default=None, help="RNG seed")
    common.add_argument("--threads", type=int, default=None,
                        help="thread cap; 1 gives bit-identical reruns")
    common.add_argument("--out", default=None,
                        help="output directory (default $BENDROP_OUT_ROOT/<cmd>)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", parents=[common],
                       help="evaluate the energy breakdown of a shape file")
    p.add_argument("shape_file")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("capacity", parents=[common],
                       help="solve the equilibrium measure on a set or shape")
    p.add_argument("set_file",
                   help="set/shape file, or 'unit-sphere' / 'unit-circle'")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("minimize", parents=[common],
                       help="descend the relaxed energy per a JSON config")
    p.add_argument("config_file")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("sweep", parents=[common],
                       help="instability threshold versus mass, with fitted slope")
    p.add_argument("--dimension", type=int, choices=(2, 3), default=3)
    p.add_argument("--masses", default=None, help="comma-separated mass list")
    p.add_argument("--max-degree", type=int, default=6, dest="max_degree")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("hessian", parents=[common],
                       help="second differences of the projected energy at the ball")
    p.add_argument("--dimension", type=int, choices=(2, 3), default=3)
    p.add_argument("--max-degree", type=int, default=8, dest="max_degree")
    p.add_argument("--step", type=float, default=1e-3)
    p.set_defaults(func=cmd_hessian)

    p = sub.add_parser("smooth", parents=[common],
                       help="mollify the graph surface of a field file")
    p.add_argument("shape_file")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--quad", type=int, default=8)
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("decay", parents=[common],
                       help="decay exponent/constant plus a randomized audit")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--audit", type=int, default=10_000,
                   help="number of random audit instances")
    p.set_defaults(func=cmd_decay)

    p = sub.add_parser("compare-reg", parents=[common],
                       help="bump-perturbation bending cost versus capacitary gain")
    p.add_argument("--rhos", default="0.05,0.1,0.2",
                   help="comma-separated bump scales")
    p.set_defaults(func=cmd_compare_reg)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _limit_threads(args.threads)
        return args.func(args)
    except BendropError as exc:
        print(
            json.dumps({"error": exc.category, "message": str(exc)}),
            file=sys.stderr,
        )
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - defensive catch-all
        print(
            json.dumps(
                {"error": "internal", "message": f"{type(exc).__name__}: {exc}"}
            ),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
