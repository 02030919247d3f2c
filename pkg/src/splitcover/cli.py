"""Command line interface: realize, embed, monodromy, verify-tower.

All inputs and outputs are JSON. Exit codes: 0 success, 2 verification
failure (including a failed verdict in a report), 3 numerical instability,
4 input or schema errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .approx import DegreeExhaustedError
from .embedding import NoSolutionError
from .monodromy import (
    FiberMatchError,
    InstabilityError,
    NewtonDivergenceError,
    StepUnderflowError,
    TrackingConfig,
)
from .permgroup import ClosureLimitError, PermGroup, Permutation
from .pipeline import (
    IrreducibilityFailureError,
    VerificationError,
    realize_group,
    run_monodromy,
    run_verify_tower,
    solve_semitop_embedding,
)
from .wpoly import (
    BaseSpace,
    GeometryError,
    MultipleRootError,
    RootFindingError,
    WeierstrassPoly,
)

EXIT_OK = 0
EXIT_VERIFICATION = 2
EXIT_NUMERICAL = 3
EXIT_INPUT = 4

_NUMERICAL_ERRORS = (StepUnderflowError, NewtonDivergenceError, InstabilityError,
                     FiberMatchError, RootFindingError, MultipleRootError,
                     DegreeExhaustedError)


class InputError(RuntimeError):
    pass


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError as exc:
        raise InputError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc


def _schema(path: str, data, key: str):
    if key not in data:
        raise InputError(f"{path}: missing field '{key}'")
    return data[key]


def _load_group(path: str) -> PermGroup:
    data = _load_json(path)
    try:
        return PermGroup.from_json(
            {"degree": _schema(path, data, "degree"),
             "generators": _schema(path, data, "generators")})
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: bad group: {exc}") from exc


def _load_polynomial(path: str) -> tuple[WeierstrassPoly, Optional[BaseSpace]]:
    """Accept either a bare polynomial or a combined realization artifact."""
    data = _load_json(path)
    space = None
    if "polynomial" in data:
        if "base_space" in data:
            space = _parse_space(path, data["base_space"])
        data = data["polynomial"]
    try:
        poly = WeierstrassPoly.from_json(
            {"degree": _schema(path, data, "degree"),
             "coeffs": _schema(path, data, "coeffs")})
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: bad polynomial: {exc}") from exc
    return poly, space


def _parse_space(path: str, data) -> BaseSpace:
    try:
        return BaseSpace.from_json(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: bad base space: {exc}") from exc


def _load_space(path: Optional[str]) -> Optional[BaseSpace]:
    if path is None:
        return None
    return _parse_space(path, _load_json(path))


def _load_images(path: str, label: str) -> tuple[Permutation, ...]:
    data = _load_json(path)
    if isinstance(data, dict):
        data = _schema(path, data, "gen_images")
    try:
        return tuple(Permutation.from_json(p) for p in data)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: bad {label} images: {exc}") from exc


def _load_run_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: config must be a JSON object")
    return data


def _tracking_from(config: dict) -> TrackingConfig:
    params = config.get("tracking", {})
    try:
        return TrackingConfig(**params)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad tracking config: {exc}") from exc


def _emit(payload: dict, output: Optional[str]):
    text = json.dumps(payload, indent=2, sort_keys=False)
    if output and output != "-":
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _pipeline_options(args, config: dict) -> dict:
    opts = {}
    grid = args.grid if args.grid is not None else config.get("grid_density")
    if grid is not None:
        opts["grid_density"] = int(grid)
    degree = (args.max_degree if args.max_degree is not None
              else config.get("max_degree"))
    if degree is not None:
        opts["max_degree"] = int(degree)
    if "conservatism" in config:
        opts["conservatism"] = float(config["conservatism"])
    return opts


def _cmd_realize(args) -> int:
    config = _load_run_config(args.config)
    group = _load_group(args.group)
    space = _load_space(args.base_space)
    opts = _pipeline_options(args, config)
    if "denominator_bound" in config:
        opts["denominator_bound"] = int(config["denominator_bound"])
    poly, report = realize_group(group, space, tracking=_tracking_from(config),
                                 **opts)
    if args.seed is not None:
        report.inputs["seed"] = args.seed
    _emit({"schema_version": report.schema_version,
           "polynomial": poly.to_json(),
           "base_space": BaseSpace.from_json(report.inputs["base_space"]).to_json(),
           "report": report.to_json()}, args.output)
    return EXIT_OK


def _cmd_embed(args) -> int:
    config = _load_run_config(args.config)
    poly, embedded_space = _load_polynomial(args.polynomial)
    space = _load_space(args.base_space) or embedded_space
    if space is None:
        raise InputError("a base space is required (flag --base-space or a "
                         "combined polynomial artifact)")
    group = _load_group(args.group)
    phi_images = _load_images(args.phi, "phi")
    opts = _pipeline_options(args, config)
    out_poly, report = solve_semitop_embedding(
        poly, space, group, phi_images,
        allow_rank_extension=args.allow_rank_extension,
        tracking=_tracking_from(config), **opts)
    if args.seed is not None:
        report.inputs["seed"] = args.seed
    _emit({"schema_version": report.schema_version,
           "polynomial": out_poly.to_json(),
           "base_space": report.artifacts["extended_base_space"],
           "report": report.to_json()}, args.output)
    return EXIT_OK


def _cmd_monodromy(args) -> int:
    config = _load_run_config(args.config)
    poly, embedded_space = _load_polynomial(args.polynomial)
    space = _load_space(args.base_space) or embedded_space
    if space is None:
        raise InputError("a base space is required")
    report = run_monodromy(poly, space, _tracking_from(config))
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.all_passed() else EXIT_VERIFICATION


def _cmd_verify_tower(args) -> int:
    config = _load_run_config(args.config)
    h_poly, h_space = _load_polynomial(args.h_polynomial)
    g_poly, g_space = _load_polynomial(args.g_polynomial)
    space = _load_space(args.base_space) or h_space or g_space
    if space is None:
        raise InputError("a base space is required")
    group = _load_group(args.group)
    phi_images = _load_images(args.phi, "phi")
    psi_images = _load_images(args.psi, "psi")
    report = run_verify_tower(h_poly, g_poly, space, group, phi_images,
                              psi_images, _tracking_from(config))
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.all_passed() else EXIT_VERIFICATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitcover",
        description="Deck groups, embedding problems, and Weierstrass "
                    "polynomial realizations over a disc with holes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", help="write the JSON result here "
                                              "instead of stdout")
        p.add_argument("--config", help="JSON file with tracking and fitting "
                                        "parameters")
        p.add_argument("--seed", type=int, help="recorded in the report; all "
                                                "pipelines are deterministic")
        p.add_argument("--grid", type=int, help="approximation grid density")
        p.add_argument("--max-degree", type=int,
                       help="degree cap for the rational polynomial fit")

    p = sub.add_parser("realize", help="realize a finite group as a deck group")
    p.add_argument("group", help="PermGroup JSON file")
    p.add_argument("--base-space", help="BaseSpace JSON file (default layout "
                                        "if omitted)")
    common(p)
    p.set_defaults(func=_cmd_realize)

    p = sub.add_parser("embed", help="solve a semi-topological embedding problem")
    p.add_argument("polynomial", help="base polynomial JSON (bare or combined)")
    p.add_argument("--base-space", help="BaseSpace JSON file")
    p.add_argument("--group", required=True, help="the covering group H (JSON)")
    p.add_argument("--phi", required=True,
                   help="generator images of the surjection onto the deck "
                        "group of the base polynomial (JSON)")
    p.add_argument("--allow-rank-extension", default=True,
                   action=argparse.BooleanOptionalAction,
                   help="append base-space holes when no preimage assignment "
                        "generates H")
    common(p)
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("monodromy", help="track a polynomial's monodromy")
    p.add_argument("polynomial", help="polynomial JSON (bare or combined)")
    p.add_argument("--base-space", help="BaseSpace JSON file")
    common(p)
    p.set_defaults(func=_cmd_monodromy)

    p = sub.add_parser("verify-tower", help="check a restriction triangle "
                                            "between two polynomials")
    p.add_argument("h_polynomial", help="covering polynomial JSON")
    p.add_argument("g_polynomial", help="base polynomial JSON")
    p.add_argument("--base-space", help="BaseSpace JSON file")
    p.add_argument("--group", required=True, help="the group H (JSON)")
    p.add_argument("--phi", required=True, help="generator images of phi (JSON)")
    p.add_argument("--psi", required=True, help="generator images of psi (JSON)")
    common(p)
    p.set_defaults(func=_cmd_verify_tower)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IrreducibilityFailureError, GeometryError, ClosureLimitError,
            ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except NoSolutionError as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical instability: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
