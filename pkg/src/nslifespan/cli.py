"""Batch certification front end.

Reads a JSON problem description, runs the requested certification, writes a
deterministic JSON certificate report, and prints a short human-readable
summary. Exit codes: 0 = certified (result feasible and every replayed
inequality passed), 2 = infeasible or hypothesis failure (diagnostics in the
report), 1 = input error (malformed config, schema violation, missing
norms). The report bytes are stable across runs for identical input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from . import __version__
from .constants import DELTA0, composite_constants
from .errors import DomainError, InfeasibleExponentError, UnavailableBoundError
from .extensions import (
    AbstractParabolicProblem,
    ForceNorm,
    abstract_parabolic_lifespan,
    forced_lifespan,
)
from .initial_data import NormBundle, VortexGaussian, lp_norm, norm_bundle_from_vortex
from .jsonio import canonical_dumps, fingerprint
from .lifespan import (
    LifespanCertificate,
    global_certificate,
    optimize_delta,
    replay_certificate,
    state_from_norms,
    state_from_vortex,
    theorem31_bound,
    theorem41_bound,
    theorem41_explicit,
)
from .mixed_norms import SolutionNormInputs, ThetaExponents, grand_lebesgue_norm, nu_bound, psi_bound, psi_min

MODES = (
    "thm31",
    "thm41",
    "thm41_explicit",
    "global_test",
    "mixed_norms",
    "forced",
    "abstract_parabolic",
)

_FORCE_BLOCK = {
    "type": "object",
    "additionalProperties": False,
    "required": ["theta", "lambda", "value"],
    "properties": {
        "theta": {"type": "number", "minimum": 1},
        "lambda": {"type": "number", "exclusiveMinimum": -1, "exclusiveMaximum": 0},
        "value": {"type": "number", "minimum": 0},
    },
}

SCHEMA: dict = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "nslifespan problem configuration",
    "description": (
        "Input schema for the certification CLI. Reports emitted by the CLI "
        "serialize numbers with 17 significant digits and encode infinite "
        "values (such as a global-solution horizon t0) as the JSON string "
        "'infinity' ('-infinity' for the negative sign), since JSON has no "
        "infinity literal."
    ),
    "type": "object",
    "additionalProperties": False,
    "required": ["d", "mode"],
    "properties": {
        "d": {"type": "integer", "minimum": 3},
        "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "delta_grid": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            "minItems": 1,
        },
        "mode": {"enum": list(MODES)},
        "data": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["family", "sigma", "amplitude"],
                    "properties": {
                        "family": {"const": "vortex_gaussian"},
                        "sigma": {"type": "number", "exclusiveMinimum": 0},
                        "amplitude": {"type": "number", "minimum": 0},
                    },
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["norms"],
                    "properties": {
                        "norms": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["lp_norms"],
                            "properties": {
                                "lp_norms": {
                                    "type": "object",
                                    "additionalProperties": {"type": "number", "minimum": 0},
                                },
                                "grad_d_norm": {"type": "number", "minimum": 0},
                                "theta": {"type": "number", "exclusiveMinimum": 0},
                                "norm_d_plus_theta": {"type": "number", "minimum": 0},
                            },
                        }
                    },
                },
            ]
        },
        "theta": {"type": "number", "exclusiveMinimum": 0},
        "q_grid": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "solution_norms": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "k_sup": {"type": "number", "minimum": 0},
                "k_prime_sup": {"type": "number", "minimum": 0},
            },
        },
        "force": {
            "type": "object",
            "additionalProperties": False,
            "required": ["k0", "k0_prime"],
            "properties": {
                "k0": _FORCE_BLOCK,
                "k0_prime": _FORCE_BLOCK,
                "halved_kernel_decay": {"type": "boolean"},
            },
        },
        "abstract_parabolic": {
            "type": "object",
            "additionalProperties": False,
            "required": ["gamma", "c_gamma", "alpha", "k1", "k2", "t1", "t2"],
            "properties": {
                "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "c_gamma": {"type": "number", "exclusiveMinimum": 0},
                "alpha": {"type": "number", "exclusiveMinimum": 0},
                "k1": {"type": "number", "exclusiveMinimum": 0},
                "k2": {"type": "number", "exclusiveMinimum": 0},
                "t1": {"type": "number", "exclusiveMinimum": 0},
                "t2": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "margin": {"type": "number", "minimum": 0},
            },
        },
        "search": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_min": {"type": "number", "exclusiveMinimum": 0},
                "t_max": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}


class ConfigError(ValueError):
    """Input-side failure: maps to exit code 1."""


class InfeasibleResult(ValueError):
    """Certification-side failure: maps to exit code 2."""


def load_config(path: Path) -> dict:
    """Parse and schema-validate a problem configuration."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    validate_config(config)
    return config


def validate_config(config: Mapping) -> None:
    try:
        jsonschema.validate(config, SCHEMA)
    except jsonschema.ValidationError as exc:
        field = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config field '{field}': {exc.message}") from exc
    mode = config["mode"]
    if mode == "abstract_parabolic":
        if "abstract_parabolic" not in config:
            raise ConfigError("mode abstract_parabolic requires the 'abstract_parabolic' block")
        return
    if "data" not in config:
        raise ConfigError(f"mode {mode} requires the 'data' block")
    if mode == "forced" and "force" not in config:
        raise ConfigError("mode forced requires the 'force' block")
    if mode == "mixed_norms" and "q_grid" not in config:
        raise ConfigError("mode mixed_norms requires 'q_grid'")


def _resolve_deltas(config: Mapping) -> tuple[float, ...]:
    if "delta_grid" in config:
        return tuple(float(x) for x in config["delta_grid"])
    return (float(config.get("delta", DELTA0)),)


def _data_objects(config: Mapping) -> tuple[VortexGaussian | None, NormBundle | None]:
    data = config["data"]
    if "family" in data:
        return VortexGaussian(int(config["d"]), float(data["sigma"]), float(data["amplitude"])), None
    return None, NormBundle.from_dict(data["norms"])


def _make_state(config: Mapping, delta: float):
    vortex, bundle = _data_objects(config)
    if vortex is not None:
        return state_from_vortex(vortex, delta)
    return state_from_norms(bundle, int(config["d"]), delta)


def _a_d_norm(config: Mapping) -> float:
    d = int(config["d"])
    vortex, bundle = _data_objects(config)
    if vortex is not None:
        return lp_norm(vortex, float(d))
    value = bundle.lp_norms.get(float(d))
    if value is None:
        raise ConfigError(f"norm bundle must contain |a|_d for d={d}")
    return value


def _bundle_for_explicit(config: Mapping) -> NormBundle:
    vortex, bundle = _data_objects(config)
    if vortex is not None:
        theta = float(config.get("theta", 0.5))
        return norm_bundle_from_vortex(vortex, theta=theta)
    return bundle


def _certificate_result(config: Mapping) -> tuple[dict, bool, list]:
    mode = config["mode"]
    deltas = _resolve_deltas(config)
    tol = float(config.get("tolerances", {}).get("rel_tol", 1e-9))
    margin = float(config.get("tolerances", {}).get("margin", 1e-9))
    search = (
        float(config.get("search", {}).get("t_min", 1e-12)),
        float(config.get("search", {}).get("t_max", 1e12)),
    )

    def certify(delta: float) -> LifespanCertificate:
        if mode == "thm31":
            return theorem31_bound(_make_state(config, delta), search=search, tol=tol, margin=margin)
        if mode == "thm41":
            return theorem41_bound(_make_state(config, delta), search=search, tol=tol)
        if mode == "thm41_explicit":
            bundle = _bundle_for_explicit(config)
            return theorem41_explicit(bundle, int(config["d"]), delta, bundle.theta)
        if mode == "forced":
            force_cfg = config["force"]
            f1 = ForceNorm(
                float(force_cfg["k0"]["theta"]),
                float(force_cfg["k0"]["lambda"]),
                float(force_cfg["k0"]["value"]),
            )
            f2 = ForceNorm(
                float(force_cfg["k0_prime"]["theta"]),
                float(force_cfg["k0_prime"]["lambda"]),
                float(force_cfg["k0_prime"]["value"]),
            )
            return forced_lifespan(
                _make_state(config, delta),
                f1,
                f2,
                search=search,
                tol=tol,
                halved_kernel_decay=bool(force_cfg.get("halved_kernel_decay", False)),
            )
        if mode == "global_test":
            return global_certificate(_a_d_norm(config), int(config["d"]), delta)
        raise ConfigError(f"unsupported certificate mode {mode}")

    result: dict[str, Any] = {}
    if len(deltas) == 1:
        cert = certify(deltas[0])
    else:
        sweep = optimize_delta(certify, deltas)
        cert = sweep.best
        result["delta_profile"] = [[dlt, t0, feas] for dlt, t0, feas in sweep.profile]

    result["certificate"] = cert.to_dict()
    replay = replay_certificate(cert)
    replay_rows = [
        {"name": name, "passed": passed, "detail": detail}
        for name, passed, detail in replay.results
    ]
    return result, cert.feasible and replay.all_passed, replay_rows


def _mixed_norms_result(config: Mapping) -> tuple[dict, bool, list]:
    d = int(config["d"])
    deltas = _resolve_deltas(config)
    delta = deltas[0]
    q_grid = [float(q) for q in config["q_grid"]]
    sol = config.get("solution_norms", {})
    cs = composite_constants(d, delta)
    inputs = SolutionNormInputs(
        k_sup=float(sol.get("k_sup", cs.iterate_bound)),
        k_prime_sup=float(sol.get("k_prime_sup", cs.iterate_bound)),
        a_d_norm=_a_d_norm(config),
    )
    psi_profile: list[list[float]] = []
    psi_errors: list[list] = []
    nu_profile: list[list[float]] = []
    nu_errors: list[list] = []
    identity_residual = 0.0
    for q in q_grid:
        try:
            th = ThetaExponents.create(d, q, delta)
            identity_residual = max(
                identity_residual, max(abs(r) for r in th.identity_residuals().values())
            )
            psi_profile.append([q, psi_bound(d, q, delta, inputs)])
        except (DomainError, InfeasibleExponentError) as exc:
            psi_errors.append([q, str(exc)])
        try:
            nu_profile.append([q, nu_bound(d, q, delta, inputs)])
        except (DomainError, InfeasibleExponentError) as exc:
            nu_errors.append([q, str(exc)])

    result: dict[str, Any] = {
        "delta": delta,
        "inputs": {
            "k_sup": inputs.k_sup,
            "k_prime_sup": inputs.k_prime_sup,
            "a_d_norm": inputs.a_d_norm,
        },
        "psi_profile": psi_profile,
        "psi_errors": psi_errors,
        "nu_profile": nu_profile,
        "nu_errors": nu_errors,
    }
    replay_rows: list[dict] = []
    feasible = bool(psi_profile) and bool(nu_profile)
    if psi_profile:
        diag = grand_lebesgue_norm(psi_profile, psi_profile)
        result["grand_lebesgue_self"] = diag
        replay_rows.append(
            {"name": "grand_lebesgue_diagonal", "passed": diag == 1.0, "detail": f"value={diag}"}
        )
    replay_rows.append(
        {
            "name": "theta_identities",
            "passed": identity_residual <= 1e-12,
            "detail": f"max residual {identity_residual:.3e}",
        }
    )
    if len(deltas) > 1:
        min_rows = []
        for q in q_grid:
            try:
                pm = psi_min(d, q, inputs, deltas)
                min_rows.append([q, pm.value, pm.delta])
            except DomainError as exc:
                min_rows.append([q, None, str(exc)])
        result["psi_min"] = min_rows
    all_passed = all(row["passed"] for row in replay_rows)
    return result, feasible and all_passed, replay_rows


def _abstract_parabolic_result(config: Mapping) -> tuple[dict, bool, list]:
    block = config["abstract_parabolic"]
    problem = AbstractParabolicProblem(
        gamma=float(block["gamma"]),
        c_gamma=float(block["c_gamma"]),
        alpha=float(block["alpha"]),
        k1=float(block["k1"]),
        k2=float(block["k2"]),
        t1=float(block["t1"]),
        t2=float(block["t2"]),
    )
    res = abstract_parabolic_lifespan(problem)
    result = {"lifespan": res.t, "breakdown": res.breakdown()}
    replay_rows = [
        {
            "name": "duhamel_inside_half_ball",
            "passed": res.ball_fraction < 1.0,
            "detail": f"fraction={res.ball_fraction:.6g}",
        },
        {
            "name": "contraction_at_most_half",
            "passed": res.contraction_factor <= 0.5,
            "detail": f"factor={res.contraction_factor:.6g}",
        },
    ]
    all_passed = all(row["passed"] for row in replay_rows)
    return result, all_passed, replay_rows


def build_report(config: Mapping) -> tuple[dict, bool]:
    """Run the configured certification and assemble the full report.

    Returns (report, certified); `certified` means the result is feasible
    and every replay row passed.
    """
    mode = config["mode"]
    d = int(config["d"])
    deltas = _resolve_deltas(config)

    if mode == "mixed_norms":
        result, certified, replay_rows = _mixed_norms_result(config)
    elif mode == "abstract_parabolic":
        result, certified, replay_rows = _abstract_parabolic_result(config)
    else:
        result, certified, replay_rows = _certificate_result(config)

    constants_block: dict[str, Any] = {}
    if mode != "abstract_parabolic":
        # after a grid sweep the table reflects the winning delta
        delta_for_table = deltas[0]
        if "certificate" in result:
            delta_for_table = float(result["certificate"]["delta_used"])
        cs = composite_constants(d, delta_for_table)
        constants_block = {
            "d": d,
            "delta": delta_for_table,
            "table": [
                {"name": name, "value": value, "formula": formula}
                for name, value, formula in cs.as_table()
            ],
        }

    report = {
        "schema_version": "1",
        "package_version": __version__,
        "config": dict(config),
        "constants": constants_block,
        "result": result,
        "verification": {
            "all_passed": all(row["passed"] for row in replay_rows) if replay_rows else True,
            "replay": replay_rows,
        },
        "fingerprint": "",
    }
    report["fingerprint"] = fingerprint({k: v for k, v in report.items() if k != "fingerprint"})
    return report, certified


def run(config_path: Path, output_path: Path, mode_override: str | None = None, verbose: bool = False) -> int:
    """Execute one certification run; returns the process exit code."""
    try:
        config = load_config(config_path)
        if mode_override is not None:
            config = dict(config)
            config["mode"] = mode_override
            validate_config(config)
        report, certified = build_report(config)
    except ConfigError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleExponentError as exc:
        # checked before DomainError: infeasible exponents are a property of
        # the mathematical configuration, not of the input format
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (DomainError, UnavailableBoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1

    text = canonical_dumps(report)
    output_path.write_text(text, encoding="utf-8")
    summary = _summarize(report)
    print(summary)
    if verbose:
        for row in report["verification"]["replay"]:
            status = "pass" if row["passed"] else "FAIL"
            print(f"  [{status}] {row['name']}: {row['detail']}")
    return 0 if certified else 2


def _summarize(report: Mapping) -> str:
    result = report["result"]
    mode = report["config"]["mode"]
    if "certificate" in result:
        cert = result["certificate"]
        t0 = cert["t0"]
        t0_str = "infinity" if isinstance(t0, float) and math.isinf(t0) else f"{t0:.6g}"
        return (
            f"mode={mode} theorem={cert['theorem']} t0={t0_str} "
            f"feasible={cert['feasible']} verified={report['verification']['all_passed']}"
        )
    if mode == "mixed_norms":
        n_psi = len(result.get("psi_profile", []))
        n_nu = len(result.get("nu_profile", []))
        return f"mode=mixed_norms psi_points={n_psi} nu_points={n_nu} verified={report['verification']['all_passed']}"
    return f"mode={mode} lifespan={result.get('lifespan'):.6g} verified={report['verification']['all_passed']}"


def print_constants(d: int, delta: float) -> int:
    """Print the full constant table for (d, delta); returns the exit code."""
    try:
        cs = composite_constants(d, delta)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 1
    print(f"constants for d={d}, delta={delta!r}")
    for name, value, formula in cs.as_table():
        print(f"  {name:<14s} = {value:<24.17g} {formula}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nslifespan",
        description="Certified lifespan lower bounds from norms of the initial data.",
        add_help=True,
    )
    parser.add_argument("--config", type=Path, help="path to the JSON problem description")
    parser.add_argument("--out", type=Path, help="path for the JSON certificate report")
    parser.add_argument("--mode", choices=MODES, help="override the mode given in the config")
    parser.add_argument(
        "--print-constants",
        nargs=2,
        metavar=("D", "DELTA"),
        help="print the constant table for (d, delta) and exit",
    )
    parser.add_argument("--verbose", action="store_true", help="print the replay table")
    args = parser.parse_args(argv)

    if args.print_constants is not None:
        try:
            d = int(args.print_constants[0])
            delta = float(args.print_constants[1])
        except ValueError as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return 1
        return print_constants(d, delta)

    if args.config is None or args.out is None:
        print("input error: --config and --out are required (or use --print-constants)", file=sys.stderr)
        return 1
    return run(args.config, args.out, mode_override=args.mode, verbose=args.verbose)


if __name__ == "__main__":
    raise SystemExit(main())
