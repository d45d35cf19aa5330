"""Command-line interface.

Exit codes: 0 when every requested check passes, 1 when any check
fails or a computation reports a well-formed negative result, 2 for
usage and configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .groups import check_metivier, validate_group
from .means import SingularNodeError, laguerre_gaussian, twisted_sphere_mean
from .radial import annihilation_check, monomial_stack, null_family
from .reduction import DegenerateCombinationError, reduce_direction
from .suites import (
    SUITES,
    SuiteConfig,
    SuiteConfigError,
    resolve_group,
    run_suite,
)


def _parse_lam(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise SuiteConfigError(f"cannot parse direction {text!r}: {exc}") from None


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.array([complex(x) for x in text.split(",") if x.strip()], dtype=complex)
    except ValueError as exc:
        raise SuiteConfigError(f"cannot parse point {text!r}: {exc}") from None


def _emit(obj: dict, as_json: bool):
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=True, default=str))
    else:
        for key, value in obj.items():
            print(f"{key}: {value}")


def _cmd_validate(args) -> int:
    group = resolve_group(args.group)
    mode = args.mode or group.mode
    report = validate_group(group.U, group.n, group.m, mode)
    met = check_metivier(group, sample_count=args.samples, seed=args.seed)
    obj = report.to_dict()
    obj["metivier"] = met.to_dict()
    obj["digest"] = group.digest()
    _emit(obj, args.json)
    return 0 if report.passed and met.passed else 1


def _cmd_reduce(args) -> int:
    group = resolve_group(args.group)
    try:
        frame = reduce_direction(group, _parse_lam(args.lam), tol=args.tol)
    except DegenerateCombinationError as exc:
        print(f"reduction failed: {exc}", file=sys.stderr)
        return 1
    obj = {
        "mu": frame.mu.tolist(),
        "residual_orth": frame.residual_orth,
        "residual_conj": frame.residual_conj,
        "lam": frame.lam.tolist(),
    }
    if args.json:
        obj["A"] = frame.A.tolist()
    _emit(obj, args.json)
    ok = max(frame.residual_orth, frame.residual_conj) <= args.tol
    return 0 if ok else 1


def _build_cli_function(spec: str, n: int):
    name, _, rest = spec.partition(":")
    params = [p for p in rest.split(":") if p]
    if name == "gaussian":
        rate = float(params[0]) if params else 1.0
        from .radial import TypeFunction

        return TypeFunction.gaussian(n, -rate / 4.0)
    if name == "laguerre":
        k = int(params[0]) if params else 0
        type_index = float(params[1]) if len(params) > 1 else n - 1
        return laguerre_gaussian(k, type_index)
    raise SuiteConfigError(f"unknown mean integrand {spec!r}; use gaussian[:RATE] or laguerre:K[:TYPE]")


def _cmd_mean(args) -> int:
    group = resolve_group(args.group)
    z = _parse_point(args.z)
    f = _build_cli_function(args.function, group.n)
    try:
        if args.reduced:
            frame = reduce_direction(group, _parse_lam(args.lam))
            value = twisted_sphere_mean(
                f, z, args.radius, mu=frame.mu, rule=args.rule, seed=args.seed
            )
        else:
            value = twisted_sphere_mean(
                f,
                z,
                args.radius,
                group=group,
                lam=_parse_lam(args.lam),
                rule=args.rule,
                seed=args.seed,
            )
    except SingularNodeError as exc:
        print(f"mean aborted: {exc}", file=sys.stderr)
        return 1
    obj = {
        "value_re": value.value.real,
        "value_im": value.value.imag,
        "stderr": value.stderr,
        "nodes": value.count,
        "kind": value.kind,
    }
    _emit(obj, args.json)
    return 0


def _cmd_ode_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    p, q = args.p, args.q
    A = rng.standard_normal(p) + 1j * rng.standard_normal(p) if p else None
    B = rng.standard_normal(q) + 1j * rng.standard_normal(q) if q else None
    stack = monomial_stack(p, q, args.n, args.nu1, args.nu2)
    family = null_family(p, q, args.n, args.nu1, args.nu2, A=A, B=B)
    report = annihilation_check(stack, family, tol=args.tol)
    _emit(report.to_dict(), args.json)
    return 0 if report.passed else 1


def _cmd_verify(args) -> int:
    if args.threads:
        os.environ["TSMKIT_THREADS"] = str(args.threads)
    if args.config:
        base = SuiteConfig.load(args.config)
        if args.suite and args.suite != base.suite:
            raise SuiteConfigError("--suite conflicts with the suite named in --config")
        configs = [base]
    else:
        if not args.suite:
            raise SuiteConfigError("give --suite NAME (or 'all'), or --config FILE")
        names = list(SUITES) if args.suite == "all" else [args.suite]
        configs = [
            SuiteConfig(suite=name, group=args.group, seed=args.seed, rule=args.rule)
            for name in names
        ]
    reports = []
    for config in configs:
        report = run_suite(config)
        reports.append(report)
        if not args.quiet:
            for case in report.cases:
                mark = "ok " if case.ok else "BAD"
                res = "" if case.residual is None else f" residual={case.residual:.3e}"
                print(f"[{mark}] {case.key} expected={case.expected} status={case.status}{res}")
        state = "PASS" if report.passed else "FAIL"
        counts = report.counts
        print(
            f"suite {report.suite}: {state} "
            f"({counts['total']} cases, {counts['controls']} controls, "
            f"{report.elapsed_seconds:.2f}s, digest {report.digest()})"
        )
    if args.out:
        if args.format == "json":
            payload = {
                "passed": all(r.passed for r in reports),
                "reports": [r.to_json_obj() for r in reports],
            }
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
        else:
            chunks = []
            for i, r in enumerate(reports):
                text = r.to_csv()
                chunks.append(text if i == 0 else text.split("\n", 1)[1])
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write("".join(chunks))
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsmkit",
        description="Numerical checks for twisted spherical means on step-two groups.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="validate a group's structure matrices")
    p_val.add_argument("--group", default="heisenberg:1")
    p_val.add_argument("--mode", choices=("metivier", "htype", "heisenberg"), default=None)
    p_val.add_argument("--samples", type=int, default=512)
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--json", action="store_true")
    p_val.set_defaults(func=_cmd_validate)

    p_red = sub.add_parser("reduce", help="build the canonical frame for a direction")
    p_red.add_argument("--group", default="heisenberg:1")
    p_red.add_argument("--lam", required=True, help="comma-separated direction, e.g. 3,4,0")
    p_red.add_argument("--tol", type=float, default=1e-10)
    p_red.add_argument("--json", action="store_true")
    p_red.set_defaults(func=_cmd_reduce)

    p_mean = sub.add_parser("mean", help="evaluate a twisted spherical mean")
    p_mean.add_argument("--group", default="heisenberg:1")
    p_mean.add_argument("--lam", required=True)
    p_mean.add_argument("--z", required=True, help="comma-separated complex point, e.g. 0.3+0.2j")
    p_mean.add_argument("--radius", type=float, required=True)
    p_mean.add_argument("--function", default="gaussian:1")
    p_mean.add_argument("--rule", default="product:16")
    p_mean.add_argument("--seed", type=int, default=0)
    p_mean.add_argument(
        "--reduced",
        action="store_true",
        help="interpret the point in reduced frame coordinates with the diagonal phase",
    )
    p_mean.add_argument("--json", action="store_true")
    p_mean.set_defaults(func=_cmd_mean)

    p_ode = sub.add_parser("ode-check", help="run one annihilation check")
    p_ode.add_argument("--p", type=int, required=True)
    p_ode.add_argument("--q", type=int, required=True)
    p_ode.add_argument("--n", type=int, default=1)
    p_ode.add_argument("--nu1", type=float, default=-1.0)
    p_ode.add_argument("--nu2", type=float, default=-1.0)
    p_ode.add_argument("--seed", type=int, default=0)
    p_ode.add_argument("--tol", type=float, default=1e-12)
    p_ode.add_argument("--json", action="store_true")
    p_ode.set_defaults(func=_cmd_ode_check)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("--suite", choices=SUITES + ("all",), default=None)
    p_ver.add_argument("--group", default="heisenberg:1")
    p_ver.add_argument("--config", default=None, help="JSON suite config file")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--rule", default="product:16")
    p_ver.add_argument("--threads", type=int, default=0)
    p_ver.add_argument("--out", default=None)
    p_ver.add_argument("--format", choices=("json", "csv"), default="json")
    p_ver.add_argument("--quiet", action="store_true")
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SuiteConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
