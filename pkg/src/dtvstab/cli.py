"""Command line entry point: ``dtvstab {analyze,certify,sweep,oracle}``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from .certify import analyze, certify, oracle, sweep, sweep_csv
from .config import load_config
from .errors import ConfigError, InvalidParameter, StabilityError, TheoremViolation
from .sequences import SpaceSpec

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 2
EXIT_VIOLATION = 3
EXIT_CONFIG = 4


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_analyze(args) -> int:
    _emit(_dump(analyze(load_config(args.config))), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = load_config(args.config)
    try:
        if args.space is not None:
            cfg = dataclasses.replace(cfg, space=SpaceSpec.parse(args.space))
        if args.tol is not None:
            if not args.tol > 0:
                raise ConfigError("--tol must be positive", field="tolerance")
            cfg = dataclasses.replace(cfg, tolerance=args.tol)
    except InvalidParameter as exc:
        raise ConfigError(str(exc), field="space") from exc
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    cert = certify(cfg)
    _emit(_dump(cert.to_dict()), args.out)
    print(f"{cert.verdict} {cert.space} digest={cert.family_digest[:12]}", file=sys.stderr)
    return cert.exit_code


def cmd_sweep(args) -> int:
    if args.steps < 0:
        raise InvalidParameter("--steps must be nonnegative")
    gammas = np.linspace(args.gamma_from, args.gamma_to, args.steps) if args.steps else []
    rows = sweep(gammas, SpaceSpec.parse(args.space), tol=args.tol, seed=args.seed)
    _emit(sweep_csv(rows), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    res = oracle(load_config(args.config), n=args.n)
    _emit(_dump(res), args.out)
    return EXIT_OK if res["agree"] else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dtvstab", description="Stability certificates for discrete evolution families.")
    sub = ap.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="family diagnostics only")
    a.add_argument("config")
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("certify", help="full certificate as JSON")
    c.add_argument("config")
    c.add_argument("--space", help="lp:P, linf or c0 (overrides the config)")
    c.add_argument("--tol", type=float)
    c.add_argument("--seed", type=int)
    c.add_argument("--out")
    c.set_defaults(func=cmd_certify)

    s = sub.add_parser("sweep", help="scalar gamma sweep as CSV")
    s.add_argument("--gamma-from", type=float, default=0.5)
    s.add_argument("--gamma-to", type=float, default=0.999)
    s.add_argument("--steps", type=int, default=20)
    s.add_argument("--space", default="c0")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("oracle", help="dense brute-force cross-check")
    o.add_argument("config")
    o.add_argument("--n", type=int, default=64)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidParameter as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TheoremViolation as exc:
        print(f"theorem violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except StabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
