"""Batch command-line interface.

Subcommands: `sample`, `derive`, `prohorov`, `converge`, `lemma7-selftest`,
`pairing`.  Exit codes: 0 success, 1 usage error (one-line diagnosis on
stderr), 2 numerical failure.  `converge` accepts a `key = value` config file;
explicit flags override file entries.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import CircleDerivsError
from .experiments import (ExperimentConfig, SzNagyRandom, power_sum_selftest,
                          rows_to_csv, rows_to_json, run_convergence)
from .laws import SeedSpec, parse_law
from .measures import pairing_fraction, prohorov, read_measure_csv
from .polys import Ordinary, RootPoly, parse_scheme
from .rootfind import derived_zeros, kth_derivative_zeros

DEFAULT_SEED = 0


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # one-line diagnosis, exit 1 (not argparse's 2)
        raise _UsageError(message)


def _common_flags(parser):
    parser.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    parser.add_argument("--stream", type=int, default=0, help="sub-stream index")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="circle-derivs",
                     description="zeros of generalized derivatives of random "
                                 "circle-rooted polynomials")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw zeros and emit them")
    p.add_argument("--law", required=True)
    p.add_argument("--n", type=int, required=True)
    _common_flags(p)

    p = sub.add_parser("derive", help="emit zeros of a generalized derivative")
    p.add_argument("--law", default=None, help="sample the roots from this law")
    p.add_argument("--n", type=int, default=None, help="degree when sampling")
    p.add_argument("--roots", default=None, help="CSV of explicit roots instead of sampling")
    p.add_argument("--scheme", required=True)
    p.add_argument("--k", type=int, default=1, help="derivative order (ordinary only)")
    _common_flags(p)

    p = sub.add_parser("prohorov", help="distance between two measure CSVs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--tol", type=float, default=1e-9)
    _common_flags(p)

    p = sub.add_parser("converge", help="run a convergence sweep")
    p.add_argument("--config", default=None, help="key = value file; flags override")
    p.add_argument("--law", default=None)
    p.add_argument("--scheme", default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n", default=None, help="comma-separated degree list")
    p.add_argument("--seeds", type=int, default=None, help="number of seed streams")
    p.add_argument("--p-max", type=int, default=None)
    p.add_argument("--disk-r", type=float, default=None)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--target-atoms", type=int, default=None)
    _common_flags(p)

    p = sub.add_parser("lemma7-selftest", help="three-way power-sum agreement check")
    p.add_argument("--trials", type=int, default=200)
    _common_flags(p)

    p = sub.add_parser("pairing", help="nearest-neighbor fractions between two point CSVs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--eps0", type=float, required=True)
    _common_flags(p)

    return parser


def _emit(text: str, out_path) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _points_csv(points) -> str:
    lines = ["re,im"]
    for z in np.asarray(points, dtype=complex):
        lines.append(f"{z.real:.17g},{z.imag:.17g}")
    return "\n".join(lines) + "\n"


def _points_json(points, meta: dict) -> str:
    import json
    body = dict(meta)
    body["points"] = [[z.real, z.imag] for z in np.asarray(points, dtype=complex)]
    return json.dumps(body, indent=2) + "\n"


def _seed_of(args) -> int:
    return DEFAULT_SEED if args.seed is None else args.seed


def _fmt_of(args) -> str:
    return args.format or "csv"


def _cmd_sample(args) -> int:
    law = parse_law(args.law)
    seed = _seed_of(args)
    pts = law.sample(args.n, SeedSpec(seed, args.stream))
    if _fmt_of(args) == "csv":
        _emit(_points_csv(pts), args.out)
    else:
        _emit(_points_json(pts, {"law": law.spec_string(), "n": args.n,
                                 "seed": seed, "stream": args.stream}), args.out)
    return 0


def _cmd_derive(args) -> int:
    if args.roots is not None:
        roots = read_measure_csv(args.roots).atoms
        source = {"roots": args.roots}
    elif args.law is not None and args.n is not None:
        law = parse_law(args.law)
        seed = _seed_of(args)
        roots = law.sample(args.n, SeedSpec(seed, args.stream))
        source = {"law": law.spec_string(), "n": args.n,
                  "seed": seed, "stream": args.stream}
    else:
        raise _UsageError("derive needs either --roots FILE or both --law and --n")
    scheme = parse_scheme(args.scheme)
    if args.k < 1:
        raise _UsageError("--k must be >= 1")
    if args.k > 1 and not isinstance(scheme, Ordinary):
        raise _UsageError("--k above 1 applies to the ordinary scheme only")
    poly = RootPoly(roots)
    if args.k > 1:
        dz = kth_derivative_zeros(poly, args.k)
    else:
        dz = derived_zeros(poly, scheme)
    if _fmt_of(args) == "csv":
        _emit(_points_csv(dz.zeros), args.out)
    else:
        meta = dict(source)
        meta.update({"scheme": scheme.spec_string(), "k": args.k,
                     "residual_max": dz.residual_max, "backend": dz.backend})
        _emit(_points_json(dz.zeros, meta), args.out)
    return 0


def _cmd_prohorov(args) -> int:
    m1 = read_measure_csv(args.first)
    m2 = read_measure_csv(args.second)
    result = prohorov(m1, m2, tol=args.tol)
    if _fmt_of(args) == "csv":
        _emit(f"{result.distance:.17g}\n", args.out)
    else:
        import json
        _emit(json.dumps({"distance": result.distance,
                          "certificate_eps": result.certificate_eps,
                          "certificate_flow": result.certificate_flow}) + "\n", args.out)
    return 0


def _read_config_file(path) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise _UsageError(f"bad config line {raw.strip()!r}, expected key = value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


_CONVERGE_FILE_KEYS = {
    "law": str, "scheme": str, "k": int, "n": str, "seeds": int, "p_max": int,
    "disk_r": float, "eps0": float, "q": float, "target_atoms": int,
    "seed": int, "format": str, "out": str,
}


def _cmd_converge(args) -> int:
    merged = {}
    if args.config is not None:
        file_values = _read_config_file(args.config)
        for key, value in file_values.items():
            if key not in _CONVERGE_FILE_KEYS:
                raise _UsageError(f"unknown config key {key!r}")
            merged[key] = _CONVERGE_FILE_KEYS[key](value)
    for key in _CONVERGE_FILE_KEYS:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            merged[key] = flag_val
        merged.setdefault(key, None)

    for required in ("law", "scheme", "n"):
        if merged[required] is None:
            raise _UsageError(f"converge needs --{required} (flag or config file)")

    scheme_text = merged["scheme"].strip()
    if scheme_text.startswith("sznagy-random"):
        _, _, cap = scheme_text.partition(":")
        scheme = SzNagyRandom(float(cap)) if cap else SzNagyRandom()
    else:
        scheme = parse_scheme(scheme_text)

    try:
        n_list = tuple(int(v) for v in str(merged["n"]).split(","))
    except ValueError:
        raise _UsageError(f"bad degree list {merged['n']!r}") from None
    seed_count = merged["seeds"] if merged["seeds"] is not None else 20
    if seed_count < 1:
        raise _UsageError("--seeds must be >= 1")
    master = merged["seed"] if merged["seed"] is not None else DEFAULT_SEED
    seeds = tuple(SeedSpec(master, stream) for stream in range(seed_count))

    kwargs = {}
    for key, field_name in (("k", "k"), ("p_max", "p_max"), ("disk_r", "disk_r"),
                            ("eps0", "eps0"), ("q", "q"), ("target_atoms", "target_atoms")):
        if merged[key] is not None:
            kwargs[field_name] = merged[key]
    try:
        config = ExperimentConfig(law=parse_law(merged["law"]), scheme=scheme,
                                  n_list=n_list, seeds=seeds, **kwargs)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None

    rows = run_convergence(config)
    fmt = merged["format"] or "csv"
    text = rows_to_csv(config, rows) if fmt == "csv" else rows_to_json(config, rows)
    _emit(text, merged["out"])
    return 0


def _cmd_selftest(args) -> int:
    if args.trials < 1:
        raise _UsageError("--trials must be >= 1")
    report = power_sum_selftest(args.trials, SeedSpec(_seed_of(args), args.stream))
    status = "PASS" if report.passed else "FAIL"
    text = (f"{status}: max three-way discrepancy {report.max_discrepancy:.3e} "
            f"over {report.trials} trials (tolerance {report.tolerance:.1e})")
    if report.worst_case:
        text += f"; worst at {report.worst_case}"
    _emit(text + "\n", args.out)
    return 0 if report.passed else 2


def _cmd_pairing(args) -> int:
    first = read_measure_csv(args.first).atoms
    second = read_measure_csv(args.second).atoms
    if args.eps0 <= 0:
        raise _UsageError("--eps0 must be positive")
    frac_first = pairing_fraction(second, first, args.eps0)   # first points near second
    frac_second = pairing_fraction(first, second, args.eps0)  # second points near first
    if _fmt_of(args) == "csv":
        _emit("fraction_first_near_second,fraction_second_near_first\n"
              f"{frac_first:.17g},{frac_second:.17g}\n", args.out)
    else:
        import json
        _emit(json.dumps({"fraction_first_near_second": frac_first,
                          "fraction_second_near_first": frac_second}) + "\n", args.out)
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "derive": _cmd_derive,
    "prohorov": _cmd_prohorov,
    "converge": _cmd_converge,
    "lemma7-selftest": _cmd_selftest,
    "pairing": _cmd_pairing,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CircleDerivsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
