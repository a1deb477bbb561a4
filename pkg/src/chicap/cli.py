"""Command-line front end: ``chicap <subcommand> ...``.

Exit codes: 0 success, 1 failed certificate or numerical failure,
2 solver did not converge, 3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path


from . import io
from .errors import ChicapError, NotConverged, ValidationError
from .orbit import OrbitChannel, discontinuity_demo, fourier_capacity, orbit_capacity
from .qfamily import FiniteSequence, QSequence, classify, omega_entropy_enclosure
from .random import decaying_channel
from .solver import evaluate, solve_capacity, verify_maximal_distance
from .studies import family_convergence, family_schedule, truncation_study

log = logging.getLogger("chicap")

EXIT_OK, EXIT_FAIL, EXIT_NOT_CONVERGED, EXIT_INVALID = 0, 1, 2, 3


def _positive_float(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _positive_int(text):
    n = int(float(text))
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _int_list(text):
    return [int(float(t)) for t in text.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=1e-8)
    common.add_argument("--max-iter", type=_positive_int, default=100_000)
    common.add_argument("--log-base", choices=("nats", "bits"), default="nats")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", type=Path, help="JSON report path (default: stdout)")
    common.add_argument("--csv", type=Path, help="path for the CSV table, if any")

    p = argparse.ArgumentParser(prog="chicap", description="Holevo chi-capacity of cq channels.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("capacity", parents=[common], help="solve a channel file")
    s.add_argument("--channel", type=Path, required=True)

    s = sub.add_parser("verify", parents=[common], help="re-check a capacity report")
    s.add_argument("--channel", type=Path, required=True)
    s.add_argument("--report", type=Path, required=True)
    s.add_argument("--support-tol", type=float, default=1e-6)
    s.add_argument("--dist-tol", type=float, default=1e-5)

    s = sub.add_parser("family", parents=[common], help="analyse a q_n sequence")
    s.add_argument("--class", dest="kind", choices=("power", "log", "loglog", "iterlog"))
    s.add_argument("--params", default="", help="comma-separated, e.g. c=1,a=1 or positional c,a,b,m")
    s.add_argument("--values", help="raw q_1,...,q_N (truncated computations only)")
    s.add_argument("--truncate", type=_positive_int, help="largest truncation N for the CSV table")

    s = sub.add_parser("orbit", parents=[common], help="cyclic orbit channel of a seed state")
    s.add_argument("--dim", type=_positive_int, required=True)
    s.add_argument("--state", type=Path, required=True)

    s = sub.add_parser("fourier", parents=[common], help="Fourier-coefficient channel")
    s.add_argument("--coeffs", type=Path)
    fsub = s.add_subparsers(dest="fourier_command")
    d = fsub.add_parser("demo", parents=[common], help="capacity discontinuity table")
    d.add_argument("--C", dest="c_target", type=_positive_float, default=1.0)
    d.add_argument("--n", dest="n_values", type=_int_list, default=[100, 10_000, 1_000_000])

    s = sub.add_parser("truncation-study", parents=[common], help="spectral truncations of a channel")
    s.add_argument("--channel", type=Path, help="channel file (default: built-in 16-level test channel)")
    s.add_argument("--inputs", type=_positive_int, default=100)
    return p


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        cfg[k] = str(v) if isinstance(v, Path) else v
    return cfg


def _scale(x: float, base: str) -> float:
    return x / math.log(2) if base == "bits" else x


def _load(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _emit(args, doc):
    text = io.dumps(doc)
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, header, rows, default_stdout: bool):
    text = io.rows_to_csv(header, rows)
    if args.csv:
        args.csv.write_text(text)
    elif default_stdout:
        sys.stdout.write(text)


def _parse_params(text: str) -> dict:
    names = ("c", "a", "b", "m")
    out = {}
    for i, item in enumerate(t for t in text.split(",") if t):
        key, sep, val = item.partition("=")
        if not sep:
            if i >= len(names):
                raise ValidationError(f"too many positional parameters in {text!r}")
            key, val = names[i], item
        if key.strip() not in names:
            raise ValidationError(f"unknown parameter {key!r}")
        out[key.strip()] = float(val)
    return out


def cmd_capacity(args) -> int:
    ch = io.channel_from_json(_load(args.channel))
    cfg = _config(args)
    try:
        rep = solve_capacity(ch, tol=args.tol, max_iter=args.max_iter)
        code = EXIT_OK
    except NotConverged as exc:
        rep, code = exc.report, EXIT_NOT_CONVERGED
    doc = io.report_to_json(rep, cfg)
    doc["capacity"] = io.real_to_json(_scale(rep.capacity_nats, args.log_base))
    doc["log_base"] = args.log_base
    _emit(args, doc)
    return code


def cmd_verify(args) -> int:
    ch = io.channel_from_json(_load(args.channel))
    old = io.report_from_json(_load(args.report))
    rep = evaluate(ch, old.optimal_p / old.optimal_p.sum())
    check = verify_maximal_distance(rep, args.support_tol, args.dist_tol)
    ok = check.ok and rep.duality_gap <= args.tol
    _emit(args, {
        "ok": ok,
        "maximal_distance_ok": check.ok,
        "witnesses": check.witnesses,
        "capacity_nats": io.real_to_json(rep.capacity_nats),
        "reported_capacity_nats": io.real_to_json(old.capacity_nats),
        "duality_gap": io.real_to_json(rep.duality_gap),
        "config": _config(args),
    })
    return EXIT_OK if ok else EXIT_FAIL


def cmd_family(args) -> int:
    cfg = _config(args)
    if args.values is not None:
        if args.kind:
            raise ValidationError("give either --class or --values")
        seq = FiniteSequence(tuple(float(v) for v in args.values.split(",") if v))
        n_max = args.truncate or len(seq.values)
        if n_max > len(seq.values):
            raise ValidationError("--truncate exceeds the number of values")
        doc = {"sequence": {"values": list(seq.values)}, "config": cfg}
    else:
        if not args.kind:
            raise ValidationError("--class or --values is required")
        seq = QSequence(args.kind, **_parse_params(args.params))
        an = classify(seq)
        doc = {k: io.real_to_json(v) if isinstance(v, float) else v for k, v in an.to_dict().items()}
        doc["omega_head"] = [float(x) for x in an.omega_head]
        if an.case in ("A", "B", "C"):
            enc = omega_entropy_enclosure(seq, an, 1000)
            doc["omega_entropy_enclosure"] = [io.real_to_json(enc.lo), io.real_to_json(enc.hi)]
        doc["capacity"] = io.real_to_json(_scale(an.capacity_nats, args.log_base))
        doc["log_base"] = args.log_base
        doc["sequence"] = {"class": seq.kind, "c": seq.c, "a": seq.a, "b": seq.b, "m": seq.m}
        doc["config"] = cfg
        io.validate(doc, "family")
        n_max = args.truncate
    code = EXIT_OK
    if n_max:
        try:
            rows = family_convergence(seq, family_schedule(n_max), tol=args.tol, max_iter=args.max_iter)
        except NotConverged as exc:
            log.error("%s", exc)
            rows, code = [], EXIT_NOT_CONVERGED
        scaled = [(r.n, r.lambda_n, _scale(r.entropy_rho_n, args.log_base), _scale(r.capacity_n, args.log_base), r.gap_n) for r in rows]
        _emit_csv(args, ("n", "lambda_n", "H_rho_n", "C_N", "gap_N"), scaled, default_stdout=False)
        doc["convergence"] = [[io.real_to_json(x) for x in r] for r in scaled]
    _emit(args, doc)
    return code


def cmd_orbit(args) -> int:
    sigma = io.state_from_json(_load(args.state))
    if sigma.shape[0] != args.dim:
        raise ValidationError(f"state has dimension {sigma.shape[0]}, --dim is {args.dim}")
    ch = OrbitChannel(sigma)
    res = orbit_capacity(ch)
    code = EXIT_OK
    try:
        rep = solve_capacity(ch.as_cq(), tol=args.tol, max_iter=args.max_iter)
    except NotConverged as exc:
        rep, code = exc.report, EXIT_NOT_CONVERGED
    _emit(args, {
        "capacity_nats": io.real_to_json(res.capacity),
        "capacity": io.real_to_json(_scale(res.capacity, args.log_base)),
        "log_base": args.log_base,
        "omega": io.matrix_to_json(res.omega),
        "h_min": io.real_to_json(res.h_min),
        "is_ce": res.is_ce,
        "solver_capacity_nats": io.real_to_json(rep.capacity_nats),
        "solver_duality_gap": io.real_to_json(rep.duality_gap),
        "config": _config(args),
    })
    return code


def cmd_fourier(args) -> int:
    if args.fourier_command == "demo":
        rows = discontinuity_demo(args.c_target, args.n_values)
        table = [(r.n, r.q_n, _scale(r.capacity, args.log_base), r.coeff_distance) for r in rows]
        _emit_csv(args, ("n", "q_n", "capacity_n", "coeff_distance"), table, default_stdout=not args.output)
        if args.output:
            _emit(args, {
                "rows": [[io.real_to_json(x) for x in r] for r in table],
                "limit_capacity": 0.0,
                "config": _config(args),
            })
        return EXIT_OK
    if args.coeffs is None:
        raise ValidationError("--coeffs is required unless the demo subcommand is used")
    res = fourier_capacity(io.fourier_from_json(_load(args.coeffs)))
    _emit(args, {
        "capacity_nats": io.real_to_json(res.capacity),
        "capacity": io.real_to_json(_scale(res.capacity, args.log_base)),
        "log_base": args.log_base,
        "omega_eigenvalues": [float(x) for x in res.omega_eigenvalues],
        "config": _config(args),
    })
    return EXIT_OK


def cmd_truncation_study(args) -> int:
    ch = io.channel_from_json(_load(args.channel)) if args.channel else decaying_channel(seed=args.seed)
    try:
        full, rows = truncation_study(ch, tol=args.tol, inputs=args.inputs, seed=args.seed, max_iter=args.max_iter)
    except NotConverged as exc:
        log.error("%s", exc)
        return EXIT_NOT_CONVERGED
    table = [(r.n, _scale(r.capacity_n, args.log_base), r.gap_n, r.sup_trace_dist_n) for r in rows]
    _emit_csv(args, ("n", "capacity_n", "gap_n", "sup_trace_dist_n"), table, default_stdout=not args.output)
    if args.output:
        doc = io.report_to_json(full, _config(args))
        doc["rows"] = [[io.real_to_json(x) for x in r] for r in table]
        _emit(args, doc)
    return EXIT_OK


COMMANDS = {
    "capacity": cmd_capacity,
    "verify": cmd_verify,
    "family": cmd_family,
    "orbit": cmd_orbit,
    "fourier": cmd_fourier,
    "truncation-study": cmd_truncation_study,
}


def main(argv=None) -> int:
    level = os.environ.get("CHI_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ChicapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
