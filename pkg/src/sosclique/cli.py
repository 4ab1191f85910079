"""Command-line entry point: ``sosclique <subcommand> [flags]``.

Exit status is 0 on success, 1 when a check fails and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import __version__
from .bounds import BOUNDS, delta_norm_budget, k_threshold, l_norm_budget
from .certificate import (
    CertificateParams,
    DegenerateCertificateError,
    DegenerateCertificateWarning,
    MomentFunctional,
    NotPSDError,
    build_exm,
    build_expectation,
    build_full_moment_matrix,
    build_grigoriev,
    build_l,
    build_m,
    build_m_prime,
    check_axioms,
    check_kernel_vectors,
    decompose,
    dump_matrix,
    filled_parts,
    format_rational,
    full_index,
    gram_feasibility,
    load_matrix,
)
from .combinat import colex_subsets, format_subset
from .experiments import (
    CapacityError,
    TrialConfig,
    concentration_cliques,
    concentration_degree,
    exact_expectation_oracle,
    gap_probe,
    norm_r_a,
    psd_frequency,
)
from .graphs import Graph, format_graph, plant_clique, read_graph, sample_gnp_half
from .spectra import eigenvalues_symmetric

__all__ = ["main", "run", "build_parser", "UsageError"]

SUBCOMMANDS = ("gen", "matrix", "decompose", "spectrum", "verify", "bounds", "experiment")
TARGETS = ("m", "mprime", "e", "exm", "l", "delta", "full", "grigoriev")
EXPERIMENTS = ("psd", "cliques", "degree", "norm", "oracle", "gap")


class UsageError(Exception):
    """Bad flag combination; reported with exit status 2."""


def _epsilon(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"--epsilon must lie in (0, 1), got {text}")
    return value


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--n", type=int, help="number of vertices")
    p.add_argument("--r", type=int, help="certificate level (degree 2r)")
    p.add_argument("--k", type=int, help="planted clique size / pseudo-objective")
    p.add_argument("--a", type=int, help="clique or R_a size")
    p.add_argument("--i", type=int, help="size of the conditioning set")
    p.add_argument("--seed", type=int, default=0, help="graph seed or master seed (default 0)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--epsilon", type=_epsilon, default=0.05)
    p.add_argument("--psd-tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--graph", help="graph file")
    p.add_argument("--matrix", help="matrix CSV dump")
    p.add_argument("--constant-c", type=float, default=1.0)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="sosclique", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(SUBCOMMANDS) + "}")

    sub.add_parser("gen", parents=[common], help="sample G(n,1/2), optionally plant a k-clique")
    p = sub.add_parser("matrix", parents=[common], help="build and dump a certificate matrix")
    p.add_argument("--target", choices=TARGETS, default="m")
    sub.add_parser("decompose", parents=[common], help="split M' into E + L + Delta")
    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues of a dumped or built matrix")
    p.add_argument("--target", choices=TARGETS, default="mprime")
    p.add_argument("--method", choices=("auto", "jacobi", "lapack"), default="auto")
    sub.add_parser("verify", parents=[common], help="exact axiom/kernel checks and Gram feasibility")
    p = sub.add_parser("bounds", parents=[common], help="evaluate a closed-form bound")
    p.add_argument("--name", choices=sorted(BOUNDS), required=True)
    p.add_argument("--y", type=float, help="trace-method exponent")
    p.add_argument("--z", type=float, help="trace-method log exponent")
    p.add_argument("--b", type=float, help="trace-method constant B")
    p.add_argument("--t", type=float, help="McDiarmid deviation")
    p.add_argument("--lipschitz", type=float, help="McDiarmid bounded difference")
    p = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    p.add_argument("name", choices=EXPERIMENTS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--inject-complete", action="store_true")
    return parser


def _need(args, *names: str) -> None:
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name) is None]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join(missing)}")


def _meta(args) -> dict:
    flags = {key: value for key, value in sorted(vars(args).items()) if key != "command"}
    return {"tool_version": __version__, "command": args.command, "flags": flags, "seed": args.seed}


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_default) + "\n"


def _default(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (set, frozenset, tuple)):
        return list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _csv_lines(meta: dict, header, rows) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True, default=_default)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _key_values(args, payload: dict) -> str:
    """Report as JSON, or as flattened ``key,value`` CSV rows."""
    if args.format == "json":
        return _json({"meta": _meta(args), **payload})
    rows = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for key, inner in value.items():
                walk(f"{prefix}.{key}" if prefix else str(key), inner)
        else:
            rows.append([prefix, json.dumps(value, default=_default) if isinstance(value, (list, tuple)) else
                         _default(value) if isinstance(value, (Fraction, np.generic)) else value])

    walk("", payload)
    return _csv_lines(_meta(args), ["key", "value"], rows)


def _load_graph(args) -> Graph:
    _need(args, "graph")
    try:
        graph = read_graph(args.graph)
    except OSError as exc:
        raise UsageError(f"cannot read graph file: {exc}") from exc
    if args.n is not None and args.n != graph.n:
        raise UsageError(f"--n {args.n} disagrees with the graph file (n={graph.n})")
    return graph


def _params(args, n: int) -> CertificateParams:
    _need(args, "r", "k")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateCertificateWarning)
        return CertificateParams(n, args.r, args.k)


def _build_target(args, target: str):
    """``(matrix, labels)`` for a matrix target; graph-free targets need only ``--n``."""
    if target in ("e", "exm", "grigoriev"):
        _need(args, "n")
        n = args.n
        params = _params(args, n)
        if target == "grigoriev":
            return build_grigoriev(n, params.r, params.k), full_index(n, params.r)
        builder = build_expectation if target == "e" else build_exm
        return builder(params), _r_labels(n, params.r)
    graph = _load_graph(args)
    params = _params(args, graph.n)
    if target == "full":
        return build_full_moment_matrix(graph, params), full_index(graph.n, params.r)
    if target == "m":
        matrix = build_m(graph, params)
    elif target == "mprime":
        matrix = build_m_prime(graph, params)
    elif target == "l":
        matrix = build_l(graph, params)
    else:
        matrix = decompose(graph, params).delta
    return matrix, _r_labels(graph.n, params.r)


def _r_labels(n: int, r: int) -> list[tuple[int, ...]]:
    return [tuple(row) for row in colex_subsets(n, r).tolist()]


def _matrix_text(args, matrix, labels, extra: dict | None = None) -> str:
    meta = {**_meta(args), **(extra or {})}
    if args.format == "json":
        entries = [[format_rational(matrix.entry(i, j)) for j in range(len(labels))] for i in range(len(labels))]
        return _json({"meta": meta, "labels": [format_subset(s) for s in labels], "entries": entries})
    buf = io.StringIO()
    dump_matrix(matrix, labels, buf, meta)
    return buf.getvalue()


# subcommands -------------------------------------------------------------------

def _cmd_gen(args) -> int:
    _need(args, "n")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    graph = sample_gnp_half(args.n, args.seed)
    if args.k is not None:
        if not 1 <= args.k <= args.n:
            raise UsageError("--k must lie in [1, n]")
        graph = plant_clique(graph, args.k, args.seed)
    _emit(args, format_graph(graph))
    if args.out:
        # the graph format has no comment syntax, so provenance goes to a sidecar
        with open(args.out + ".meta.json", "w") as fh:
            fh.write(_json(_meta(args)))
    return 0


def _cmd_matrix(args) -> int:
    matrix, labels = _build_target(args, args.target)
    _emit(args, _matrix_text(args, matrix, labels, {"target": args.target}))
    return 0


def _cmd_decompose(args) -> int:
    graph = _load_graph(args)
    params = _params(args, graph.n)
    parts = decompose(graph, params)
    holds = parts.identity_holds()
    labels = _r_labels(graph.n, params.r)
    written = {}
    if args.out:
        stem, _ = os.path.splitext(args.out)
        for name in ("e", "l", "delta"):
            path = f"{stem}_{name}.csv"
            dump_matrix(getattr(parts, name), labels, path, {**_meta(args), "target": name})
            written[name] = path
    report = {"identity_holds": holds, "dimension": len(labels), "written": written,
              "delta_max_abs": str(parts.delta.max_abs()), "l_max_abs": str(parts.l.max_abs())}
    text = _key_values(args, report)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if holds else 1


def _cmd_spectrum(args) -> int:
    extra = {}
    if args.matrix:
        try:
            dump = load_matrix(args.matrix)
        except OSError as exc:
            raise UsageError(f"cannot read matrix file: {exc}") from exc
        matrix = dump.matrix
        extra["source_metadata"] = dump.metadata
    else:
        matrix, _ = _build_target(args, args.target)
        extra["target"] = args.target
    report = eigenvalues_symmetric(matrix, tol=args.psd_tol, method=args.method)
    meta = {**_meta(args), **extra}
    if args.format == "json":
        payload = {"meta": meta, **report.to_dict(include_eigenvalues=True), "method": report.method}
        _emit(args, _json(payload))
    else:
        lam = report.eigenvalues
        rows = [[idx, f"{x:.17g}", f"{x * report.scale:.17g}"] for idx, x in enumerate(lam)]
        summary = {k: v for k, v in report.to_dict().items()}
        _emit(args, _csv_lines({**meta, "summary": summary}, ["index", "normalized", "eigenvalue"], rows))
    return 0


def _cmd_verify(args) -> int:
    graph = _load_graph(args)
    params = _params(args, graph.n)
    functional = MomentFunctional(graph, params)
    axioms = check_axioms(functional)
    full = build_full_moment_matrix(graph, params)
    kernel = check_kernel_vectors(full, graph, params)
    try:
        gram = gram_feasibility(full, graph, params)
        gram_status = "feasible" if gram.feasible else "infeasible"
        gram_report = gram.as_dict()
    except DegenerateCertificateError as exc:
        gram_status, gram_report = "degenerate", {"message": str(exc)}
    except NotPSDError as exc:
        gram_status, gram_report = "not_psd", {"message": str(exc)}
    report = {
        "axioms": {"ok": axioms.ok, "checked": axioms.checked,
                   "non_clique": [format_subset(s) for s in axioms.non_clique],
                   "recurrence": [format_subset(s) for s in axioms.recurrence]},
        "kernel": {"ok": kernel.ok, "dimension": kernel.dimension,
                   "kernel_lower_bound": kernel.kernel_lower_bound,
                   "recurrence_failures": [format_subset(s) for s in kernel.recurrence_failures],
                   "non_clique_failures": [format_subset(s) for s in kernel.non_clique_failures]},
        "gram": {"status": gram_status, **gram_report},
    }
    _emit(args, _key_values(args, report))
    return 0 if axioms.ok and kernel.ok and gram_status != "infeasible" else 1


def _cmd_bounds(args) -> int:
    name = args.name
    eps = args.epsilon
    if name == "trace":
        _need(args, "a", "y", "z", "b", "n")
        report = BOUNDS[name](args.a, args.y, args.z, args.b, args.n, eps)
    elif name in ("r_a", "clique_count"):
        _need(args, "a", "n")
        report = BOUNDS[name](args.a, args.n, eps)
    elif name in ("degree", "degree_mcdiarmid"):
        _need(args, "r", "i", "n")
        report = BOUNDS[name](args.r, args.i, args.n, eps)
    elif name == "mcdiarmid":
        _need(args, "n", "lipschitz", "t")
        report = BOUNDS[name](args.n, args.lipschitz, args.t)
    elif name == "k_threshold":
        _need(args, "n", "r")
        value = k_threshold(args.n, args.r, args.constant_c)
        payload = {"name": name, "inputs": {"n": args.n, "r": args.r, "constant_c": args.constant_c},
                   "value": value, "valid": True}
        _emit(args, _key_values(args, payload))
        return 0
    else:
        _need(args, "n", "r", "k")
        fn = l_norm_budget if name == "l_budget" else delta_norm_budget
        report = fn(args.n, args.r, args.k, args.constant_c)
    _emit(args, _key_values(args, report.to_dict()))
    return 0


def _config(args) -> TrialConfig:
    _need(args, "n")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    return TrialConfig(n=args.n, r=args.r if args.r is not None else 1,
                       k=args.k if args.k is not None else 2, trials=args.trials,
                       master_seed=args.seed, epsilon=args.epsilon, psd_tol=args.psd_tol)


def _cmd_experiment(args) -> int:
    name = args.name
    if name == "oracle":
        _need(args, "n", "r", "k")
        report = exact_expectation_oracle(args.n, args.r, args.k)
        # report-only experiments always write JSON
        _emit(args, _json({"meta": _meta(args), **report.to_dict()}))
        return 0 if report.passed else 1
    if name == "gap":
        _need(args, "n", "r")
        lo = args.k_min if args.k_min is not None else 2 * args.r
        hi = args.k_max if args.k_max is not None else args.n
        probe = gap_probe(args.n, args.r, args.seed, range(lo, hi + 1), psd_tol=args.psd_tol)
        _emit(args, _json({"meta": _meta(args), **probe.to_dict()}))
        return 0
    config = _config(args)
    if name == "psd":
        _need(args, "r", "k")
        report = psd_frequency(config, inject_complete=args.inject_complete, workers=args.workers)
        failed = report.violation_count > 0
    elif name == "cliques":
        _need(args, "a")
        report = concentration_cliques(config, args.a, workers=args.workers)
        failed = not report.summary["rate_ok"]
    elif name == "degree":
        _need(args, "r", "i")
        report = concentration_degree(config, args.i, workers=args.workers)
        failed = not report.summary["rate_ok"]
    else:
        _need(args, "a")
        report = norm_r_a(config, args.a, workers=args.workers)
        failed = not report.summary["rate_ok"]
    if args.format == "json":
        _emit(args, _json({"meta": _meta(args), **report.to_dict()}))
    else:
        text = report.to_csv({"flags": _meta(args)["flags"], "summary": report.summary})
        _emit(args, text)
    return 1 if failed else 0


_HANDLERS = {
    "gen": _cmd_gen,
    "matrix": _cmd_matrix,
    "decompose": _cmd_decompose,
    "spectrum": _cmd_spectrum,
    "verify": _cmd_verify,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (UsageError, CapacityError, ValueError, OverflowError) as exc:
        parser.print_usage(sys.stderr)
        print(f"sosclique {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
