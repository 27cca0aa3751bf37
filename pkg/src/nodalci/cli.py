"""Command-line interface: ``nodalci <subcommand> ...``.

Exit status: 0 when everything ran and every check passed, 1 when a check
failed (the failing checks are named on stderr), 2 on input errors.
Output is JSON with sorted keys unless ``--format csv`` is requested.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field as dc_field

from . import __version__
from .cayley import (
    BudgetExceededError,
    CompleteIntersection,
    NodeRecord,
    NotIsolatedLiftError,
    NotSingularError,
    certify_node,
    find_singular_points,
    hypersurface_smooth_certificate,
    lift_node,
)
from .defect import (
    DEFAULT_PRIMES,
    NoDefectDirectionError,
    build_v_family,
    defect_of_ci,
    inequality_suite,
    node_lower_bound,
    restrict_W,
    vl_hilbert,
)
from .fields import QQ, parse_field
from .generators import FAMILIES, Example, GenerationError, generate
from .hilbert import PointSet, hilbert_table_of_points
from .macaulay import OutOfRangeError, down, expand, growth_up, low_degree_bound, shrink
from .polyring import CIConfig

FIELD_ENV = "NODALCI_FIELD"
PRIMES_ENV = "NODALCI_PRIMES"


class InputError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict
    seeds: list = dc_field(default_factory=list)
    fields: list = dc_field(default_factory=list)
    inputs: list = dc_field(default_factory=list)
    outputs: list = dc_field(default_factory=list)
    tool_version: str = __version__
    wall_clock: float | None = None

    def to_json(self):
        data = asdict(self)
        if self.wall_clock is None:
            del data["wall_clock"]
        return data


def _plain(x):
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_plain) + "\n"


def _read_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc.msg} at line {exc.lineno} column {exc.colno}") from exc


def _field_arg(value):
    try:
        return parse_field(value)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _default_field():
    return os.environ.get(FIELD_ENV, "q")


def _primes(args):
    if getattr(args, "primes", None):
        text = args.primes
    else:
        text = os.environ.get(PRIMES_ENV)
    if not text:
        return DEFAULT_PRIMES
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad prime list {text!r}") from exc


def _degrees(text):
    try:
        degs = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad degree list {text!r}") from exc
    return degs


def _degree_range(text):
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad degree range {text!r}; use LO..HI or a comma list") from exc


# ---------------------------------------------------------------------------
# subcommands


def cmd_macaulay(args):
    if args.d is None or args.c is None:
        raise InputError("macaulay needs --c and --d")
    if args.d <= 0 or args.c < 0:
        raise InputError("need c >= 0 and d >= 1")
    exp = expand(args.c, args.d)
    out = {
        "c": args.c,
        "d": args.d,
        "epsilons": list(exp.coefficients),
        "growth_up": growth_up(args.c, args.d),
        "shrink": shrink(args.c, args.d),
        "down": down(args.c, args.d) if args.d >= 2 else None,
    }
    if args.action == "bound":
        if args.k is None:
            raise InputError("macaulay bound needs --k")
        try:
            out["low_degree_bound"] = low_degree_bound(args.c, args.d, args.k)
        except OutOfRangeError as exc:
            raise InputError(str(exc)) from exc
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        out["k"] = args.k
    return out, [], None


def cmd_hilbert(args):
    data = _read_json(args.points)
    field = _field_arg(args.field or (data.get("field") if isinstance(data, dict) else None) or _default_field())
    pts = data["points"] if isinstance(data, dict) else data
    try:
        delta = PointSet(field, [[field.from_json(x) if isinstance(x, list) else field.coerce(x) for x in p] for p in pts])
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"bad point set: {exc}") from exc
    degs = _degree_range(args.degrees)
    table = hilbert_table_of_points(delta, max(degs), min(degs))
    table.label = f"points:{len(delta)}"
    return {"hilbert": table.to_json(), "points": len(delta), "field": field.name}, [], [table]


def _load_ci(path, field=None):
    data = _read_json(path)
    if isinstance(data, dict) and "ci" in data:
        data = data["ci"]
    try:
        return CompleteIntersection.from_json(data, field)
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad complete intersection in {path}: {exc}") from exc


def cmd_find_nodes(args):
    ci = _load_ci(args.input)
    field = _field_arg(args.field or "fp:5")
    if field.characteristic == 0 or getattr(field, "degree", 1) != 1:
        raise InputError("find-nodes scans over a prime field fp:<p>; use --ext for extensions")
    subspace = None
    if args.on_plane:
        plane = _read_json(args.on_plane)
        subspace = plane["basis"] if isinstance(plane, dict) else plane
    scans = []
    result = None
    for k in range(1, args.ext + 1):
        try:
            result = find_singular_points(ci, field.p, k, subspace=subspace, budget=args.budget, jobs=args.jobs)
        except BudgetExceededError as exc:
            raise InputError(f"scan over extension degree {k} needs {exc.required} points (budget {exc.budget})") from exc
        scans.append(result.summary())
    F = result.field
    cif = ci.change_field(F)
    nodes = []
    for pt in result.points:
        rec = {"p": [F.to_json(x) for x in pt]}
        try:
            nd = lift_node(cif, pt)
            ok = certify_node(cif, nd)
            rec = nd.to_json()
            rec["certified"] = ok
        except NotIsolatedLiftError as exc:
            rec["certified"] = False
            rec["fiber_dimension"] = exc.fiber_dimension
        nodes.append(rec)
    out = {"field": F.name, "nodes": nodes, "scans": scans, "encoding": "integer codes of field elements"}
    return out, [field.name, F.name], None


def _nodes_from_file(path, ci):
    data = _read_json(path)
    if isinstance(data, dict) and "nodes" in data:
        data = data["nodes"]
    if not isinstance(data, list):
        raise InputError(f"{path} must contain a list of nodes")
    nodes = []
    for i, item in enumerate(data):
        try:
            raw = item["p"] if isinstance(item, dict) else item
            p = [ci.field.from_json(x) if isinstance(x, list) else ci.field.coerce(x) for x in raw]
            nd = lift_node(ci, p)
        except (NotSingularError, NotIsolatedLiftError, KeyError, ValueError, TypeError) as exc:
            raise InputError(f"node {i} in {path}: {exc}") from exc
        if not certify_node(ci, nd):
            raise InputError(f"node {i} in {path} is not an A_1 point (hessian rank {nd.hessian_rank})")
        nodes.append(nd)
    return nodes


def _full_pipeline(ci, nodes, seed, primes, partial_smooth=None):
    report = defect_of_ci(ci, nodes, primes, partial_smooth=partial_smooth)
    cfg = ci.config
    extra = {}
    try:
        R = restrict_W(ci, nodes, seed=seed, field=primes[0])
    except ValueError as exc:
        report.notes.append(f"hyperplane restriction skipped: {exc}")
        return report, extra
    report.tables["W"] = R.h_W
    report.tables["W_prime"] = R.h_Wprime
    report.checks["partial_sum_chain"] = R.chain_ok
    report.checks["restriction_difference_oracle"] = R.oracle_ok
    extra["restriction"] = R.to_json()
    try:
        V = build_v_family(cfg, R, seed=seed)
    except NoDefectDirectionError as exc:
        report.notes.append(str(exc))
        return report, extra
    report.tables["V"] = V.h_V
    report.tables["FcV"] = V.h_Fc
    report.checks["filtration_identity"] = V.filtration_ok
    report.checks["gorenstein_symmetry"] = V.symmetric
    extra["v_family"] = V.to_json()
    extra["inequalities"] = inequality_suite(V)
    extra["condition2"] = {
        "given_generators": V.condition2,
        "all_generator_choices": V.condition2_all_choices,
        "sampled_changes": V.generator_samples,
        "failing_samples": V.generator_failures,
    }
    extra["vl_hilbert"] = {str(k): vl_hilbert(cfg, k) for k in range(0, V.top + 2)}
    return report, extra


def cmd_defect(args):
    ci = _load_ci(args.ci)
    if ci.field != QQ:
        raise InputError("defect expects a complete intersection over q")
    nodes = _nodes_from_file(args.nodes or args.ci, ci)
    primes = _primes(args)
    smooth = hypersurface_smooth_certificate(ci.equations[0]) if ci.config.c == 2 else None
    if args.full_report:
        report, extra = _full_pipeline(ci, nodes, args.seed, primes, smooth)
    else:
        report, extra = defect_of_ci(ci, nodes, primes, exact=args.exact, partial_smooth=smooth), {}
    out = report.to_json()
    out.update(extra)
    return out, [f"fp:{p}" for p in primes], list(report.tables.values())


def cmd_generate(args):
    degs = _degrees(args.degrees)
    try:
        ex = generate(args.family, degs, args.seed)
    except (ValueError, GenerationError) as exc:
        raise InputError(str(exc)) from exc
    data = ex.to_json()
    if args.out:
        if len(args.out) != 3:
            raise InputError("--out takes three paths: ci.json nodes.json provenance.json")
        for path, key in zip(args.out, ("ci", "nodes", "provenance")):
            with open(path, "w") as fh:
                fh.write(_dump(data[key]))
        return {"written": list(args.out), "family": args.family, "nodes": len(ex.nodes)}, ["q"], None
    return data, ["q"], None


def _verify_example(ex: Example, seed, primes):
    ci, nodes, prov = ex.ci, ex.nodes, ex.provenance
    cfg = ci.config
    report, extra = (
        _full_pipeline(ci, nodes, seed, primes, prov.partial_ci_smooth)
        if nodes
        else (defect_of_ci(ci, nodes, primes, partial_smooth=prov.partial_ci_smooth), {})
    )
    report.checks["expected_nodes"] = len(nodes) == prov.expected_nodes
    if prov.expected_defect is not None:
        report.checks["expected_defect"] = report.defect == prov.expected_defect
    if prov.family == "plane":
        report.checks["nodes_equal_bound"] = len(nodes) == node_lower_bound(cfg)
        ineq = extra.get("inequalities", {})
        for name, res in ineq.items():
            report.checks[f"inequality_{name}"] = res["holds"]
    out = report.to_json()
    out.update(extra)
    out["provenance"] = prov.to_json()
    return report, out


def cmd_verify_bound(args):
    degs = _degrees(args.degrees)
    try:
        ex = generate(args.family, degs, args.seed)
    except (ValueError, GenerationError) as exc:
        raise InputError(str(exc)) from exc
    report, out = _verify_example(ex, args.seed, _primes(args))
    out["passed"] = report.ok
    return out, ["q"] + [f"fp:{p}" for p in _primes(args)], list(report.tables.values())


def cmd_report(args):
    plan = [
        ("plane", (2, 2)),
        ("plane", (2, 3)),
        ("plane", (3, 3)),
        ("induced", (2, 2)),
        ("induced", (2, 3)),
        ("induced", (2, 4)),
        ("smooth", (2, 2)),
        ("smooth", (2, 3)),
    ]
    if args.quick:
        plan = [p for p in plan if p[1] != (3, 3)]
    primes = _primes(args)
    results = []
    tables = []
    ok = True
    for family, degs in plan:
        try:
            ex = generate(family, degs, args.seed)
        except GenerationError as exc:
            raise InputError(str(exc)) from exc
        report, out = _verify_example(ex, args.seed, primes)
        out["passed"] = report.ok
        ok &= report.ok
        results.append({"family": family, "degrees": list(degs), "report": out})
        tables.extend(report.tables.values())
    return {"examples": results, "passed": ok}, ["q"] + [f"fp:{p}" for p in primes], tables


COMMANDS = {
    "macaulay": cmd_macaulay,
    "hilbert": cmd_hilbert,
    "find-nodes": cmd_find_nodes,
    "defect": cmd_defect,
    "generate": cmd_generate,
    "verify-bound": cmd_verify_bound,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default=None, help="q | fp:<p> (default from $%s or q)" % FIELD_ENV)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for scans")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="record wall-clock time in the manifest")
    common.add_argument("--primes", default=None, help="comma-separated primes for rank computations")

    ap = argparse.ArgumentParser(prog="nodalci", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"nodalci {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("macaulay", parents=[common], help="Macaulay expansion and growth bounds")
    p.add_argument("action", choices=["expand", "growth", "bound"])
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, default=None)

    p = sub.add_parser("hilbert", parents=[common], help="Hilbert function of a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--degrees", default="0..4", help="LO..HI or comma list")

    p = sub.add_parser("find-nodes", parents=[common], help="scan for singular points over F_p^k")
    p.add_argument("--input", required=True)
    p.add_argument("--ext", type=int, default=1)
    p.add_argument("--on-plane", default=None, help="JSON list of spanning vectors of a linear subspace")
    p.add_argument("--budget", type=int, default=2_000_000)

    p = sub.add_parser("defect", parents=[common], help="defect from a node list")
    p.add_argument("--ci", required=True)
    p.add_argument("--nodes", default=None, help="node list; defaults to the nodes stored with --ci")
    p.add_argument("--full-report", action="store_true")
    p.add_argument("--exact", action="store_true", help="also compute ranks over Q")

    p = sub.add_parser("generate", parents=[common], help="generate an example family member")
    p.add_argument("--family", choices=sorted(FAMILIES), required=True)
    p.add_argument("--degrees", required=True)
    p.add_argument("--out", nargs="+", default=None)

    p = sub.add_parser("verify-bound", parents=[common], help="full pipeline on a generated example")
    p.add_argument("--family", choices=sorted(FAMILIES), default="plane")
    p.add_argument("--degrees", required=True)

    p = sub.add_parser("report", parents=[common], help="run every example family")
    p.add_argument("--quick", action="store_true", help="skip the slowest example")
    return ap


def _csv(tables) -> str:
    chunks = []
    for i, t in enumerate(tables or []):
        text = t.to_csv()
        chunks.append(text if i == 0 else text.split("\n", 1)[1])
    return "".join(chunks)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    start = time.perf_counter()
    inputs = [v for k, v in vars(args).items() if k in ("points", "input", "ci", "nodes", "on_plane") and v]
    try:
        out, fields, tables = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    manifest = RunManifest(
        command=args.command,
        config={k: v for k, v in sorted(vars(args).items()) if k not in ("command", "timing", "format")},
        seeds=[args.seed],
        fields=fields or [],
        inputs=inputs,
        outputs=list(getattr(args, "out", None) or []),
        wall_clock=round(time.perf_counter() - start, 3) if args.timing else None,
    )
    if args.format == "csv":
        if not tables:
            print("error: this command has no tables to export as CSV", file=sys.stderr)
            return 2
        sys.stdout.write(_csv(tables))
    else:
        out = dict(out)
        out["manifest"] = manifest.to_json()
        sys.stdout.write(_dump(out))
    failed = _failed_checks(out)
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def _failed_checks(out) -> list[str]:
    failed = []

    def walk(obj, path):
        if isinstance(obj, dict):
            if "checks" in obj and isinstance(obj["checks"], dict):
                for k, v in obj["checks"].items():
                    if v is False:
                        failed.append(f"{path}{k}")
            for k, v in obj.items():
                if k != "checks":
                    walk(v, f"{path}{k}.")
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(v, f"{path}{i}.")

    walk(out, "")
    if isinstance(out, dict) and out.get("passed") is False and not failed:
        failed.append("passed")
    return failed


if __name__ == "__main__":
    sys.exit(main())
