"""Command-line entry point: ``cornerbound <subcommand> [flags]``.

Every command produces one :class:`CommandResult`, printed either as an
aligned table or (``--json``) as a single JSON object. Exit codes: 0 ok,
1 domain or capacity error, 2 usage error, 3 certification failure.

Defaults may come from a JSON config file (``--config-file`` or the
``CORNERBOUND_CONFIG`` environment variable) shaped as
``{"<subcommand>": {"<flag_dest>": value}}``; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import constants, embeddings, family_oracle, partition_search, prime_split, product_compose, tree_concat
from .errors import CapacityError, CertificationError, CornerboundError, DomainError, SearchFailure, UsageError
from .rates import GrowthRate

CONFIG_ENV = "CORNERBOUND_CONFIG"
EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_CERT = 0, 1, 2, 3
SIG_DIGITS = 12


@dataclass
class CommandResult:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    status: dict = field(default_factory=lambda: {"state": "ok"})

    def add_rate(self, name: str, rate: GrowthRate) -> None:
        self.outputs[name] = {"base": rate.base, "log_base": rate.log_base}
        self.provenance[name] = rate.tag

    def add_value(self, name: str, value: Any, tag: str = "plumbing") -> None:
        self.outputs[name] = value
        self.provenance[name] = tag

    def fail(self, kind: str, message: str) -> None:
        self.status = {"state": "error", "kind": kind, "message": message}

    def as_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "provenance": self.provenance,
            "status": self.status,
        }


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so :func:`run` controls the exit code."""

    def error(self, message: str):
        raise UsageError(f"{message}\n{self.format_usage().strip()}")


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}") from None


# -- subcommands ------------------------------------------------------------------


def cmd_constants(args, res: CommandResult) -> int:
    x, _ = constants.psi2_argmax()
    for rec in constants.theorem_table():
        res.add_rate(rec.name, rec.rate)
    res.add_value("psi2 argmax", x, constants.TAGS["psi2"])
    res.add_value("psi via 1/delta(1/2, sqrt2/4)", constants.psi_from_delta(), "Theorem 1.3")
    for c in (1, 3):
        res.add_rate(f"forbidden intersection rho=0.5 sigma=0.25 c={c}",
                     partition_search.forbidden_intersection_base(0.5, 0.25, c))
    res.add_rate("forbidden intersection rho=0.5 sigma=0.15 c=1",
                 partition_search.forbidden_intersection_base(0.5, 0.15, 1))
    res.add_rate("symmetric 3-block plan rho=0.5 sigma=0.15",
                 partition_search.plan_rate(partition_search.PartitionPlan.symmetric(0.5, 0.15, 3), 0.5, 0.15))
    return EXIT_OK


BOUND_MODES = ("sunflower", "intersection", "clique")


def cmd_bound(args, res: CommandResult) -> int:
    kind = args.config
    if kind == "sunflower":
        res.add_rate("base", constants.sunflower_base(_need(args.k, "--k")))
    elif kind == "intersection":
        res.add_rate("base", partition_search.forbidden_intersection_base(
            _need(args.rho, "--rho"), _need(args.sigma, "--sigma"), args.c_class, args.allow_hypothetical))
    elif kind == "clique":
        res.add_rate("base", partition_search.clique_base(
            _need(args.rho, "--rho"), _need(args.sigma, "--sigma"), _need(args.k, "--k"), args.c_class))
    else:
        cfg = constants.ForbiddenConfig(kind, args.norm, args.k, tuple(args.scalings or ()), tuple(args.sides or ()))
        res.add_rate("base", constants.chromatic_base(cfg))
        res.add_value("norm", cfg.norm)
    return EXIT_OK


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required here")
    return value


def cmd_optimize(args, res: CommandResult) -> int:
    if args.plan:
        plan = partition_search.PartitionPlan.from_json(Path(args.plan).read_text())
        rate = partition_search.plan_rate(plan, args.rho, args.sigma, args.share_tol)
        res.add_rate("plan rate", rate)
        res.add_value("plan", json.loads(plan.to_json()))
        return EXIT_OK
    t0 = time.perf_counter()
    out = partition_search.optimize_plan(
        args.rho, args.sigma, args.k_blocks, starts=args.starts, seed=args.seed, xtol=args.xtol, max_iter=args.max_iter
    )
    res.add_rate("optimized rate", out.rate)
    res.add_rate("symmetric rate", out.symmetric_rate)
    res.add_value("improvement", out.improvement)
    res.add_value("plan", json.loads(out.plan.to_json()))
    res.add_value("local proportions", [list(b.local) for b in out.plan.blocks])
    res.add_value("evaluations", out.evaluations)
    res.add_value("seconds", time.perf_counter() - t0)
    if args.certify_n:
        res.add_value("finite certificate",
                      partition_search.finite_prime_certificate(out.plan, args.certify_n, args.rho, args.sigma))
    return EXIT_OK


def cmd_prime_split(args, res: CommandResult) -> int:
    if args.proportions:
        split = prime_split.proportional_prime_split(args.target, args.proportions)
    elif args.recipe:
        split = prime_split.four_prime_recipe(args.target)
    else:
        split = prime_split.near_equal_prime_split(args.target, args.parts)
    for key, value in split.as_dict().items():
        res.add_value(key, value)
    return EXIT_OK


def cmd_compose(args, res: CommandResult) -> int:
    p1 = product_compose.SuperRamseyParams(args.c1, args.eps1, args.m1)
    p2 = product_compose.SuperRamseyParams(args.c2, args.eps2, args.m2)
    comp = product_compose.composed_rate(p1, p2)
    res.add_value("eta", comp.eta, comp.rate.tag)
    res.add_rate("ratio base 1+eps'", comp.rate)
    res.add_value("c'", comp.params.c, comp.rate.tag)
    res.add_value("m'", comp.params.m, comp.rate.tag)
    res.add_value("summand log rates", list(comp.summand_log_rates), comp.rate.tag)
    return EXIT_OK


def cmd_embed(args, res: CommandResult) -> int:
    if args.simplex is not None:
        spec, side = embeddings.simplex_to_semicross(args.simplex, args.norm)
        res.add_value("scalings", list(spec.scalings))
        res.add_value("side", side)
        res.add_value("unit side rescale", 1 / side)
        return EXIT_OK
    if args.triangle:
        if len(args.triangle) != 3:
            raise UsageError(f"--triangle takes three side lengths, got {len(args.triangle)}")
        a, b, c = args.triangle
        if args.norm == "euclidean":
            res.add_value("class", embeddings.classify_triangle(a, b, c))
            spec = embeddings.euclidean_triangle_to_semicross(a, b, c)
        else:
            spec = embeddings.manhattan_triangle_to_semicross(a, b, c)
        res.add_value("scalings", list(spec.scalings))
        res.add_value("points", [list(p) for p in spec.points()])
        return EXIT_OK
    if args.points:
        pts = json.loads(Path(args.points).read_text())
        batons = embeddings.finite_set_to_grid(pts)
        res.add_value("batons", [list(b.scalings) for b in batons])
        return EXIT_OK
    raise UsageError("embed needs one of --simplex, --triangle or --points")


SUITES = ("tree-concat", "family", "all")


def _load_instances(path: str) -> list[list[tree_concat.SmallGraph]]:
    data = json.loads(Path(path).read_text())
    return [[tree_concat.SmallGraph.from_adjacency_lists(g) for g in inst] for inst in data]


def cmd_verify(args, res: CommandResult) -> int:
    reports = {}
    failed = False
    if args.suite in ("tree-concat", "all"):
        lemma = tree_concat.certify_tree_lemma(
            trials=args.trials, k=args.k, max_vertices=args.max_vertices, seed=args.seed,
            exhaustive=args.exhaustive, raise_on_violation=False)
        reports["tree lemma"] = lemma.as_dict()
        failed |= not lemma.ok
        instances = _load_instances(args.instances) if args.instances else tree_concat.random_instances(
            args.trials, args.k, args.max_vertices, args.max_product, args.seed)
        for shape in tree_concat.SHAPES:
            rep = _concat_with_budget(instances, shape, args.budget)
            reports[f"concat {shape}"] = rep.as_dict()
            failed |= not rep.ok
    if args.suite in ("family", "all"):
        suites = [
            family_oracle.symdiff_identity_suite(args.trials, min(args.max_n, 16), args.seed),
            family_oracle.shift_preservation_suite(args.trials, min(args.max_n, 10), 3, args.seed),
            family_oracle.complement_duality_suite(min(args.max_n, 6), args.seed),
            family_oracle.partition_identity_suite(args.trials, min(args.max_n, 8), 3, args.seed),
        ]
        for rep in suites:
            reports[rep.name] = rep.as_dict()
            failed |= not rep.ok
        if args.family:
            fam = family_oracle.SetFamily.from_text(Path(args.family).read_text())
            found = family_oracle.find_weak_sunflower(fam, args.sunflower_k)
            reports["family file"] = {
                "n": fam.n,
                "members": len(fam),
                "uniformity": fam.uniformity,
                "weak sunflower": None if found is None else list(found),
            }
    for name, rep in reports.items():
        res.add_value(name, rep, "plumbing")
    if failed:
        res.fail("certification", "at least one suite reported violations")
        return EXIT_CERT
    return EXIT_OK


def _concat_with_budget(instances, shape: str, budget: int) -> tree_concat.ConcatReport:
    report = tree_concat.ConcatReport(shape)
    for graphs in instances:
        value = tree_concat.max_orthogonal_free(graphs, shape, node_budget=budget).size
        slack = tree_concat.concat_bound(graphs) - value
        report.instances += 1
        if report.worst_slack is None or slack < report.worst_slack:
            report.worst_slack = slack
        if slack == 0:
            report.tight += 1
        if slack < 0:
            report.violations.append([g.adjacency_lists() for g in graphs])
    return report


# -- parser -------------------------------------------------------------------------


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    p = _Parser(prog="cornerbound", description="Exponential lower-bound constants and exact lemma checks.")
    p.add_argument("--json", action="store_true", help="emit one JSON object instead of a table")
    p.add_argument("--config-file", help=f"JSON defaults per subcommand (default: ${CONFIG_ENV})")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser, required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.set_defaults(handler=handler)
        subs[name] = sp
        return sp

    add("constants", cmd_constants, "named constants and the theorem table")

    sp = add("bound", cmd_bound, "chromatic, sunflower, intersection or clique bases")
    sp.add_argument("--config", required=True, choices=constants.KINDS + BOUND_MODES)
    sp.add_argument("--norm", default="euclidean", choices=constants.NORMS)
    sp.add_argument("--k", type=int)
    sp.add_argument("--scalings", type=_floats, help="semicross/baton scalings, comma separated")
    sp.add_argument("--sides", type=_floats, help="triangle side lengths, comma separated")
    sp.add_argument("--rho", type=float)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--c-class", type=int, default=1)
    sp.add_argument("--allow-hypothetical", action="store_true", help="permit the conjectural c=2 class")

    sp = add("optimize-partition", cmd_optimize, "optimize (or evaluate) a partition plan")
    sp.add_argument("--rho", type=float, default=0.5)
    sp.add_argument("--sigma", type=float, default=0.15)
    sp.add_argument("--k-blocks", type=int, default=3)
    sp.add_argument("--starts", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--xtol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=4000)
    sp.add_argument("--plan", help="JSON plan file to evaluate instead of optimizing")
    sp.add_argument("--share-tol", type=float, default=partition_search.SHARE_TOL)
    sp.add_argument("--certify-n", type=int, help="round the optimum at this n and realize r-s as primes")

    sp = add("prime-split", cmd_prime_split, "minimum-deviation prime decompositions")
    sp.add_argument("--target", type=int, required=True)
    sp.add_argument("--parts", type=int, default=3, choices=(2, 3, 4))
    sp.add_argument("--proportions", type=_floats, help="three proportions summing to 1")
    sp.add_argument("--recipe", action="store_true", help="four parts via one prime near n/4 plus three")

    sp = add("compose", cmd_compose, "compose two super-Ramsey parameter sets")
    for i in (1, 2):
        sp.add_argument(f"--c{i}", type=float, required=True)
        sp.add_argument(f"--eps{i}", type=float, required=True)
        sp.add_argument(f"--m{i}", type=int, required=True)

    sp = add("embed", cmd_embed, "semicross and baton embeddings")
    sp.add_argument("--norm", default="euclidean", choices=constants.NORMS)
    sp.add_argument("--triangle", type=_floats, help="three side lengths")
    sp.add_argument("--simplex", type=int, help="regular simplex dimension")
    sp.add_argument("--points", help="JSON file with a list of points to place on a grid")

    sp = add("verify", cmd_verify, "run exact property suites")
    sp.add_argument("--suite", default="all", choices=SUITES)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--k", type=int, default=2, help="graphs per tuple")
    sp.add_argument("--max-vertices", type=int, default=4)
    sp.add_argument("--max-product", type=int, default=16)
    sp.add_argument("--max-n", type=int, default=16, help="ground-set cap for family suites")
    sp.add_argument("--budget", type=int, default=tree_concat.DEFAULT_NODE_BUDGET, help="search node budget")
    sp.add_argument("--exhaustive", action="store_true", help="every labelled graph tuple, not samples")
    sp.add_argument("--instances", help="JSON list of instances, each a list of adjacency lists")
    sp.add_argument("--family", help="family file: header n=<int>, then hex bitmasks")
    sp.add_argument("--sunflower-k", type=int, default=3)
    return p, subs


def _load_config(path: str | None) -> dict:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return data


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    overrides = _load_config(args.config_file).get(args.subcommand, {})
    if overrides:
        known = {a.dest for a in subs[args.subcommand]._actions}
        unknown = set(overrides) - known
        if unknown:
            raise UsageError(f"unknown config keys for {args.subcommand}: {sorted(unknown)}")
        subs[args.subcommand].set_defaults(**overrides)
        args = parser.parse_args(argv)
    return args


# -- output ---------------------------------------------------------------------------


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.{SIG_DIGITS}g}"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def render_table(res: CommandResult) -> str:
    lines = [f"# {res.subcommand}  " + "  ".join(f"{k}={_fmt(v)}" for k, v in res.inputs.items())]
    rows = []
    for name, value in res.outputs.items():
        tag = res.provenance.get(name, "plumbing")
        if isinstance(value, dict) and set(value) == {"base", "log_base"}:
            rows.append((name, _fmt(value["base"]), _fmt(value["log_base"]), tag))
        else:
            rows.append((name, _fmt(value), "", tag))
    if rows:
        widths = [max(len(r[i]) for r in rows + [("name", "value", "log", "tag")]) for i in range(3)]
        lines.append(f"{'name':<{widths[0]}}  {'value':<{widths[1]}}  {'log':<{widths[2]}}  tag")
        for r in rows:
            lines.append(f"{r[0]:<{widths[0]}}  {r[1]:<{widths[1]}}  {r[2]:<{widths[2]}}  {r[3]}")
    if res.status["state"] != "ok":
        lines.append(f"error ({res.status['kind']}): {res.status['message']}")
    return "\n".join(lines)


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


# -- entry point -----------------------------------------------------------------------


def execute(argv: Sequence[str]) -> tuple[int, CommandResult]:
    """Parse and dispatch without printing; returns the exit code and the result."""
    names = ("constants", "bound", "optimize-partition", "prime-split", "compose", "embed", "verify")
    res = CommandResult(subcommand=next((a for a in argv if a in names), ""))
    try:
        # --json is accepted on either side of the subcommand
        args = parse_args([a for a in argv if a != "--json"])
        res.subcommand = args.subcommand
        res.inputs = {k: v for k, v in vars(args).items() if k not in ("handler", "subcommand", "json")}
        code = args.handler(args, res)
    except UsageError as exc:
        res.fail("usage", str(exc))
        code = EXIT_USAGE
    except CertificationError as exc:
        res.fail("certification", str(exc))
        code = EXIT_CERT
    except (DomainError, CapacityError, SearchFailure) as exc:
        res.fail(type(exc).__name__, str(exc))
        code = EXIT_DOMAIN
    except CornerboundError as exc:
        res.fail(type(exc).__name__, str(exc))
        code = EXIT_DOMAIN
    except OSError as exc:
        res.fail("usage", str(exc))
        code = EXIT_USAGE
    return code, res


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    if argv in ([], ["--json"]) or "-h" in argv or "--help" in argv:
        parser, subs = build_parser()
        target = next((subs[a] for a in argv if a in subs), parser)
        print(target.format_help())
        return EXIT_OK if argv and argv != ["--json"] else EXIT_USAGE
    code, res = execute(argv)
    if want_json:
        print(json.dumps(_jsonable(res.as_dict()), indent=2, default=str))
    else:
        out = render_table(res)
        print(out, file=sys.stdout if code == EXIT_OK else sys.stderr)
    return code


def main() -> None:
    raise SystemExit(run())
