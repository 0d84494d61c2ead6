"""Command-line front end.

Exit codes: 0 definite result (or "yes"), 1 definite "no", 2 unknown (a depth
or state cap was hit), 3 input error.

The tunable options (format, depth, state-cap, cap, radius, semiring, m-max,
alpha-depth) can also be set through environment variables: ``STEINBENCH_``
plus the option name in upper case with dashes turned into underscores, e.g.
``STEINBENCH_DEPTH=6`` or ``STEINBENCH_FORMAT=json``.
Flags given on the command line win.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import acceptance
from . import fingroupoid as fg
from . import groupkit
from . import selfsim as ss
from . import tightalg as ta
from .errors import DomainError, FiniteStateCapError, MalformedInputError, SizeCapError
from .semiring import (BOOLEAN, FiniteAlgebraTable, PrimeField, boolean_table, congruence_closure,
                       find_proper_principal, max_plus_table, prime_field_table, validate_axioms, zmod_table)

ENV_PREFIX = "STEINBENCH_"
EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INPUT)


def positive_int(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {n}")
    return n


def env_default(name, fallback, kind=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return fallback
    try:
        return kind(raw)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise InputError(f"environment variable {ENV_PREFIX}{name.upper().replace('-', '_')}: {exc}") from None


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise MalformedInputError(f"{path}: {exc.strerror}") from None


def json_or_file(text):
    """Inline JSON, or @path / a path to a JSON file."""
    if text.startswith("@"):
        return load_json(text[1:])
    stripped = text.strip()
    if stripped[:1] in "[{" or stripped == "null":
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"inline JSON: column {exc.colno}: {exc.msg}") from None
    return load_json(text)


def builtin_table(name):
    name = name.lower()
    if name in ("boolean", "b"):
        return boolean_table()
    if name == "maxplus":
        return max_plus_table()
    if name.startswith("f") and name[1:].isdigit():
        return prime_field_table(int(name[1:]))
    if name.startswith("z") and name[1:].isdigit():
        return zmod_table(int(name[1:]))
    raise MalformedInputError(f"unknown semiring {name!r}; try boolean, f<p>, z<n>, maxplus")


def coefficient_semiring(name):
    name = name.lower()
    if name in ("boolean", "b"):
        return BOOLEAN
    if name.startswith("f") and name[1:].isdigit():
        return PrimeField(int(name[1:]))
    return builtin_table(name)


def parse_group(text):
    text = text.lower()
    if text in ("1", "trivial"):
        return groupkit.trivial_group()
    if text.startswith("z") and text[1:].isdigit():
        return groupkit.cyclic_group(int(text[1:]))
    if text.startswith("s") and text[1:].isdigit():
        return groupkit.symmetric_group(int(text[1:]))
    raise MalformedInputError(f"unknown group {text!r}; try 1, z<n>, s<k>")


def semiring_from_args(args):
    if args.input:
        return FiniteAlgebraTable.load(args.input)
    if args.matrix:
        coeff = coefficient_semiring(args.builtin or "boolean")
        return groupkit.materialize_finite_algebra(coeff, parse_group(args.group), args.matrix, cap=args.cap)
    return builtin_table(args.builtin or "boolean")


def groupoid_from_args(args):
    if args.input:
        return fg.FiniteGroupoid.load(args.input)
    if args.builtin:
        return fg.groupoid_from_name(args.builtin)
    raise MalformedInputError("give --input FILE or --builtin NAME")


def parse_matrix(text):
    try:
        return [[int(x) for x in row.replace(",", " ").split()] for row in text.split(";")]
    except ValueError:
        raise MalformedInputError(f"bad matrix literal {text!r}; rows separated by ';'") from None


def system_from_args(args):
    if args.input:
        return ss.SelfSimilarSystem.load(args.input, state_cap=args.state_cap)
    if not args.builtin:
        raise MalformedInputError("give --input FILE or --builtin NAME")
    params = {}
    if args.katsura_a:
        params["A"] = parse_matrix(args.katsura_a)
    if args.katsura_b:
        params["B"] = parse_matrix(args.katsura_b)
    S = ss.builtin_system(args.builtin, params)
    S.state_cap = args.state_cap
    return S


def parse_triple(system, text):
    """JSON {"alpha","g","beta"}, or ``alpha;g;beta`` with comma-separated edges or a vertex id."""
    stripped = text.strip()
    if stripped.startswith("{") or stripped.startswith("@"):
        return ta.triple_from_json(system, json_or_file(stripped))
    parts = stripped.split(";")
    if len(parts) != 3:
        raise MalformedInputError(f"bad triple {text!r}; expected alpha;g;beta")
    return ta.triple(system, parts[0], parts[1], parts[2])


def parse_open_set(system, text):
    stripped = text.strip()
    if stripped.startswith("[") or stripped.startswith("@"):
        return ta.open_from_json(system, json_or_file(stripped))
    return ta.OpenSetElement.of(*(parse_triple(system, t) for t in stripped.split("|") if t.strip()))


def verdict_code(v: ta.TernaryVerdict):
    return {ta.TRUE: EXIT_OK, ta.FALSE: EXIT_NO, ta.UNKNOWN: EXIT_UNKNOWN}[v]


# ---------------------------------------------------------------------------
# Commands: each returns (exit code, report dict)
# ---------------------------------------------------------------------------

def cmd_semiring_check(args):
    table = semiring_from_args(args)
    violations = validate_axioms(table)
    report = {"semiring": table.name, "size": len(table), "valid": not violations,
              "unital": table.is_unital, "violations": [v.to_json() for v in violations]}
    return (EXIT_OK if not violations else EXIT_NO), report


def cmd_semiring_simple(args):
    table = semiring_from_args(args)
    violations = validate_axioms(table)
    if violations:
        raise DomainError(f"not a semiring: {violations[0].law} fails")
    witness = find_proper_principal(table) if len(table) > 1 else None
    simple = len(table) > 1 and witness is None
    report = {"semiring": table.name, "size": len(table), "congruence_simple": simple}
    if witness is not None:
        a, b = witness
        part = congruence_closure(table, [(a, b)])
        report["witness_pair"] = [table.carrier[a], table.carrier[b]]
        report["witness_blocks"] = len(part.blocks)
    return (EXIT_OK if simple else EXIT_NO), report


def cmd_groupoid_analyze(args):
    G = groupoid_from_args(args)
    report = fg.structural_analysis(G).to_json()
    report = {"groupoid": G.name, "units": len(G.units), "arrows": len(G), **report}
    return EXIT_OK, report


def cmd_groupoid_decompose(args):
    G = groupoid_from_args(args)
    dec = fg.decompose(G, coefficient_semiring(args.semiring))
    return (EXIT_OK if dec.report["ok"] else EXIT_NO), {"groupoid": G.name, **dec.to_json()}


def cmd_groupoid_simple(args):
    G = groupoid_from_args(args)
    r = fg.simplicity_check(G, coefficient_semiring(args.semiring), cap=args.cap)
    code = EXIT_OK if (r.by_theorem and r.by_bruteforce) else EXIT_NO
    return code, r.to_json()


def _element(system, args):
    return system.word(args.element)


def cmd_selfsim_act(args):
    S = system_from_args(args)
    g = _element(S, args)
    if args.xi:
        xi = S.graph.parse_infinite(args.xi)
        return EXIT_OK, {"element": str(g), "xi": str(xi), "image": str(ss.act_on_infinite(g, xi))}
    if not args.path:
        raise MalformedInputError("give --path or --xi")
    alpha = S.graph.parse_path(args.path)
    return EXIT_OK, {"element": str(g), "path": alpha.to_json(), "image": ss.act_on_path(g, alpha).to_json()}


def cmd_selfsim_cocycle(args):
    S = system_from_args(args)
    g = _element(S, args)
    if not args.path:
        raise MalformedInputError("give --path")
    alpha = S.graph.parse_path(args.path)
    return EXIT_OK, {"element": str(g), "path": alpha.to_json(), "section": ss.cocycle(g, alpha).to_json()}


def cmd_selfsim_sfp(args):
    S = system_from_args(args)
    g = _element(S, args)
    paths = ss.minimal_strongly_fixed(g, args.depth)
    return EXIT_OK, {"element": str(g), "depth": args.depth, "count": len(paths),
                     "paths": [p.to_json() for p in paths]}


def cmd_selfsim_equal(args):
    S = system_from_args(args)
    g, h = S.word(args.element), S.word(args.other)
    same = ss.equal(g, h)
    return (EXIT_OK if same else EXIT_NO), {"g": str(g), "h": str(h), "equal": same}


def cmd_tight_mul(args):
    S = system_from_args(args)
    s, t = parse_triple(S, args.s), parse_triple(S, args.t)
    p = ta.triple_multiply(s, t)
    return EXIT_OK, {"s": s.to_json(), "t": t.to_json(), "product": p.to_json(), "text": str(p)}


def cmd_tight_product(args):
    S = system_from_args(args)
    x, y = parse_open_set(S, args.x), parse_open_set(S, args.y)
    p = ta.open_product(x, y, args.depth)
    return EXIT_OK, {"product": p.to_json(), "text": str(p)}


def cmd_tight_equal(args):
    S = system_from_args(args)
    x, y = parse_open_set(S, args.x), parse_open_set(S, args.y)
    r = ta.open_equal(x, y, args.depth)
    return verdict_code(r.verdict), r.to_json()


def cmd_tight_fs(args):
    S = system_from_args(args)
    s = parse_triple(S, args.s)
    xi = S.graph.parse_infinite(args.xi)
    f, t = ta.fixed_and_trivially_fixed(s, xi, args.depth)
    code = EXIT_UNKNOWN if ta.UNKNOWN in (f, t) else EXIT_OK
    return code, {"s": s.to_json(), "xi": str(xi), "F": f.to_json(), "TF": t.to_json()}


def cmd_tight_condition_s(args):
    S = system_from_args(args)
    elements = [parse_triple(S, t) for t in args.elements]
    samples = [S.graph.parse_infinite(x) for x in args.samples]
    r = ta.condition_S_sample(elements, samples, args.depth)
    return verdict_code(r.verdict), r.to_json()


def cmd_tight_omega(args):
    S = system_from_args(args)
    xi = S.graph.parse_infinite(args.xi)
    gs = [g for g in args.gs.split(",") if g.strip()] if args.gs else []
    r = ta.omega_faithful_probe(S, xi, gs, args.m_max, args.alpha_depth)
    return verdict_code(r.verdict), {"xi": str(xi), "gs": gs, **r.to_json()}


def cmd_tight_hausdorff(args):
    S = system_from_args(args)
    r = ta.hausdorff_probe(S, args.radius, args.depth)
    return verdict_code(r.verdict), {"system": S.name, "radius": args.radius, "depth": args.depth, **r.to_json()}


def cmd_accept_run(args):
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError:
            raise MalformedInputError(f"bad --only list {args.only!r}") from None
    results = acceptance.run_all(only)
    if args.format == "text":
        for r in results:
            print(r.line())
        return (EXIT_OK if all(r.ok for r in results) else EXIT_NO), None
    return (EXIT_OK if all(r.ok for r in results) else EXIT_NO), {"criteria": [r.to_json() for r in results]}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser():
    fmt = env_default("format", "text")
    depth = env_default("depth", ta.DEFAULT_DEPTH, positive_int)
    state_cap = env_default("state-cap", ss.DEFAULT_STATE_CAP, positive_int)
    cap = env_default("cap", fg.DEFAULT_ALGEBRA_CAP, positive_int)
    radius = env_default("radius", 1, positive_int)
    semiring = env_default("semiring", "boolean")

    common = Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=fmt, help="report format (default %(default)s)")

    parser = Parser(prog="steinbench", description="Workbench for Steinberg algebras over semifields.",
                    epilog=f"Defaults can be set with {ENV_PREFIX}<OPTION> environment variables.")
    top = parser.add_subparsers(dest="group", required=True)

    def family(name, help_text):
        p = top.add_parser(name, help=help_text)
        return p.add_subparsers(dest="command", required=True)

    # semiring
    sr = family("semiring", "finite semiring tables")
    for name, fn, help_text in (("check", cmd_semiring_check, "validate the semiring axioms"),
                                ("simple", cmd_semiring_simple, "decide congruence-simplicity")):
        p = sr.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--input", help="semiring table JSON file")
        p.add_argument("--builtin", help="boolean, f<p>, z<n>, maxplus (coefficients with --matrix)")
        p.add_argument("--matrix", type=positive_int, help="materialize M_n(S[G]) with this n")
        p.add_argument("--group", default="1", help="group G for --matrix: 1, z<n>, s<k>")
        p.add_argument("--cap", type=positive_int, default=cap, help="materialization cap (default %(default)s)")
        p.set_defaults(func=fn)

    # groupoid
    gr = family("groupoid", "finite discrete groupoids")
    for name, fn, help_text in (("analyze", cmd_groupoid_analyze, "orbits, isotropy, minimal, effective"),
                                ("decompose", cmd_groupoid_decompose, "matrix block decomposition"),
                                ("simple", cmd_groupoid_simple, "simplicity: theorem vs brute force")):
        p = gr.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--input", help="groupoid JSON file")
        p.add_argument("--builtin", help="name such as R2, Z2, R3xZ3, 'R2+pt'")
        p.add_argument("--semiring", default=semiring, help="boolean or f<p> (default %(default)s)")
        p.add_argument("--cap", type=positive_int, default=cap, help="algebra size cap (default %(default)s)")
        p.set_defaults(func=fn)

    def system_args(p):
        p.add_argument("--input", help="self-similar system JSON file")
        p.add_argument("--builtin", choices=sorted(ss.BUILTINS), help="built-in system")
        p.add_argument("--katsura-a", help="Katsura matrix A, rows separated by ';'")
        p.add_argument("--katsura-b", help="Katsura matrix B, rows separated by ';'")
        p.add_argument("--state-cap", type=positive_int, default=state_cap,
                       help="section-state cap (default %(default)s)")

    # selfsim
    sm = family("selfsim", "self-similar graphs")
    p = sm.add_parser("act", parents=[common], help="act on a finite path or an eventually periodic path")
    system_args(p)
    p.add_argument("--element", required=True, help="group word, e.g. 'a b^-1'")
    p.add_argument("--path", help="finite path, e.g. e1,e1,e0 (or a vertex id)")
    p.add_argument("--xi", help="infinite path literal, e.g. e0,(e1)*")
    p.set_defaults(func=cmd_selfsim_act)
    p = sm.add_parser("cocycle", parents=[common], help="section of an element along a path")
    system_args(p)
    p.add_argument("--element", required=True)
    p.add_argument("--path", required=True)
    p.set_defaults(func=cmd_selfsim_cocycle)
    p = sm.add_parser("sfp", parents=[common], help="minimal strongly fixed paths")
    system_args(p)
    p.add_argument("--element", required=True)
    p.add_argument("--depth", type=positive_int, default=depth)
    p.set_defaults(func=cmd_selfsim_sfp)
    p = sm.add_parser("equal", parents=[common], help="word problem by bisimulation")
    system_args(p)
    p.add_argument("--element", required=True)
    p.add_argument("--other", required=True)
    p.set_defaults(func=cmd_selfsim_equal)

    # tight
    tg = family("tight", "inverse semigroup, germs and the Boolean algebra")
    p = tg.add_parser("mul", parents=[common], help="product of two triples (alpha;g;beta)")
    system_args(p)
    p.add_argument("--s", required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(func=cmd_tight_mul)
    for name, fn, help_text in (("product", cmd_tight_product, "product of compact open sets"),
                                ("equal", cmd_tight_equal, "equality of compact open sets")):
        p = tg.add_parser(name, parents=[common], help=help_text)
        system_args(p)
        p.add_argument("--x", required=True, help="triples joined by '|', or a JSON list / @file")
        p.add_argument("--y", required=True)
        p.add_argument("--depth", type=positive_int, default=depth)
        p.set_defaults(func=fn)
    p = tg.add_parser("fs", parents=[common], help="is xi fixed / trivially fixed by s")
    system_args(p)
    p.add_argument("--s", required=True)
    p.add_argument("--xi", required=True)
    p.add_argument("--depth", type=positive_int, default=depth)
    p.set_defaults(func=cmd_tight_fs)
    p = tg.add_parser("condition-s", parents=[common], help="sample Condition (S)")
    system_args(p)
    p.add_argument("--elements", nargs="*", default=[], help="non-idempotent triples")
    p.add_argument("--samples", nargs="+", required=True, help="infinite path literals")
    p.add_argument("--depth", type=positive_int, default=depth)
    p.set_defaults(func=cmd_tight_condition_s)
    p = tg.add_parser("omega", parents=[common], help="omega-faithfulness probe (one-vertex systems)")
    system_args(p)
    p.add_argument("--xi", required=True)
    p.add_argument("--gs", default="", help="comma-separated group words")
    p.add_argument("--m-max", type=positive_int, default=env_default("m-max", 8, positive_int))
    p.add_argument("--alpha-depth", type=positive_int, default=env_default("alpha-depth", 8, positive_int))
    p.set_defaults(func=cmd_tight_omega)
    p = tg.add_parser("hausdorff", parents=[common], help="minimal strongly fixed path growth")
    system_args(p)
    p.add_argument("--radius", type=positive_int, default=radius)
    p.add_argument("--depth", type=positive_int, default=depth)
    p.set_defaults(func=cmd_tight_hausdorff)

    # accept
    ac = family("accept", "acceptance suite")
    p = ac.add_parser("run", parents=[common], help="run the acceptance criteria")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_accept_run)
    return parser


def render_text(report, indent=0):
    pad = "  " * indent
    lines = []
    for k, v in report.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.extend(render_text(v, indent + 1))
        elif isinstance(v, list) and v and all(isinstance(x, dict) for x in v):
            lines.append(f"{pad}{k}:")
            for x in v:
                lines.extend(render_text(x, indent + 1))
                lines.append(f"{pad}  --")
        else:
            if isinstance(v, list):
                v = json.dumps(v)
            lines.append(f"{pad}{k}: {v}")
    return lines


def main(argv=None):
    try:
        parser = build_parser()
    except InputError as exc:
        print(f"steinbench: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    args = parser.parse_args(argv)
    try:
        code, report = args.func(args)
    except FiniteStateCapError as exc:
        code, report = EXIT_UNKNOWN, {"verdict": "unknown", "reason": str(exc), "explored": exc.explored}
    except SizeCapError as exc:
        print(f"steinbench: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MalformedInputError, DomainError) as exc:
        print(f"steinbench: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as exc:
        print(f"steinbench: error: invalid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"steinbench: error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    if report is not None:
        if args.format == "json":
            print(json.dumps(report, indent=2))
        else:
            print("\n".join(render_text(report)))
    return code


if __name__ == "__main__":
    sys.exit(main())
