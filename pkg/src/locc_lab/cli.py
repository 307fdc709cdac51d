"""``locc-lab`` command line.

Exit codes: 0 success or verified, 1 invalid input, 2 a verified negative
(bound violated, search exhausted, verification failed).
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, catalog
from .measurement import SeparablePovm
from .numerics import InvalidInputError, Tolerance, is_proportional_unitary, matrix_from_json
from .protocol import (
    classify,
    tree_from_json,
    tree_to_json,
    verify_deterministic,
    verify_rank_preserving,
    verify_sep,
    verify_sep_rank_preserving,
)
from .search import SearchSpec, search_protocols
from .states import StateSet, render_grid

OK, INVALID, NEGATIVE = 0, 1, 2


@dataclass
class CommandResult:
    exit_code: int
    stdout: str
    stderr: str = ""


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.format_usage()}{self.prog}: error: {message}\n")


# -- input helpers ----------------------------------------------------------

def _read_json(value: str):
    text = value if value.lstrip().startswith(("{", "[")) else None
    if text is None:
        path = Path(value)
        if not path.is_file():
            raise InvalidInputError(f"no such file: {value}")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{value}: invalid JSON ({exc})") from exc


def _is_catalog_ref(value: str) -> bool:
    return value.partition(":")[0] in catalog.REGISTRY


def _entry(value: str, params: str | None = None, verify=True) -> catalog.CatalogEntry:
    name, p = catalog.parse_ref(value)
    if params:
        p.update(catalog.parse_ref(f"{name}:{params}")[1])
    return catalog.build(name, p, verify=verify)


def load_states(value: str) -> StateSet:
    if _is_catalog_ref(value):
        return _entry(value).state_set
    return StateSet.from_json(_read_json(value))


def _load_protocol(value: str):
    obj = _read_json(value)
    if isinstance(obj, dict) and "outcomes" in obj:
        return SeparablePovm.from_json(obj)
    return tree_from_json(obj)


def _load_matrix(value: str) -> np.ndarray:
    return matrix_from_json(_read_json(value))


# -- subcommands ------------------------------------------------------------

def cmd_catalog(ns, tol):
    if ns.action == "list":
        rows = [{"name": n, "params": spec.defaults, "summary": spec.summary}
                for n, spec in catalog.REGISTRY.items()]
        text = "\n".join(f"{r['name']:<28} {r['summary']}" for r in rows)
        return OK, rows, text
    if not ns.name and ns.action == "verify":
        results = [_verify_entry(catalog.build(n, verify=False), tol) for n in catalog.names()]
        ok = all(r[0]["ok"] for r in results)
        return (OK if ok else NEGATIVE), [r[0] for r in results], "\n".join(r[1] for r in results)
    if not ns.name:
        raise InvalidInputError(f"catalog {ns.action} needs an entry name")
    entry = _entry(ns.name, ns.params, verify=ns.action != "verify")
    if ns.action == "show":
        exp = entry.expected
        payload = {
            "name": entry.name,
            "params": entry.params,
            "state_set": entry.state_set.to_json(tol),
            "ranks": entry.state_set.ranks(tol),
            "expected": {"distinguishable": exp.distinguishable, "r_floor": exp.r_floor,
                         "rank_preserving": exp.rank_preserving,
                         "protocol_class": exp.protocol_class},
            "protocols": [p.to_json() if isinstance(p, SeparablePovm) else tree_to_json(p)
                          for p in entry.protocols],
        }
        text = (f"{entry.state_set.name}  dims={list(entry.state_set.dims)}  "
                f"ranks={payload['ranks']}\n{render_grid(entry.state_set, tol)}")
        return OK, payload, text
    payload, text = _verify_entry(entry, tol)
    return (OK if payload["ok"] else NEGATIVE), payload, text


def _verify_entry(entry, tol):
    checks = catalog.verify_entry(entry, tol)
    payload = {"name": entry.name, "ok": all(c.ok for c in checks),
               "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in checks]}
    text = "\n".join(f"{'PASS' if c.ok else 'FAIL'}  {entry.state_set.name}  {c.name}  {c.detail}".rstrip()
                     for c in checks)
    return payload, text


def cmd_verify(ns, tol):
    ss = load_states(ns.states)
    if ns.protocol:
        proto = _load_protocol(ns.protocol)
    elif _is_catalog_ref(ns.states) and _entry(ns.states).protocols:
        proto = _entry(ns.states).protocols[0]
    else:
        raise InvalidInputError("--protocol is required unless --states names a catalog entry with one")
    sep = isinstance(proto, SeparablePovm)
    if ns.rank_preserving:
        rep = (verify_sep_rank_preserving if sep else verify_rank_preserving)(proto, ss, tol=tol)
    else:
        if sep:
            rep = verify_sep(proto, ss, ns.rmin, tol)
        else:
            rep = verify_deterministic(proto, ss, ns.rmin, tol, ns.require_projective)
    payload = rep.to_json()
    payload["class"] = "SEP" if sep else classify(proto, tol)
    lines = [f"{'ok' if rep.ok else 'FAILED'}  class={payload['class']}  outcomes={len(rep.records)}"]
    lines += [f"  {f.reason} at {'/'.join(f'{p}:{i}' for p, i in f.path) or 'root'}: {f.detail}"
              for f in rep.failures]
    return (OK if rep.ok else NEGATIVE), payload, "\n".join(lines)


def cmd_bounds(ns, tol):
    ss = load_states(ns.states)
    reports = [analysis.nmax_report(ss, ns.r),
               analysis.rank_sum_bound(ss, ns.r, ns.swap_roles, tol),
               analysis.r2_bound(ss, tol)]
    payload = [r.to_json() for r in reports]
    text = "\n".join(
        f"{r.formula_id:<20} {r.quantity:g} {'<=' if r.satisfied else '>'} {r.bound:g}"
        + ("" if r.satisfied else "  VIOLATED") for r in reports)
    return (OK if all(r.satisfied for r in reports) else NEGATIVE), payload, text


def cmd_partition(ns, tol):
    ss = load_states(ns.states)
    tree = analysis.cascading_partition(ss, ns.first, tol)
    payload = {"partition": tree.to_json()}
    lines = [f"complete={tree.complete}"]
    lines += [f"  split on {p}: {[[j + 1 for j in g] for g in groups]}" for p, groups in tree.splits()]
    if tree.complete:
        proto = tree_to_json(analysis.partition_to_protocol(tree, ss, tol))
        if ns.protocol_out:
            Path(ns.protocol_out).write_text(json.dumps(proto, indent=1))
            lines.append(f"protocol written to {ns.protocol_out}")
        else:
            payload["protocol"] = proto
    return (OK if tree.complete else NEGATIVE), payload, "\n".join(lines)


def cmd_search(ns, tol):
    ss = load_states(ns.states)
    bases = {}
    if ns.basis:
        obj = _read_json(ns.basis)
        if not isinstance(obj, dict):
            raise InvalidInputError("basis file must map party to a matrix")
        bases = {p: matrix_from_json(m) for p, m in obj.items()}
    spec = SearchSpec(ns.comm_class, ns.rmin, ns.max_rounds, bases, prune=not ns.no_prune)
    res = search_protocols(ss, spec, tol)
    payload = res.to_json()
    if res.found:
        payload["class"] = classify(res.protocol, tol)
        text = f"found ({payload['class']}) after {res.nodes_explored} nodes"
    else:
        text = (f"not found: basis-aligned projective {ns.comm_class} family exhausted "
                f"after {res.nodes_explored} nodes")
    return (OK if res.found else NEGATIVE), payload, text


def cmd_render(ns, tol):
    ss = load_states(ns.states)
    grid = render_grid(ss, tol)
    return OK, {"name": ss.name, "dims": list(ss.dims), "grid": grid.splitlines()}, grid


def cmd_check_necessary(ns, tol):
    ss = load_states(ns.states)
    ok = analysis.theorem4_check(ss, tol)
    text = ("rho_A (x) rho_B operators are mutually orthogonal" if ok
            else "rho_A (x) rho_B operators are NOT mutually orthogonal: "
                 "no LOCC protocol keeps every Schmidt rank")
    return (OK if ok else NEGATIVE), {"orthogonal": ok}, text


def cmd_purify(ns, tol):
    ss = load_states(ns.states)
    res = analysis.purification_check(ss, _load_matrix(ns.a), _load_matrix(ns.b), tol)
    text = (f"survivors={[j + 1 for j in res.survivors]} pure={res.pure}"
            + (f" residual_rank={res.residual_rank}" if res.pure else ""))
    return (OK if res.pure else NEGATIVE), res.to_json(), text


def cmd_domino(ns, tol):
    if ns.op:
        a = _load_matrix(ns.op)
        keeps = analysis.domino_preserves_orthogonality(a, ns.party, tol)
        unitary = is_proportional_unitary(a, tol)
        payload = {"preserves_orthogonality": keeps, "proportional_to_unitary": unitary}
        return OK, payload, f"preserves_orthogonality={keeps} proportional_to_unitary={unitary}"
    from .sampling import domino_counterexamples

    bad = domino_counterexamples(ns.samples, ns.seed, tol)
    payload = {"samples": ns.samples, "seed": ns.seed, "counterexamples": len(bad)}
    text = f"{ns.samples} samples, {len(bad)} counterexamples"
    return (OK if not bad else NEGATIVE), payload, text


# -- parser -----------------------------------------------------------------

def _common(suppress: bool) -> argparse.ArgumentParser:
    d = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                   help="machine-readable output")
    p.add_argument("--tol-rel", type=float, default=d, help="relative rank cutoff")
    p.add_argument("--tol-abs", type=float, default=d, help="absolute cutoff")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="locc-lab", parents=[_common(False)],
                     description="Distinguish bipartite states by LOCC while keeping Schmidt rank.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = [_common(True)]

    p = sub.add_parser("catalog", parents=common, help="built-in examples")
    p.add_argument("action", choices=["list", "show", "verify"])
    p.add_argument("name", nargs="?")
    p.add_argument("--params", help="e.g. da=4,db=6,r=3")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", parents=common, help="verify a protocol on a state set")
    p.add_argument("--states", required=True)
    p.add_argument("--protocol")
    p.add_argument("--rmin", type=int, default=1)
    p.add_argument("--rank-preserving", action="store_true")
    p.add_argument("--require-projective", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", parents=common, help="counting bounds")
    p.add_argument("--states", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--swap-roles", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("partition", parents=common, help="cascading partition")
    p.add_argument("--states", required=True)
    p.add_argument("--first", choices=["A", "B", "auto"], default="auto")
    p.add_argument("--protocol-out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("search", parents=common, help="exhaustive basis-aligned search")
    p.add_argument("--states", required=True)
    p.add_argument("--class", dest="comm_class", choices=["P0", "P1", "P2"], default="P2")
    p.add_argument("--rmin", type=int, default=1)
    p.add_argument("--max-rounds", type=int, default=4)
    p.add_argument("--basis", help='JSON {"A": matrix, "B": matrix}')
    p.add_argument("--no-prune", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("render", parents=common, help="ASCII occupancy grid")
    p.add_argument("--states", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("check-necessary", parents=common, help="rho-hat orthogonality test")
    p.add_argument("--states", required=True)
    p.set_defaults(func=cmd_check_necessary)

    p = sub.add_parser("purify-check", parents=common, help="does A (x) B leave one pure state")
    p.add_argument("--states", required=True)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_purify)

    p = sub.add_parser("domino-check", parents=common, help="domino-state orthogonality test")
    p.add_argument("--op", help="3x3 operator JSON; omit to sample")
    p.add_argument("--party", choices=["A", "B"], default="A")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_domino)
    return parser


def run(argv) -> CommandResult:
    parser = build_parser()
    out = io.StringIO()
    try:
        with redirect_stderr(io.StringIO()), redirect_stdout(out):
            ns = parser.parse_args(list(argv))
    except _Usage as exc:
        return CommandResult(INVALID, "", str(exc))
    except SystemExit as exc:  # --help
        return CommandResult(int(exc.code or 0), out.getvalue())
    try:
        tol = Tolerance.from_env(ns.tol_rel, ns.tol_abs)
        code, payload, text = ns.func(ns, tol)
    except InvalidInputError as exc:
        return CommandResult(INVALID, "", f"error: {exc}\n")
    out = json.dumps(payload, indent=1) if ns.json else text
    return CommandResult(code, out + "\n")


def main(argv=None) -> int:
    res = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(res.stdout)
    sys.stderr.write(res.stderr)
    return res.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
