"""Command-line front end.

Subcommands: gen, solve, verify, search, gadget, union, info.  Standard
output carries reports (or a single JSON document with --json); all
diagnostics go to standard error.

Exit codes: 0 success/verified/solvable, 1 verification failed,
2 proven impossible (inadmissible characteristic or exhausted search),
3 inconclusive search, 64 usage or unparseable input.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from .constructions import (
    gadget_transform,
    gadget_transform_traced,
    gen_fano,
    gen_n1,
    gen_n2,
    gen_nonfano,
    union_copies,
)
from .gf import PrimeModulus
from .lincode import (
    CharacteristicError,
    CodeError,
    CodeFormatError,
    SymbolicCode,
    instantiate,
    load_code,
    save_code,
    verify,
)
from .network import (
    CodedNetwork,
    NetworkFormatError,
    is_multiple_unicast,
    load,
    save,
    validate,
)
from .solutions import lift_gadget, lift_union, solve_n1, solve_n2
from .solver import (
    SOLVABLE,
    UNSOLVABLE,
    SearchConfig,
    budget_from_env,
    search_fractional,
    search_scalar,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_IMPOSSIBLE = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64


class _CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit with code 64."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit_json(doc: object) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _CliError(EXIT_USAGE, f"cannot read {path}: {exc}") from exc


def _read_network(path: str) -> CodedNetwork:
    try:
        return load(_read_text(path))
    except NetworkFormatError as exc:
        raise _CliError(EXIT_USAGE, f"{path}: {exc}") from exc


def _read_code(path: str, net: CodedNetwork | None):
    try:
        return load_code(_read_text(path), net)
    except (CodeFormatError, CodeError) as exc:
        raise _CliError(EXIT_USAGE, f"{path}: {exc}") from exc


def _prime(value: int) -> PrimeModulus:
    try:
        return PrimeModulus(value)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, f"--p: {exc}") from exc


def _write_or_print(data: bytes, out: str | None, as_json: bool, summary: dict) -> None:
    """Write canonical bytes to --out (then report), or dump them to stdout."""
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
        return
    try:
        Path(out).write_bytes(data)
    except OSError as exc:
        raise _CliError(EXIT_USAGE, f"cannot write {out}: {exc}") from exc
    if as_json:
        _emit_json({"written": out, **summary})
    else:
        detail = " ".join(f"{k}={v}" for k, v in sorted(summary.items()))
        print(f"wrote {out}" + (f" ({detail})" if detail else ""))


# -- construction names -------------------------------------------------------

_FAMILY_RE = re.compile(r"^n([12])\(q=(\d+),n=(\d+)\)$")


def _construction_from_name(name: str) -> tuple[CodedNetwork, SymbolicCode, str]:
    """Rebuild a generated network and its symbolic solution from its name.

    Understands n1(q=..,n=..), n2(q=..,n=..) and the union(...,k=..) /
    gadget(...,n=..) wrappers those transforms stamp on their results.
    Returns (network, symbolic code, base family).
    """
    m = _FAMILY_RE.match(name)
    if m:
        fam, q, n = m.group(1), int(m.group(2)), int(m.group(3))
        try:
            if fam == "1":
                return gen_n1(q, n), solve_n1(q, n), "n1"
            return gen_n2(q, n), solve_n2(q, n), "n2"
        except ValueError as exc:
            raise _CliError(EXIT_USAGE, f"bad construction name {name!r}: {exc}") from exc
    for prefix, param in (("union(", ",k="), ("gadget(", ",n=")):
        if name.startswith(prefix) and name.endswith(")"):
            inner = name[len(prefix) : -1]
            base_name, sep, arg = inner.rpartition(param)
            if not sep or not arg.isdigit():
                break
            value = int(arg)
            base_net, base_sym, fam = _construction_from_name(base_name)
            try:
                if prefix == "union(":
                    return (
                        union_copies(base_net, value),
                        lift_union(base_sym, value),
                        fam,
                    )
                return (
                    gadget_transform(base_net, value),
                    lift_gadget(base_sym, base_net, gadget_transform(base_net, value)),
                    fam,
                )
            except ValueError as exc:
                raise _CliError(
                    EXIT_USAGE, f"cannot solve {name!r}: {exc}"
                ) from exc
    raise _CliError(EXIT_USAGE, f"unrecognized construction name: {name!r}")


# -- subcommands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    family = args.family
    if family in ("fano", "nonfano"):
        if args.q is not None or args.n is not None:
            raise _CliError(EXIT_USAGE, f"--family {family} takes no --q/--n")
        net = gen_fano() if family == "fano" else gen_nonfano()
    else:
        q = 2 if args.q is None else args.q
        n = 1 if args.n is None else args.n
        try:
            net = gen_n1(q, n) if family == "n1" else gen_n2(q, n)
        except ValueError as exc:
            raise _CliError(EXIT_USAGE, str(exc)) from exc
    if args.copies < 1:
        raise _CliError(EXIT_USAGE, "--copies must be >= 1")
    if args.copies > 1:
        net = union_copies(net, args.copies)
    _write_or_print(save(net), args.out, args.json, {"name": net.name})
    return EXIT_OK


def cmd_solve(args) -> int:
    net = _read_network(args.network)
    expected, sym, family = _construction_from_name(net.name)
    if expected != net:
        raise _CliError(
            EXIT_USAGE,
            f"{args.network}: network does not match its construction name {net.name!r}",
        )
    mod = _prime(args.p)
    if family == "n1" and sym.q % mod.p != 0:
        print(
            f"{net.name} is unsolvable over GF({mod.p}): it requires that the "
            f"characteristic divides q, but {mod.p} does not divide {sym.q}",
            file=sys.stderr,
        )
        return EXIT_IMPOSSIBLE
    if family == "n2" and sym.q % mod.p == 0:
        print(
            f"{net.name} is unsolvable over GF({mod.p}): it requires that the "
            f"characteristic does not divide q, but {mod.p} divides {sym.q}",
            file=sys.stderr,
        )
        return EXIT_IMPOSSIBLE
    try:
        code = instantiate(sym, mod)
    except CharacteristicError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IMPOSSIBLE
    report = verify(net, code)
    if not report.passed:
        print("constructed code failed verification", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    _write_or_print(
        save_code(code),
        args.out,
        args.json,
        {"name": net.name, "p": mod.p, "rate": f"{code.k}/{code.n}"},
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    net = _read_network(args.network)
    code = _read_code(args.code, net)
    if isinstance(code, SymbolicCode):
        raise _CliError(
            EXIT_USAGE,
            f"{args.code}: code is symbolic (no p); instantiate it via solve first",
        )
    report = verify(net, code)
    if args.json:
        _emit_json(
            {
                "passed": report.passed,
                "terminals": [
                    {
                        "terminal": t.terminal,
                        "demanded": t.demanded,
                        "passed": t.passed,
                        "interferers": list(t.interferers),
                    }
                    for t in report.terminals
                ],
            }
        )
    else:
        width = max((len(t.terminal) for t in report.terminals), default=8)
        for t in report.terminals:
            status = "ok" if t.passed else "FAIL"
            extra = ""
            if t.interferers:
                extra = "  interference: " + ", ".join(t.interferers)
            print(f"{t.terminal:<{width}}  wants {t.demanded:<10} {status}{extra}")
        good = sum(1 for t in report.terminals if t.passed)
        print(f"{good}/{len(report.terminals)} terminals decode")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_search(args) -> int:
    net = _read_network(args.network)
    mod = _prime(args.p)
    if args.budget is not None:
        budget = args.budget
        if budget < 1:
            raise _CliError(EXIT_USAGE, "--budget must be positive")
    else:
        try:
            budget = budget_from_env()
        except ValueError as exc:
            raise _CliError(EXIT_USAGE, str(exc)) from exc
    fractional = (args.k, args.n) != (1, 1)
    try:
        cfg = SearchConfig(
            node_budget=budget,
            enable_fractional=fractional,
            k=args.k,
            n=args.n,
            worker_count=args.workers,
        )
        if fractional:
            outcome = search_fractional(net, args.k, args.n, mod, cfg)
        else:
            outcome = search_scalar(net, mod, cfg)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc

    written = None
    if outcome.code is not None and args.out is not None:
        try:
            Path(args.out).write_bytes(save_code(outcome.code))
        except OSError as exc:
            raise _CliError(EXIT_USAGE, f"cannot write {args.out}: {exc}") from exc
        written = args.out
    if args.json:
        doc: dict = {"outcome": outcome.status, "states": outcome.states_explored}
        if outcome.code is not None:
            doc["code"] = json.loads(save_code(outcome.code).decode("utf-8"))
        if written:
            doc["written"] = written
        _emit_json(doc)
    else:
        print(f"outcome: {outcome.status}")
        print(f"states explored: {outcome.states_explored}")
        if written:
            print(f"wrote {written}")
    if outcome.status == SOLVABLE:
        return EXIT_OK
    if outcome.status == UNSOLVABLE:
        return EXIT_IMPOSSIBLE
    return EXIT_INCONCLUSIVE


def cmd_gadget(args) -> int:
    net = _read_network(args.network)
    try:
        result, applications = gadget_transform_traced(net, args.n)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc
    count = len(applications)
    if args.out is None:
        print(f"applications: {count}", file=sys.stderr)
        _write_or_print(save(result), None, args.json, {})
    else:
        _write_or_print(
            save(result), args.out, args.json,
            {"name": result.name, "applications": count},
        )
    return EXIT_OK


def cmd_union(args) -> int:
    net = _read_network(args.network)
    try:
        result = union_copies(net, args.copies)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc
    _write_or_print(save(result), args.out, args.json, {"name": result.name})
    return EXIT_OK


def cmd_info(args) -> int:
    net = _read_network(args.network)
    report = validate(net)
    unicast = is_multiple_unicast(net)
    roles = {"source": 0, "intermediate": 0, "terminal": 0}
    for node in net.nodes:
        roles[node.role] += 1
    if args.json:
        _emit_json(
            {
                "name": net.name,
                "messages": len(net.messages),
                "nodes": len(net.nodes),
                "sources": roles["source"],
                "intermediates": roles["intermediate"],
                "terminals": roles["terminal"],
                "edges": len(net.edges),
                "valid": report.ok,
                "violations": [
                    {"kind": v.kind, "detail": v.detail} for v in report.violations
                ],
                "multiple_unicast": unicast.ok,
            }
        )
        return EXIT_OK
    print(f"name: {net.name}")
    print(f"messages: {len(net.messages)}")
    print(
        f"nodes: {len(net.nodes)} ({roles['source']} sources, "
        f"{roles['intermediate']} intermediate, {roles['terminal']} terminals)"
    )
    print(f"edges: {len(net.edges)}")
    print(f"valid: {'yes' if report.ok else 'no'}")
    for v in report.violations:
        print(f"  violation [{v.kind}]: {v.detail}")
    print(f"multiple-unicast: {'yes' if unicast.ok else 'no'}")
    return EXIT_OK


# -- wiring --------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="ncchar", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json", action="store_true", help="emit a single JSON document on stdout"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate a network file")
    p.add_argument(
        "--family", required=True, choices=["n1", "n2", "fano", "nonfano"]
    )
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--copies", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser(
        "solve", parents=[common],
        help="build the closed-form code for a generated network",
    )
    p.add_argument("network")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="check a code on a network")
    p.add_argument("network")
    p.add_argument("code")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "search", parents=[common], help="exhaustive solvability search"
    )
    p.add_argument("network")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser(
        "gadget", parents=[common],
        help="reduce duplicate demands to multiple-unicast form",
    )
    p.add_argument("network")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser(
        "union", parents=[common], help="disjoint union of edge copies"
    )
    p.add_argument("network")
    p.add_argument("--copies", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_union)

    p = sub.add_parser("info", parents=[common], help="summarize a network file")
    p.add_argument("network")
    p.set_defaults(func=cmd_info)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except _CliError as exc:
        print(exc.message, file=sys.stderr)
        return exc.code


def console_entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    console_entry()
