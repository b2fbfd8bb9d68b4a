"""Command-line front end.

Exit codes: 0 entailed / satisfiable / ok, 1 not entailed / unsatisfiable /
unsafe, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

from .elcore import Engine
from .inet import build_net, net_to_dot
from .model import BOT, StrictGci, conj, render, unsafe_axioms
from .nominals import NotNominalSafe
from .normalize import describe_names, normalize_kb
from .parse import ParseError, load_kb, parse_axiom, serialize_kb
from .rc import build_t_delta, compute_ranking
from .reasoner import CLOSURES, answer, check_kb, encoded_for_structure, rank_kb, rank_text

EXIT_OK, EXIT_NO, EXIT_ERROR = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit with 2, like library errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="elrc", description="Defeasible reasoning for EL-bottom knowledge bases.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser, metavar="COMMAND")

    s = sub.add_parser("check", help="rank satisfiability and per-individual consistency")
    s.add_argument("kb")

    s = sub.add_parser("rank", help="print the ranking of the DBox")
    s.add_argument("kb")

    s = sub.add_parser("query", help="decide one axiom")
    s.add_argument("kb")
    s.add_argument("axiom", help='e.g. "BRBC <~ NotN" or "BRBC <= VRBC"')
    s.add_argument("--closure", choices=CLOSURES, default="rc")
    s.add_argument("--explain", action="store_true", help="print the rank of the left side and what decided")
    s.add_argument("--machine", action="store_true", help="print one JSON record")

    s = sub.add_parser("safety", help="nominal-safeness report")
    s.add_argument("kb")

    s = sub.add_parser("normalize", help="print the normal form and the fresh-name definitions")
    s.add_argument("kb")

    s = sub.add_parser("net", help="print the inheritance net as Graphviz text")
    s.add_argument("kb")

    s = sub.add_parser("debug-oracle")  # no help: stays out of the listing
    s.add_argument("kb")
    s.add_argument("--max-domain", type=int, default=3)
    return p


def _cmd_check(args, out: TextIO) -> int:
    kb = load_kb(args.kb)
    report = check_kb(kb)
    out.write(f"rank-satisfiable: {'yes' if report.rank_satisfiable else 'no'}\n")
    inds = ", ".join(report.unsatisfiable_individuals) or "none"
    out.write(f"unsatisfiable individuals: {inds}\n")
    return EXIT_OK if report.ok else EXIT_NO


def _cmd_rank(args, out: TextIO) -> int:
    kb = load_kb(args.kb)
    report = rank_kb(kb)
    r = report.ranking
    if not r.cells:
        out.write("no finite-rank defeasible axioms\n")
    for i, cell in enumerate(r.cells):
        out.write(f"D{i}:\n")
        for ax in sorted((report.decode(a) for a in cell), key=str):
            out.write(f"  {ax}\n")
    if r.infinite:
        out.write("infinite rank:\n")
        for ax in sorted((report.decode(a) for a in r.infinite), key=str):
            out.write(f"  {ax}\n")
        out.write("T* additions:\n")
        for ax in sorted((report.decode(a) for a in r.absorbed), key=str):
            out.write(f"  {ax}\n")
    return EXIT_OK


def _cmd_query(args, out: TextIO) -> int:
    kb = load_kb(args.kb)
    q = parse_axiom(args.axiom)
    v = answer(kb, q, args.closure, Engine())
    if args.machine:
        out.write(json.dumps(v.record(), sort_keys=False) + "\n")
    else:
        verdict = "entailed" if v.entailed else "not entailed"
        out.write(f"{q}: {verdict} ({v.closure})\n")
        if args.explain:
            out.write(f"rank of {render(q.lhs)}: {rank_text(v.rank_of_lhs)}\n")
            for line in v.explanation:
                out.write(f"{line}\n")
            out.write(f"subsumption tests: {v.subsumption_tests}\n")
    return EXIT_OK if v.entailed else EXIT_NO


def _cmd_safety(args, out: TextIO) -> int:
    kb = load_kb(args.kb)
    bad = unsafe_axioms(kb)
    if not bad:
        out.write("nominal-safe: yes\n")
        return EXIT_OK
    out.write("nominal-safe: no\n")
    for ax in bad:
        out.write(f"  unsafe: {ax}\n")
    return EXIT_NO


def _cmd_normalize(args, out: TextIO) -> int:
    kb, images = encoded_for_structure(load_kb(args.kb))
    nkb, names = normalize_kb(kb)
    out.write(serialize_kb(nkb))
    for line in describe_names(names):
        out.write(f"# {line}\n")
    for ind, atom in sorted(images.defeasible.items()):
        out.write(f"# {atom} == <{ind}>\n")
    return EXIT_OK


def _cmd_net(args, out: TextIO) -> int:
    kb, _ = encoded_for_structure(load_kb(args.kb))
    nkb, names = normalize_kb(kb)
    out.write(net_to_dot(build_net(nkb, Engine()), names))
    return EXIT_OK


def _cmd_debug_oracle(args, out: TextIO) -> int:
    from .oracle import OracleBudget, exceptional_bounded, find_typical_witness

    kb, _ = encoded_for_structure(load_kb(args.kb))
    engine = Engine()
    ranking = compute_ranking(kb, engine)
    enc = build_t_delta(ranking.tstar, ranking.dstar, engine.delta_names)
    budget = OracleBudget(max_domain=args.max_domain)
    disagreements = 0
    for lhs in sorted({ax.lhs for ax in kb.dbox}, key=render):
        syntactic = engine.entails(enc.tbox, StrictGci(conj(lhs, enc.delta), BOT))
        semantic = exceptional_bounded(kb, lhs, budget)
        mark = "ok" if syntactic == semantic else "DISAGREE"
        out.write(f"{mark} {render(lhs)}: delta-test={syntactic} oracle={semantic}\n")
        if syntactic != semantic:
            disagreements += 1
            w = find_typical_witness(kb, lhs, budget)
            if w is not None:
                out.write(f"  witness: {w.describe()}\n")
    return EXIT_OK if not disagreements else EXIT_NO


_COMMANDS = {
    "check": _cmd_check,
    "rank": _cmd_rank,
    "query": _cmd_query,
    "safety": _cmd_safety,
    "normalize": _cmd_normalize,
    "net": _cmd_net,
    "debug-oracle": _cmd_debug_oracle,
}


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args, out)
    except ParseError as e:
        err.write(f"error: {e}\n")
    except NotNominalSafe as e:
        err.write(f"error: {e}\n")
    except OSError as e:
        err.write(f"error: {e.filename or ''}: {e.strerror}\n")
    except ValueError as e:
        err.write(f"error: {e}\n")
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())
