"""Command-line entry point: ``obdalab <command> ...``.

Exit codes: 0 success, 1 usage or parse error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .chase import certain_answers
from .circuits import eval_circuit, format_circuit, parse_circuit, parse_nbp, eval_nbp
from .encoder import encode_hgp, format_input_map
from .hgp import eval_hgp, format_hgp, parse_hgp
from .logic import (
    ParseError,
    ValidationError,
    format_data,
    format_ontology,
    format_query,
    parse_data,
    parse_ontology,
    parse_query,
)
from .rewriting import count_disjuncts, format_ndl, format_pe, ndl_rewriting, pe_rewriting, size_of
from .selftest import SUITES, format_report, run_selftest
from .translate import circuit_to_hgp3, hgp_to_np_circuit

EXIT_OK, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    return Path(path).read_text()


def _emit(args, filename: str, text: str) -> None:
    """Write to <out-dir>/filename when --out-dir is given, else to stdout."""
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text)
        print(out / filename)
    else:
        sys.stdout.write(text)


def _bits(text: str, n: int) -> tuple[int, ...]:
    if any(ch not in "01" for ch in text):
        raise ValidationError(f"input bits must be 0/1, got {text!r}")
    if len(text) != n:
        raise ValidationError(f"expected {n} input bits, got {len(text)}")
    return tuple(int(ch) for ch in text)


def cmd_answer(args) -> int:
    ont = parse_ontology(_read(args.ontology))
    data = parse_data(_read(args.data))
    q = parse_query(_read(args.query))
    answers = certain_answers(data, ont, q, args.depth_limit)
    if q.is_boolean:
        print("true" if answers else "false")
    else:
        for tup in sorted(answers):
            print(",".join(tup))
    return EXIT_OK


def cmd_rewrite(args) -> int:
    ont = parse_ontology(_read(args.ontology))
    q = parse_query(_read(args.query))
    if args.target == "pe":
        rw = pe_rewriting(q, ont)
        text, k = format_pe(rw) + "\n", len(rw.disjuncts)
    else:
        rw = ndl_rewriting(q, ont)
        text, k = format_ndl(rw), count_disjuncts(q, ont)
    _emit(args, f"rewriting.{args.target}", text)
    print(f"# size={size_of(rw)} disjuncts={k}")
    return EXIT_OK


def cmd_encode(args) -> int:
    enc = encode_hgp(parse_hgp(_read(args.hypergraph)))
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "ontology.txt": format_ontology(enc.ontology),
        "query.txt": format_query(enc.query) + "\n",
        "data.txt": format_data(enc.base_data),
        "inputmap.txt": format_input_map(enc),
    }
    for name, text in files.items():
        (out / name).write_text(text)
        print(out / name)
    return EXIT_OK


def cmd_compile(args) -> int:
    c = parse_circuit(_read(args.circuit))
    _emit(args, "program.hgp", format_hgp(circuit_to_hgp3(c, monotone=args.monotone)))
    return EXIT_OK


def cmd_hgp2circuit(args) -> int:
    _emit(args, "circuit.txt", format_circuit(hgp_to_np_circuit(parse_hgp(_read(args.hypergraph)))))
    return EXIT_OK


def cmd_eval(args) -> int:
    text = _read(args.file)
    if args.kind == "hgp":
        h = parse_hgp(text)
        value = eval_hgp(h, _bits(args.bits, h.num_vars))
    elif args.kind == "nbp":
        p = parse_nbp(text)
        value = eval_nbp(p, _bits(args.bits, p.num_vars))
    else:
        c = parse_circuit(text)
        xy = _bits(args.bits, c.n + c.m)
        value = eval_circuit(c, xy[: c.n], xy[c.n:])
    print(int(value))
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest(args.suite, args.seed, args.count, Path(args.out_dir or "."))
    sys.stdout.write(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (selftest)")
    common.add_argument("--depth-limit", type=int, default=None, help="chase depth override (answer)")
    common.add_argument("--out-dir", default=None, help="write output files here instead of stdout")

    p = _Parser(prog="obdalab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("answer", parents=[common], help="certain answers via the chase")
    s.add_argument("ontology")
    s.add_argument("data")
    s.add_argument("query")
    s.set_defaults(func=cmd_answer)

    s = sub.add_parser("rewrite", parents=[common], help="PE or NDL rewriting of a query")
    s.add_argument("ontology")
    s.add_argument("query")
    s.add_argument("--target", choices=("pe", "ndl"), default="pe")
    s.set_defaults(func=cmd_rewrite)

    s = sub.add_parser("encode", parents=[common], help="hypergraph program -> ontology/query/data")
    s.add_argument("hypergraph")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("compile", parents=[common], help="circuit -> degree-3 hypergraph program")
    s.add_argument("circuit")
    s.add_argument("--to", choices=("hgp3",), default="hgp3")
    s.add_argument("--monotone", action="store_true")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("hgp2circuit", parents=[common], help="hypergraph program -> circuit with y-inputs")
    s.add_argument("hypergraph")
    s.set_defaults(func=cmd_hgp2circuit)

    s = sub.add_parser("eval", parents=[common], help="evaluate a program on input bits")
    s.add_argument("kind", choices=("hgp", "circuit", "nbp"))
    s.add_argument("file")
    s.add_argument("bits", nargs="?", default="", help="x bits, then y bits for circuits")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("selftest", parents=[common], help="randomized differential suites")
    s.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    s.add_argument("--count", type=int, default=None, help="instances per suite")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
