"""Command-line entry point: ``flagcert <subcommand> ...``.

Exit status: 0 on success, 1 when a certificate fails verification, 2 on
usage or capacity errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import FlagcertError
from .field import format_number

log = logging.getLogger("flagcert")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--approx", action="store_true", help="add decimal approximations of exact numbers")
    p.add_argument("--threads", type=int, default=None, metavar="N",
                   help="worker cap (results never depend on it)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="flagcert", description="Exact flag-algebra certificates for red/blue-colored graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", parents=[common], help="list colored graphs up to isomorphism")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--family", default="NONE", choices=["NONE", "FC5", "FC7"])
    p.add_argument("--count-only", action="store_true")

    p = sub.add_parser("flags", parents=[common], help="flag bases over a two-vertex type")
    p.add_argument("--sigma", default="lambda", choices=["lambda", "beta", "rho"])
    p.add_argument("--size", type=int, default=4)
    p.add_argument("--family", default="FC5", choices=["NONE", "FC5", "FC7"])
    p.add_argument("--count-only", action="store_true")

    p = sub.add_parser("target", parents=[common], help="six-vertex target expression")
    p.add_argument("--problem", default="C5", choices=["C5", "C7"])

    p = sub.add_parser("verify", parents=[common], help="verify a certificate file")
    p.add_argument("certificate", type=Path)

    p = sub.add_parser("export-sdpa", parents=[common], help="write the feasibility SDP in SDPA sparse format")
    p.add_argument("--problem", default="C5", choices=["C5", "C7"])
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("round", parents=[common], help="round a floating SDP solution to a certificate")
    p.add_argument("solution", type=Path, help="JSON solution or CSDP/SDPA solution file")
    p.add_argument("--problem", default="C5", choices=["C5", "C7"])
    p.add_argument("--bound", type=int, default=10**6, help="denominator bound")
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("oracle", parents=[common], help="exact minimum of edges on L-cycles")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-L", type=int, required=True, choices=[3, 5, 7, 9])
    p.add_argument("--witnesses", type=int, default=5)

    p = sub.add_parser("construct", parents=[common], help="build an extremal construction")
    p.add_argument("kind", choices=["g1", "g2", "long"])
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-L", type=int, default=5, help="cycle length for the edge statistics")
    p.add_argument("--quadruple", type=int, nargs=4, metavar=("A", "B", "C", "D"))

    p = sub.add_parser("qp", parents=[common], help="solve the n-extremal integer program")
    p.add_argument("-n", type=int, required=True)

    p = sub.add_parser("formulas", parents=[common], help="closed forms of F_{2k+1}(n)")
    p.add_argument("--n-max", type=int, default=100)

    sub.add_parser("stability", parents=[common], help="exact optima of the stability programs")
    return parser


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _num(x, approx: bool) -> str:
    s = format_number(x)
    return f"{s}\t{float(x):.12g}" if approx else s


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=None))


# -- subcommands ------------------------------------------------------------------

def cmd_enumerate(args) -> int:
    from .enumeration import enumerate_colored_graphs

    fam = None if args.family == "NONE" else args.family
    graphs = enumerate_colored_graphs(args.n, fam)
    if args.json:
        out = {"n": args.n, "family": args.family, "count": len(graphs)}
        if not args.count_only:
            out["graphs"] = [g.encode() for g in graphs]
        _emit(out)
    elif args.count_only:
        print(len(graphs))
    else:
        for g in graphs:
            print(g.encode())
    return EXIT_OK


def cmd_flags(args) -> int:
    from .flags import TYPES, flag_basis

    fam = None if args.family == "NONE" else args.family
    basis = flag_basis(TYPES[args.sigma], args.size, fam)
    if args.json:
        out = {"sigma": args.sigma, "size": args.size, "family": args.family, "count": len(basis),
               "hash": basis.digest()}
        if not args.count_only:
            out["flags"] = [f.dump() for f in basis]
        _emit(out)
    elif args.count_only:
        print(len(basis))
    else:
        for f in basis:
            print(f.dump())
    return EXIT_OK


def cmd_target(args) -> int:
    from .certificate import target_expression
    from .graphs import ColoredGraph

    t = target_expression(args.problem)
    rows = [(ColoredGraph(k[0], k[1:]).encode(), v) for k, v in t.items()]
    if args.json:
        _emit({"problem": args.problem,
               "terms": [{"graph": g, "coeff": format_number(v), **({"approx": float(v)} if args.approx else {})}
                         for g, v in rows]})
    else:
        for g, v in rows:
            print(f"{g}\t{_num(v, args.approx)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .certificate import parse_certificate, verify

    cert = parse_certificate(args.certificate.read_text())
    report = verify(cert)
    if args.json:
        _emit({**report.to_dict(), "ok": report.ok})
    else:
        print(f"identity\t{'ok' if report.identity_ok else 'FAIL'}")
        print(f"psd\t{'ok' if report.psd_ok else 'FAIL'}")
        print(f"side-conditions\t{'ok' if report.side_conditions_ok else 'FAIL'}")
        if not report.target_is_problem:
            print("note\ttarget differs from the problem's target expression")
        for where, why in report.violations:
            print(f"violation\t{where}\t{why}")
    return EXIT_OK if report.ok else EXIT_FAIL


def _write(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def cmd_export(args) -> int:
    from .certificate import export_sdp

    text = export_sdp(args.problem)
    if args.json:
        head = [ln for ln in text.splitlines() if not ln.startswith('"')][:3]
        out = {"problem": args.problem, "constraints": int(head[0]), "blocks": head[2].split()}
        if args.output is None:
            out["sdpa"] = text
        else:
            args.output.write_text(text)
            out["output"] = str(args.output)
        _emit(out)
    else:
        _write(text, args.output)
    return EXIT_OK


def _read_solution(path: Path, problem: str):
    """Block matrices and slack values from a JSON or CSDP-style solution file."""
    from .certificate import BLOCK_TYPES, _bases, default_slack_multipliers

    text = path.read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return data.get("blocks", {}), data.get("slack", [])
    bases = _bases(problem)
    names = list(BLOCK_TYPES)
    mats = {n: [[0.0] * len(bases[n]) for _ in range(len(bases[n]))] for n in names}
    nslack = len(default_slack_multipliers(problem))
    slack = [0.0] * nslack
    lines = [ln for ln in text.splitlines() if ln.strip()]
    # first line is the dual vector; then "matno block i j value" with matno 2 holding the Gram matrices
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 5 or parts[0] != "2":
            continue
        blk, i, j, v = int(parts[1]), int(parts[2]) - 1, int(parts[3]) - 1, float(parts[4])
        if blk <= len(names):
            m = mats[names[blk - 1]]
            m[i][j] = v
            m[j][i] = v
        elif i == j and i < nslack:
            slack[i] = v
    return mats, slack


def cmd_round(args) -> int:
    from .certificate import emit_certificate, round_solution, verify

    blocks, slack = _read_solution(args.solution, args.problem)
    cert = round_solution(args.problem, blocks, slack, denominator_bound=args.bound)
    text = emit_certificate(cert)
    report = verify(cert)
    if args.output is not None:
        args.output.write_text(text)
    if args.json:
        out = {**report.to_dict(), "ok": report.ok}
        out["output" if args.output is not None else "certificate"] = (
            str(args.output) if args.output is not None else text
        )
        _emit(out)
    elif args.output is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.output}; verification {'passed' if report.ok else 'failed'}")
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    from .extremal import brute_force_min, duality_check

    report = brute_force_min(args.n, args.L, max_witnesses=args.witnesses)
    if args.json:
        _emit({**report.to_dict(), "duality": duality_check(report)})
    else:
        print(report.to_tsv())
    return EXIT_OK


def cmd_construct(args) -> int:
    from .extremal import (
        Quadruple,
        block_edge_counts,
        construction_g1,
        construction_g2,
        default_quadruple,
        edge_budget,
        long_cycle_construction,
    )
    from .graphs import cycle_edge_set

    info: dict = {"kind": args.kind, "n": args.n}
    if args.kind == "g1":
        g = construction_g1(args.n)
    elif args.kind == "g2":
        q = Quadruple(*args.quadruple) if args.quadruple else default_quadruple(args.n)
        g = construction_g2(args.n, q)
        info["quadruple"] = [q.a, q.b, q.c, q.d]
        info["blocks"] = block_edge_counts(q)
    else:
        g, parts = long_cycle_construction(args.n)
        info["parts"] = {k: len(v) for k, v in parts.items()}
    info["edges"] = g.num_edges()
    info["edge_budget"] = edge_budget(args.n)
    if args.n <= 64:
        info["cycle_edges"] = len(cycle_edge_set(g, args.L))
        info["L"] = args.L
    info["graph"] = g.encode()
    if args.json:
        _emit(info)
    else:
        for k, v in info.items():
            print(f"{k}\t{v}")
    return EXIT_OK


def cmd_qp(args) -> int:
    from .extremal import solve_nextremal_qp

    res = solve_nextremal_qp(args.n)
    rows = [([q.a, q.b, q.c, q.d], m) for q, m in zip(res.quadruples, res.margins)]
    if args.json:
        _emit({"n": args.n, "value": res.value,
               "solutions": [{"quadruple": q, "margin": format_number(m)} for q, m in rows]})
    else:
        print(f"value\t{res.value}")
        for q, m in rows:
            print("\t".join(map(str, q)) + f"\t{_num(m, args.approx)}")
    return EXIT_OK


def cmd_formulas(args) -> int:
    from .extremal import f_formula

    values = [(n, f_formula(n)) for n in range(1, args.n_max + 1)]
    if args.json:
        _emit({"values": [[n, f] for n, f in values]})
    else:
        for n, f in values:
            print(f"{n} {f}")
    return EXIT_OK


def cmd_stability(args) -> int:
    from .extremal import stability_optimizers

    rec = stability_optimizers()
    d = rec.to_dict()
    if args.json:
        _emit(d)
    else:
        for k, v in d.items():
            print(f"{k}\t{v}")
        if args.approx:
            print(f"path_argmax_approx\t{[round(float(x), 12) for x in rec.path_argmax]}")
    return EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "flags": cmd_flags,
    "target": cmd_target,
    "verify": cmd_verify,
    "export-sdpa": cmd_export,
    "round": cmd_round,
    "oracle": cmd_oracle,
    "construct": cmd_construct,
    "qp": cmd_qp,
    "formulas": cmd_formulas,
    "stability": cmd_stability,
}


def execute(args: argparse.Namespace) -> int:
    try:
        return COMMANDS[args.command](args)
    except FlagcertError as exc:
        print(f"flagcert: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"flagcert: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    return execute(args)


if __name__ == "__main__":
    sys.exit(main())
