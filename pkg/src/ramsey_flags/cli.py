"""Command-line front end.  Exit codes: 0 success, 1 failed verification, 2 usage error."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .certificates import (AlphaCertificate, CertificateError, LowerBoundCertificate, check_p_common,
                           load_certificate, verify_alpha, verify_lower)
from .densities import ConstGraphon, complement_w, from_graph, goodman_check, hom_density, objective
from .exact import format_rat, parse_rat
from .flags import Flag, a_coeff_lifted
from .graphs import (enumerate_graphs, format_edge_list, named_graph, named_graph_names, parse_graph,
                     to_graph6)
from .sdp_export import export_sdp
from .search import SearchConfig, hill_climb

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _rat(flag: str, text: str) -> Fraction:
    try:
        return parse_rat(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag}: not a rational number: {text!r}") from None


def _graph(flag: str, text: str):
    try:
        return parse_graph(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _graphon(flag: str, text: str):
    """``const:p``, ``co:G`` (1 - W_G, diagonal 1) or a graph read as W_G."""
    if text.startswith("co:"):
        return complement_w(from_graph(_graph(flag, text[3:])))
    if text.startswith("const:"):
        p = _rat(flag, text[6:])
        if not 0 <= p <= 1:
            raise UsageError(f"{flag}: constant {p} outside [0,1]")
        return ConstGraphon(p)
    return from_graph(_graph(flag, text))


def _flag(flag: str, text: str) -> Flag:
    try:
        return Flag.from_text(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


# ---------------------------------------------------------------------------
# reporting


def _emit(out, fmt: str, fields: dict, rows: list[dict] | None = None):
    """Print a flat record (and optionally a table) in the requested format."""
    if fmt == "json":
        obj = dict(fields)
        if rows is not None:
            obj["rows"] = rows
        json.dump(obj, out, indent=1)
        out.write("\n")
        return
    sep = "\t" if fmt == "tsv" else ": "
    for k, v in fields.items():
        out.write(f"{k}{sep}{_plain(v)}\n")
    if rows:
        keys = list(rows[0])
        if fmt == "tsv":
            out.write("\t".join(keys) + "\n")
        for r in rows:
            out.write("\t".join(_plain(r[k]) for k in keys) + "\n")


def _plain(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, (list, tuple)):
        return ",".join(_plain(x) for x in v)
    return str(v)


# ---------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args, out):
    if not 1 <= args.ell <= 8:
        raise UsageError(f"ell: {args.ell} outside 1..8")
    graphs = enumerate_graphs(args.ell)
    if args.count:
        if args.report == "text":
            out.write(f"{len(graphs)}\n")
        else:
            _emit(out, args.report, {"ell": args.ell, "count": len(graphs)})
        return EXIT_OK
    if args.report == "text":
        for g in graphs:
            out.write(to_graph6(g) + "\n")
    else:
        _emit(out, args.report, {"ell": args.ell, "count": len(graphs)},
              [{"graph6": to_graph6(g), "edges": format_edge_list(g)} for g in graphs])
    return EXIT_OK


def cmd_density(args, out):
    w = _graphon("--w", args.w)
    if args.h is not None:
        if args.h1 or args.h2 or args.lam:
            raise UsageError("--h: use either --h or --h1/--h2/--lambda")
        h = _graph("--h", args.h)
        target = complement_w(w) if args.complement else w
        value = hom_density(h, target)
        fields = {"h": format_edge_list(h), "complement": args.complement}
    else:
        if not (args.h1 and args.h2 and args.lam):
            raise UsageError("--h: give --h, or all of --h1, --h2 and --lambda")
        h1, h2 = _graph("--h1", args.h1), _graph("--h2", args.h2)
        lam = _rat("--lambda", args.lam)
        if not 0 <= lam <= 2:
            raise UsageError(f"--lambda: {lam} outside [0,2]")
        value = objective(h1, h2, lam, w, allow_empty=True)
        fields = {"h1": format_edge_list(h1), "h2": format_edge_list(h2), "lambda": format_rat(lam)}
    if args.report == "text":
        out.write(format_rat(value) + (f"  {float(value):.15g}" if args.float else "") + "\n")
    else:
        _emit(out, args.report, {**fields, "value": format_rat(value), "decimal": float(value)})
    return EXIT_OK


def cmd_coeff(args, out):
    f1, f2 = _flag("--f1", args.f1), _flag("--f2", args.f2)
    j = _graph("--j", args.j)
    try:
        value = a_coeff_lifted(f1, f2, j, j.n)
    except ValueError as exc:
        raise UsageError(f"--j: {exc}") from None
    if args.report == "text":
        out.write(format_rat(value) + "\n")
    else:
        _emit(out, args.report, {"f1": f1.to_text(), "f2": f2.to_text(), "j": format_edge_list(j),
                                 "value": format_rat(value)})
    return EXIT_OK


def _load(path, kind):
    try:
        cert = load_certificate(path)
    except FileNotFoundError:
        raise UsageError(f"certificate: no such file {path!r}") from None
    except (ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"certificate: {exc}") from None
    if not isinstance(cert, kind):
        raise UsageError(f"certificate: {path} is not a {'lower-bound' if kind is LowerBoundCertificate else 'alpha'} certificate")
    return cert


def cmd_verify_lower(args, out):
    cert = _load(args.certificate, LowerBoundCertificate)
    rep = verify_lower(cert, threads=args.threads)
    d = rep.to_dict()
    if args.report == "json":
        _emit(out, "json", d)
    else:
        fields = {"verdict": "PASS" if rep.verdict else "FAIL", "alpha": d["alpha"], "min": d["min"],
                  "graphs": len(rep.graphs), "psd": d["psd"], "tight": len(rep.tight)}
        rows = d["values"] if args.report == "tsv" or args.values else None
        _emit(out, args.report, fields, rows)
    return EXIT_OK if rep.verdict else EXIT_FAIL


def cmd_verify_alpha(args, out):
    cert = _load(args.certificate, AlphaCertificate)
    rep = verify_alpha(cert)
    d = rep.to_dict()
    if args.report != "json":
        d["verdict"] = "PASS" if rep.verdict else "FAIL"
    _emit(out, args.report, d)
    return EXIT_OK if rep.verdict else EXIT_FAIL


def cmd_check_common(args, out):
    h1, h2 = _graph("--h1", args.h1), _graph("--h2", args.h2)
    p = _rat("--p", args.p)
    w = _graphon("--w", args.w)
    try:
        lhs, rhs, ok = check_p_common(h1, h2, p, w)
    except CertificateError as exc:
        raise UsageError(f"--p: {exc}") from None
    _emit(out, args.report, {"holds": ok, "lhs": format_rat(lhs), "rhs": format_rat(rhs)})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_search(args, out):
    h1, h2 = _graph("--h1", args.h1), _graph("--h2", args.h2)
    lam = _rat("--lambda", args.lam)
    target = _rat("--target", args.target) if args.target else None
    try:
        cfg = SearchConfig(h1, h2, lam, n=args.n, d=args.d, max_iters=args.iters,
                           restarts=args.restarts, seed=args.seed, target=target)
    except ValueError as exc:
        raise UsageError(f"--n/--d/--lambda: {exc}") from None
    trace = hill_climb(cfg, threads=args.threads)
    best = trace.best_value
    if args.report == "json":
        _emit(out, "json", {
            "best": format_rat(best), "lowest_seen": format_rat(trace.lowest_seen),
            "best_graph": to_graph6(trace.best_graph), "evaluations": trace.evaluations},
            [{"restart": r, "iteration": i, "objective": format_rat(v)} for r, i, v in trace.steps])
    elif args.report == "tsv":
        out.write(trace.to_tsv())
    else:
        out.write(f"best: {format_rat(best)} ({float(best):.12g})\n")
        out.write(f"best graph: {format_edge_list(trace.best_graph)}\n")
        out.write(f"lowest seen: {format_rat(trace.lowest_seen)}\n")
        out.write(f"evaluations: {trace.evaluations}\n")
    return EXIT_OK


def _block_specs(text: str):
    """``auto`` or ``;``-free list like ``K1:3,named:K2:4`` of root:k pairs."""
    if text == "auto":
        return "auto"
    specs = []
    for item in text.split(","):
        root, sep, k = item.rpartition(":")
        if not sep or not k.isdigit():
            raise UsageError(f"--blocks: expected ROOT:K items, got {item!r}")
        specs.append((_graph("--blocks", root), int(k)))
    return specs


def cmd_export_sdp(args, out):
    h1, h2 = _graph("--h1", args.h1), _graph("--h2", args.h2)
    lam = None if args.lam == "variable" else _rat("--lambda", args.lam)
    try:
        problem = export_sdp(h1, h2, args.ell, _block_specs(args.blocks), lam, threads=args.threads)
    except ValueError as exc:
        raise UsageError(f"--blocks: {exc}") from None
    text = problem.to_sdpa()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        _emit(out, args.report, {"output": args.output, "constraints": problem.num_constraints,
                                 "graph_constraints": problem.graph_constraints,
                                 "blocks": len(problem.families)})
    else:
        out.write(text)
    return EXIT_OK


def cmd_named(args, out):
    if args.name is None:
        names = named_graph_names()
        if args.report == "json":
            _emit(out, "json", {"names": names})
        else:
            out.write("\n".join(names) + "\n")
        return EXIT_OK
    try:
        g = named_graph(args.name)
    except ValueError as exc:
        raise UsageError(f"name: {exc}") from None
    _emit(out, args.report, {"name": args.name, "vertices": g.n, "edges": g.num_edges,
                             "edge_list": format_edge_list(g), "graph6": to_graph6(g)})
    return EXIT_OK


def cmd_goodman(args, out):
    w = _graphon("--w", args.w)
    lhs, rhs = goodman_check(w)
    _emit(out, args.report, {"holds": lhs == rhs, "lhs": format_rat(lhs), "rhs": format_rat(rhs)})
    return EXIT_OK if lhs == rhs else EXIT_FAIL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=["text", "tsv", "json"], default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)

    p = _Parser(prog="ramsey-flags", description="Exact flag-algebra certificates for Ramsey multiplicity.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--report", choices=["text", "tsv", "json"], default="text")
    p.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("enumerate", parents=[common], help="graphs on ell vertices up to isomorphism")
    s.add_argument("ell", type=int)
    s.add_argument("--count", action="store_true")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("density", parents=[common], help="t(H, W) or the objective")
    s.add_argument("--h")
    s.add_argument("--w", required=True, help="graph spec, co:GRAPH or const:p")
    s.add_argument("--complement", action="store_true", help="use 1 - W (diagonal 1)")
    s.add_argument("--h1")
    s.add_argument("--h2")
    s.add_argument("--lambda", dest="lam")
    s.add_argument("--float", action="store_true", help="also print a 15-digit decimal")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("coeff", parents=[common], help="flag product coefficient a(F1, F2; J)")
    s.add_argument("--f1", required=True, help="flag as 'k r; u-v,...'")
    s.add_argument("--f2", required=True)
    s.add_argument("--j", required=True)
    s.set_defaults(func=cmd_coeff)

    s = sub.add_parser("verify-lower", parents=[common], help="check a lower-bound certificate")
    s.add_argument("certificate")
    s.add_argument("--values", action="store_true", help="list the value at every graph")
    s.set_defaults(func=cmd_verify_lower)

    s = sub.add_parser("verify-alpha", parents=[common], help="check an alpha-certificate")
    s.add_argument("certificate")
    s.set_defaults(func=cmd_verify_alpha)

    s = sub.add_parser("check-common", parents=[common], help="(p,1-p)-common inequality at one graphon")
    s.add_argument("--h1", required=True)
    s.add_argument("--h2", required=True)
    s.add_argument("--p", required=True)
    s.add_argument("--w", required=True)
    s.set_defaults(func=cmd_check_common)

    s = sub.add_parser("search", parents=[common], help="switching hill climb over regular graphs")
    s.add_argument("--n", type=int, default=12)
    s.add_argument("--d", type=int, default=6)
    s.add_argument("--h1", required=True)
    s.add_argument("--h2", required=True)
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--iters", type=int, default=5000)
    s.add_argument("--restarts", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--target", help="stop once this value is reached")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("export-sdp", parents=[common], help="write the SDP in SDPA sparse format")
    s.add_argument("--h1", required=True)
    s.add_argument("--h2", required=True)
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--blocks", default="auto", help="auto or ROOT:K,ROOT:K,...")
    s.add_argument("--lambda", dest="lam", default="variable", help="p/q or variable")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_export_sdp)

    s = sub.add_parser("named", parents=[common], help="list or show named graphs")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_named)

    s = sub.add_parser("goodman", parents=[common], help="both sides of Goodman's identity")
    s.add_argument("--w", required=True)
    s.set_defaults(func=cmd_goodman)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads: must be at least 1")
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
