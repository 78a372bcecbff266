"""Command-line entry point: ``matroid-lab <command> ...``.

Every command builds a :class:`RunReport`.  With ``--json`` the report is
printed as sorted, indented JSON; otherwise a short human summary is printed.
Exit codes: 0 success, 1 a negative result the caller asked to certify,
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import acceptance
from .amalgam import proper_amalgam
from .constructions import (
    embed_ote_general,
    embed_ote_rank4,
    hypermodular_completion,
    nonsticky_certificate,
    nonsticky_witness,
    witness_invariants,
)
from .core import Matroid, are_isomorphic, parse_matroid, serialize_matroid
from .cuts import crapo_extend, enumerate_modular_cuts, generate_cut, reduce_defect_chain
from .errors import (
    ConstructionError,
    Inconclusive,
    IsOTE,
    MatroidError,
    NotIntersectable,
    NotNonModular,
    PreconditionFailed,
)
from .modularity import analyze, is_modular
from .named import FAMILIES, gen_named

# errors that describe the mathematics of valid input, not bad input
DOMAIN_ERRORS = (PreconditionFailed, NotIntersectable, NotNonModular, IsOTE, Inconclusive, ConstructionError)


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    errors: list[dict] = field(default_factory=list)
    timings: dict[str, float] | None = None
    exit_code: int = 0
    json_output: bool = False  # output mode, not part of the report

    def as_dict(self) -> dict:
        out = {
            "command": self.command,
            "inputs": self.inputs,
            "config": self.config,
            "results": self.results,
            "errors": self.errors,
            "exit_code": self.exit_code,
        }
        if self.timings is not None:
            out["timings"] = self.timings
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("MATROID_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"MATROID_LAB_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


# -- input / output helpers -------------------------------------------------------
def _read_input(path: str, report: RunReport) -> Matroid:
    data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    report.inputs[path] = hashlib.sha256(data).hexdigest()
    M = parse_matroid(data.decode("utf-8"))
    if not M.name:
        M.name = Path(path).stem if path != "-" else "stdin"
    return M


def _emit_matroid(M: Matroid, args, report: RunReport, key: str = "matroid") -> None:
    """Write ``M`` to ``--out`` if given, otherwise keep it for stdout."""
    text = serialize_matroid(M)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        report.results[key + "_file"] = args.out
    else:
        report.results[key] = text


def _emit_chain_log(log: dict, args, report: RunReport) -> None:
    report.results["chain"] = log
    if args.out:
        path = args.out + ".chain.json"
        Path(path).write_text(json.dumps(log, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        report.results["chain_file"] = path


def _split_sets(text: str) -> list[list[str]]:
    return [part.split() for part in text.split(";") if part.strip()]


# -- commands ----------------------------------------------------------------------
def cmd_analyze(args, report):
    M = _read_input(args.file, report)
    report.results.update(analyze(M, cap=args.cap_pairs))


def cmd_extend(args, report):
    M = _read_input(args.file, report)
    seed = _split_sets(args.flats)
    if args.to_modular:
        if len(seed) != 2:
            raise UsageError("--to-modular needs exactly two sets in --flats")
        chain = reduce_defect_chain(M, seed[0], seed[1], prefix=args.label or "_p", refresh=True)
        report.results["status"] = chain.status
        report.results["new_elements"] = chain.new_labels
        _emit_chain_log(chain.log(), args, report)
        _emit_matroid(chain.result, args, report)
        return
    cut = generate_cut(M, seed)
    N = crapo_extend(M, cut, args.label or M.fresh_label("_p"))
    report.results["cut_minimal"] = [list(c) for c in cut.labels()]
    report.results["cut_size"] = len(cut.members)
    _emit_matroid(N, args, report)


def cmd_cuts(args, report):
    M = _read_input(args.file, report)
    if args.enumerate:
        cuts = enumerate_modular_cuts(M)
        report.results["count"] = len(cuts)
        report.results["cuts"] = [[list(M.labels_of(F)) for F in c.minimal()] for c in cuts]
    elif args.flats:
        cut = generate_cut(M, _split_sets(args.flats))
        report.results["cut_minimal"] = [list(c) for c in cut.labels()]
        report.results["cut"] = [list(M.labels_of(F)) for F in cut.sorted()]
    else:
        raise UsageError("cuts needs --enumerate or --flats")


def cmd_amalgam(args, report):
    M1 = _read_input(args.file1, report)
    M2 = _read_input(args.file2, report)
    rep = proper_amalgam(M1, M2, brute_check=args.brute_check, samples=args.samples, seed=args.seed)
    report.results.update(rep.as_dict())
    if rep.amalgam is not None:
        _emit_matroid(rep.amalgam, args, report, "amalgam")
    if args.expect and rep.status != args.expect:
        report.exit_code = 1


def _certificate_target(args):
    if args.flat is None or args.hyperplane is None:
        raise UsageError("give both --flat and --hyperplane")
    return args.flat.split(), args.hyperplane.split()


def cmd_witness(args, report):
    M = _read_input(args.file, report)
    F, H = _certificate_target(args)
    w = nonsticky_witness(M, F, H)
    report.results.update(w.as_dict())
    report.results["failed_invariants"] = witness_invariants(w)
    _emit_chain_log({"chains": [c.log() for c in w.chains]}, args, report)
    _emit_matroid(w.N, args, report)


def cmd_certify(args, report):
    M = _read_input(args.file, report)
    if args.auto_pair or (args.flat is None and args.hyperplane is None):
        cert = nonsticky_certificate(M)
    else:
        cert = nonsticky_certificate(M, *_certificate_target(args))
    report.results.update(cert.as_dict())
    report.results["status"] = cert.status
    _emit_chain_log(cert.chain.log(), args, report)
    _emit_matroid(cert.witness.N, args, report, "N2")
    if cert.status != "fails":
        report.exit_code = 1


def cmd_embed(args, report):
    M = _read_input(args.file, report)
    if args.rank4:
        chain = embed_ote_rank4(M)
    else:
        chain = embed_ote_general(M, args.budget)
    report.results["status"] = chain.status
    report.results["steps"] = len(chain)
    report.results["is_modular"] = is_modular(chain.result).holds
    _emit_chain_log(chain.log(), args, report)
    _emit_matroid(chain.result, args, report)


def cmd_hypermodular(args, report):
    M = _read_input(args.file, report)
    chain = hypermodular_completion(M, args.budget)
    report.results["status"] = chain.status
    report.results["steps"] = len(chain)
    _emit_chain_log(chain.log(), args, report)
    _emit_matroid(chain.result, args, report)


def cmd_gen(args, report):
    M = gen_named(args.family, *args.params)
    _emit_matroid(M, args, report)


def cmd_isomorphic(args, report):
    M1 = _read_input(args.file1, report)
    M2 = _read_input(args.file2, report)
    iso = are_isomorphic(M1, M2)
    report.results["isomorphic"] = iso is not None
    report.results["bijection"] = iso
    if args.expect is not None and (iso is not None) != (args.expect == "yes"):
        report.exit_code = 1


def cmd_selftest(args, report):
    results = acceptance.run_all(args.only or None)
    report.results["checks"] = [
        {"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail} for r in results
    ]
    report.results["passed"] = sum(r.passed for r in results)
    report.results["total"] = len(results)
    if report.timings is not None:
        report.timings.update({f"check_{r.number}": round(r.seconds, 3) for r in results})
    if not args.json:
        for r in results:
            print(r.line())
    if not all(r.passed for r in results):
        report.exit_code = 1


# -- parser ------------------------------------------------------------------------
def _int_like(text: str) -> int:
    try:
        return int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the run report as JSON")
    common.add_argument("--seed", type=int, default=1, help="seed for every sampled check (default 1)")
    common.add_argument("--cap-pairs", type=_int_like, default=10**7, help="cap on enumerated pairs/quadruples (default 1e7)")
    common.add_argument("--threads", type=int, default=None, help="worker count (default: MATROID_LAB_THREADS or CPU count)")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    common.add_argument("--out", help="write the resulting matroid here (chain logs go to OUT.chain.json)")

    p = argparse.ArgumentParser(prog="matroid-lab", description="Finite matroid extensions, amalgams and embeddings.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", parents=[common], help="modularity summary of a matroid")
    s.add_argument("file")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("extend", parents=[common], help="single-element extension by a generated modular cut")
    s.add_argument("file")
    s.add_argument("--flats", required=True, help='generating flats, e.g. "a b c; d e f"')
    s.add_argument("--to-modular", action="store_true", help="extend repeatedly until the two flats form a modular pair")
    s.add_argument("--label", help="label (or label prefix with --to-modular) for new elements")
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("cuts", parents=[common], help="list or generate modular cuts")
    s.add_argument("file")
    s.add_argument("--enumerate", action="store_true", help="all modular cuts (tiny inputs only)")
    s.add_argument("--flats", help="print the cut generated by these flats")
    s.set_defaults(func=cmd_cuts)

    s = sub.add_parser("amalgam", parents=[common], help="proper amalgam over the shared labels")
    s.add_argument("file1")
    s.add_argument("file2")
    s.add_argument("--brute-check", action="store_true", help="re-verify ξ against the rank axioms on subsets")
    s.add_argument("--samples", type=_int_like, default=100_000, help="sample count for --brute-check above 12 elements")
    s.add_argument("--expect", choices=["exists", "fails"], help="exit 1 unless the status matches")
    s.set_defaults(func=cmd_amalgam)

    for name, func, text in (
        ("witness", cmd_witness, "erected extension used against an intersection point"),
        ("certify-nonsticky", cmd_certify, "two extensions with no proper amalgam"),
    ):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("file")
        s.add_argument("--flat", help="flat F, space separated labels")
        s.add_argument("--hyperplane", help="hyperplane H, space separated labels")
        if name == "certify-nonsticky":
            s.add_argument("--auto-pair", action="store_true", help="pick the pair automatically")
        s.set_defaults(func=func)

    s = sub.add_parser("embed-ote", parents=[common], help="extend towards a matroid in which every non-modular pair is unintersectable")
    s.add_argument("file")
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--rank4", action="store_true", help="single pass over line pairs (rank 4, hypermodular input)")
    mode.add_argument("--budget", type=int, help="general search with at most this many extension steps")
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("hypermodular-complete", parents=[common], help="extend until all hyperplane pairs are modular")
    s.add_argument("file")
    s.add_argument("--budget", type=int, required=True)
    s.set_defaults(func=cmd_hypermodular)

    s = sub.add_parser("gen", parents=[common], help=f"named matroid ({', '.join(FAMILIES)})")
    s.add_argument("family")
    s.add_argument("params", nargs="*")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("isomorphic", parents=[common], help="search for a flat-preserving bijection")
    s.add_argument("file1")
    s.add_argument("file2")
    s.add_argument("--expect", choices=["yes", "no"], help="exit 1 unless the answer matches")
    s.set_defaults(func=cmd_isomorphic)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    s.add_argument("--only", type=int, nargs="*", help="check numbers to run")
    s.set_defaults(func=cmd_selftest)
    return p


def _print_human(report: RunReport) -> None:
    res = report.results
    texts = {k: res[k] for k in ("matroid", "amalgam", "N2") if isinstance(res.get(k), str)}
    for key, value in res.items():
        if key in texts or key in ("chain", "checks"):
            continue
        print(f"{key}: {json.dumps(value, ensure_ascii=False) if isinstance(value, (dict, list)) else value}")
    if "chain" in res:
        print(f"chain: {len(res['chain'].get('steps', res['chain'].get('chains', [])))} entries (full log with --json or --out)")
    for err in report.errors:
        print(f"error: {err['type']}: {err['message']}", file=sys.stderr)
    for key, text in texts.items():
        if len(texts) > 1 or report.command != "gen":
            print(f"--- {key}")
        sys.stdout.write(text)


def dispatch(argv: list[str] | None = None) -> tuple[int, RunReport]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = 0 if exc.code in (0, None) else 2
        return code, RunReport(command="usage", exit_code=code)
    report = RunReport(command=args.command, json_output=args.json)
    try:
        threads = resolve_threads(args.threads)
    except UsageError as exc:
        report.errors.append({"type": "UsageError", "message": str(exc)})
        report.exit_code = 2
        return 2, report
    report.config = {"seed": args.seed, "cap_pairs": args.cap_pairs, "threads": threads}
    if args.timings:
        report.timings = {}
    start = time.perf_counter()
    try:
        args.func(args, report)
    except DOMAIN_ERRORS as exc:
        report.errors.append({"type": type(exc).__name__, "message": str(exc)})
        report.results.setdefault("status", "precondition-failed")
        report.exit_code = 1
    except (MatroidError, UsageError, OSError, UnicodeDecodeError) as exc:
        report.errors.append({"type": type(exc).__name__, "message": str(exc)})
        report.exit_code = 2
    if report.timings is not None:
        report.timings["total"] = round(time.perf_counter() - start, 3)
    return report.exit_code, report


def main(argv: list[str] | None = None) -> int:
    code, report = dispatch(argv)
    if report.command == "usage":
        return code
    if report.json_output:
        sys.stdout.write(report.to_json())
    else:
        _print_human(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
