"""Command-line entry point: ``concentric <command> [options]``.

Commands
--------
validate      check the group law, diameter and shift isomorphism of a presentation
search        find and certify a ``tau`` with ``<R(H), x_tau> = Alt(H)``
verify        re-derive every verdict in a certificate document
lemma-suite   run the property suites and print a pass/fail table
graph-demo    build a small half-arc-transitive demo graph

Exit codes: 0 success, 1 invalid input or rejected presentation,
2 a check failed, 3 the BSGS memory cap was hit.

Each ``cmd_*`` function returns ``(exit_code, document)`` and does no I/O
of its own, so the test-suite can call them directly.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .core import ConcentricPresentation, load_presentation, validate_presentation
from .graphs import DEMOS, export_graph
from .groups import DEFAULT_MEMORY_MB, MEMORY_ENV, ResourceLimitError
from .instances import BUILTINS, builtin
from .lemmas import run_suite
from .tau import (
    PreconditionError,
    SearchFailure,
    pipeline,
    rejection_document,
    verify_certificate,
)

log = logging.getLogger("concentric")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CHECK_FAILED = 2
EXIT_RESOURCE = 3

#: certificate keys that legitimately differ between identical runs
TIMING_KEYS = ("timing",)


@dataclass
class RunConfig:
    command: str
    inputs: tuple[str, ...] = ()
    instance: str | None = None
    seed: int = 0
    workers: int = 1
    max_exhaustive_m: int = 9
    max_memory_mb: int = field(
        default_factory=lambda: int(os.environ.get(MEMORY_ENV, DEFAULT_MEMORY_MB)))
    out: str | None = None
    fmt: str = "dot"
    selector: str = "all"
    demo: str = "holt"
    force_exhaustive: bool = False

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")
        if self.max_exhaustive_m < 1:
            raise ValueError("--max-exhaustive-m must be positive")
        if self.max_memory_mb < 1:
            raise ValueError("memory cap must be positive")


# ---------------------------------------------------------------------------
# commands


def resolve_presentation(cfg: RunConfig) -> ConcentricPresentation:
    """The presentation named by ``--instance`` or read from ``--input``."""
    if cfg.instance and cfg.inputs:
        raise ValueError("give either --instance or --input, not both")
    if cfg.instance:
        return builtin(cfg.instance)
    if len(cfg.inputs) != 1:
        raise ValueError("exactly one presentation is required (--instance or --input)")
    try:
        return load_presentation(cfg.inputs[0])
    except OSError as exc:
        raise ValueError(f"cannot read {cfg.inputs[0]}: {exc.strerror}") from None


def cmd_validate(p: ConcentricPresentation) -> tuple[int, dict]:
    report = validate_presentation(p)
    doc = {"presentation": p.to_dict(), "ok": report.ok, **report.to_dict()}
    if not report.structural_ok:
        return EXIT_INVALID, doc
    return (EXIT_OK if report.ok else EXIT_CHECK_FAILED), doc


def cmd_search(p: ConcentricPresentation, cfg: RunConfig) -> tuple[int, dict]:
    try:
        cert = pipeline(p, seed=cfg.seed, workers=cfg.workers,
                        max_exhaustive_m=cfg.max_exhaustive_m,
                        force_exhaustive=cfg.force_exhaustive)
    except PreconditionError as exc:
        return EXIT_INVALID, rejection_document(p, str(exc))
    except SearchFailure as exc:
        return EXIT_CHECK_FAILED, {"status": "failed", "reason": str(exc),
                                   "presentation": p.to_dict(),
                                   "search_log": exc.search_log}
    doc = cert.to_dict()
    return (EXIT_OK if cert.certified else EXIT_CHECK_FAILED), doc


def cmd_verify(doc: dict) -> tuple[int, dict]:
    try:
        res = verify_certificate(doc)
    except (KeyError, TypeError, ValueError) as exc:
        return EXIT_INVALID, {"ok": False, "mismatches": [f"malformed certificate: {exc}"]}
    out = res.to_dict()
    out["status"] = doc.get("status")
    return (EXIT_OK if res.ok else EXIT_CHECK_FAILED), out


def cmd_lemma_suite(selector: str = "all") -> tuple[int, dict]:
    rows = run_suite(selector)
    ok = all(r["as_expected"] for r in rows)
    return (EXIT_OK if ok else EXIT_CHECK_FAILED), {"selector": selector, "ok": ok, "checks": rows}


def cmd_graph_demo(name: str, fmt: str = "dot") -> tuple[int, dict, bytes]:
    if name not in DEMOS:
        raise ValueError(f"unknown demo {name!r}; choose from {sorted(DEMOS)}")
    demo = DEMOS[name]()
    data = export_graph(demo.graph, fmt)
    doc = {
        "demo": name,
        "vertices": demo.graph.n,
        "edges": len(demo.graph.edges()),
        "verdict": demo.verdict.label,
        "reason": demo.verdict.reason,
        "transitivity": demo.report.to_dict(),
        "info": demo.info,
        "format": fmt,
    }
    return (EXIT_OK if demo.verdict.is_hat else EXIT_CHECK_FAILED), doc, data


def strip_timing(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k not in TIMING_KEYS}


# ---------------------------------------------------------------------------
# argument handling


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _lemma_table(doc: dict) -> str:
    lines = []
    for r in doc["checks"]:
        verdict = "PASS" if r["ok"] else "FAIL"
        note = "" if r["as_expected"] else "  (unexpected)"
        if not r["expected"] and not r["ok"]:
            note = "  (expected to fail)"
        lines.append(f"{verdict:4}  {r['name']:38} {r['detail']}{note}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concentric",
        description="Certify that tightly concentric 2-groups are 4-HAT-stabilizers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--instance", choices=sorted(BUILTINS), help="builtin presentation")
        sp.add_argument("--input", action="append", default=[], help="presentation JSON file")
        sp.add_argument("--out", help="write the JSON result here instead of stdout")

    sp = sub.add_parser("validate", help="validate a presentation")
    add_source(sp)

    sp = sub.add_parser("search", help="search for and certify tau")
    add_source(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1, help="processes for the exhaustive scan")
    sp.add_argument("--max-exhaustive-m", type=int, default=9,
                    help="largest m for exhaustive sub-searches (default 9)")
    sp.add_argument("--max-memory-mb", type=int, default=None,
                    help=f"BSGS memory cap (default ${MEMORY_ENV} or {DEFAULT_MEMORY_MB})")
    sp.add_argument("--exhaustive", action="store_true", help="skip the constructive route")

    sp = sub.add_parser("verify", help="re-verify a certificate")
    sp.add_argument("certificate", nargs="?", help="certificate JSON file")
    sp.add_argument("--input", action="append", default=[], help="certificate JSON file")
    sp.add_argument("--out")

    sp = sub.add_parser("lemma-suite", help="run the property suites")
    sp.add_argument("selector", nargs="?", default="all",
                    help="'all', a module name (core, perms, groups, tau, wreath, graphs) "
                         "or a check name")
    sp.add_argument("--format", dest="fmt", choices=("table", "json"), default="table")
    sp.add_argument("--out")

    sp = sub.add_parser("graph-demo", help="build a small HAT demo graph")
    sp.add_argument("name", choices=sorted(DEMOS))
    sp.add_argument("--format", dest="fmt", choices=("dot", "graphml"), default="dot")
    sp.add_argument("--out", help="write the exported graph here")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    kw: dict = {"command": args.command, "out": getattr(args, "out", None)}
    inputs = list(getattr(args, "input", []) or [])
    if getattr(args, "certificate", None):
        inputs.insert(0, args.certificate)
    kw["inputs"] = tuple(inputs)
    for name in ("instance", "seed", "workers", "max_exhaustive_m", "selector"):
        if getattr(args, name, None) is not None:
            kw[name] = getattr(args, name)
    if getattr(args, "max_memory_mb", None) is not None:
        kw["max_memory_mb"] = args.max_memory_mb
    if args.command == "graph-demo":
        kw["demo"], kw["fmt"] = args.name, args.fmt
    elif args.command == "lemma-suite":
        kw["fmt"] = args.fmt
    kw["force_exhaustive"] = bool(getattr(args, "exhaustive", False))
    return RunConfig(**kw)


def run(cfg: RunConfig) -> int:
    """Execute ``cfg`` with its memory cap in force; the previous cap is
    restored afterwards."""
    previous = os.environ.get(MEMORY_ENV)
    os.environ[MEMORY_ENV] = str(cfg.max_memory_mb)
    try:
        return _dispatch(cfg)
    finally:
        if previous is None:
            os.environ.pop(MEMORY_ENV, None)
        else:
            os.environ[MEMORY_ENV] = previous


def _dispatch(cfg: RunConfig) -> int:
    if cfg.command == "validate":
        code, doc = cmd_validate(resolve_presentation(cfg))
        _emit(dumps(doc), cfg.out)
        return code
    if cfg.command == "search":
        code, doc = cmd_search(resolve_presentation(cfg), cfg)
        _emit(dumps(doc), cfg.out)
        return code
    if cfg.command == "verify":
        if len(cfg.inputs) != 1:
            raise ValueError("verify needs exactly one certificate file")
        try:
            with open(cfg.inputs[0], encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ValueError(f"cannot read {cfg.inputs[0]}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ValueError(f"{cfg.inputs[0]}: not valid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise ValueError("a certificate must be a JSON object")
        code, res = cmd_verify(doc)
        _emit(dumps(res), cfg.out)
        return code
    if cfg.command == "lemma-suite":
        code, doc = cmd_lemma_suite(cfg.selector)
        _emit(dumps(doc) if cfg.fmt == "json" else _lemma_table(doc), cfg.out)
        return code
    if cfg.command == "graph-demo":
        code, doc, data = cmd_graph_demo(cfg.demo, cfg.fmt)
        if cfg.out:
            with open(cfg.out, "wb") as fh:
                fh.write(data)
            doc["written_to"] = cfg.out
        else:
            doc["export"] = data.decode("utf-8")
        sys.stdout.write(dumps(doc))
        return code
    raise ValueError(f"unknown command {cfg.command!r}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(config_from_args(args))
    except ResourceLimitError as exc:
        print(f"concentric: resource cap reached: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"concentric: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
