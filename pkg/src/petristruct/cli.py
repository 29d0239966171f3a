"""Command-line front end: ``petristruct <command> <file> [options]``.

Every command builds one report dictionary; ``--format json`` dumps it
and the text format is rendered from the same dictionary, so the two
never disagree.

Exit codes: 0 analysis completed, 2 input error, 3 inconclusive because a
state cap or node budget was hit, 4 contradiction detected.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Any, Sequence

from petristruct import __version__
from petristruct.bounds import (
    fraction_text,
    lambda_bound,
    level_set,
    marking_bound,
    omega,
    prune_dead_by_threshold,
    structurally_bounded_places,
    theta,
)
from petristruct.coverability import (
    DEFAULT_BUDGET,
    OMEGA,
    TreeBudgetError,
    build_lct,
    lct_labels,
    liveness_report,
)
from petristruct.graph import (
    DEFAULT_CAP,
    MarkingSet,
    Predicate,
    build_rg,
    home_states,
    is_home_space,
)
from petristruct.net import Net, NetDocument, NetError, classify, parse_net
from petristruct.semiflows import (
    GeneratingSet,
    minimal_support_semiflows,
    nonneg_generating_set,
    z_flow_basis,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3
EXIT_CONTRADICTION = 4

COMMANDS = ("semiflows", "bounds", "homespace", "coverability", "liveness", "report")


class InputError(Exception):
    pass


def _marking_json(q: Sequence) -> list:
    return ["ω" if x == OMEGA else int(x) for x in q]


def _fraction(b) -> str | None:
    return None if b.value is None else fraction_text(b.value)


# -- resolving inputs --------------------------------------------------------------

def load_document(path: str) -> NetDocument:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_net(text)


def resolve_init(doc: NetDocument, args) -> tuple[list[str], list[tuple]]:
    if args.init:
        names = [n.strip() for n in args.init.split(",") if n.strip()]
    elif args.marking:
        names = [args.marking]
    elif doc.init:
        names = list(doc.init)
    elif doc.markings:
        names = [next(iter(doc.markings))]
    else:
        raise InputError("no marking declared and none selected")
    for n in names:
        if n not in doc.markings:
            raise InputError(f"unknown marking {n!r}")
    return names, [doc.markings[n] for n in names]


def resolve_marking(doc: NetDocument, name: str) -> tuple:
    if name not in doc.markings:
        raise InputError(f"unknown marking {name!r}")
    return doc.markings[name]


def parse_query(doc: NetDocument, text: str, q0: tuple):
    """A home-space query: ``omega``, ``level f1,...,fd``, a finite set
    ``{(..), ..}`` or ``{name, ..}``, or a conjunction of comparisons."""
    path = Path(text)
    if "\n" not in text and len(text) < 256 and path.is_file():
        text = path.read_text()
    text = text.strip()
    net = doc.net
    if text == "omega":
        return "omega", omega(minimal_support_semiflows(net), q0)
    if text.startswith("level"):
        try:
            f = tuple(int(x) for x in text[len("level"):].replace(" ", "").split(","))
        except ValueError as exc:
            raise InputError(f"bad level-set weights in {text!r}") from exc
        return text, level_set(net, f, q0)
    if text.startswith("{") and text.endswith("}"):
        inner = text[1:-1].strip()
        if not inner:
            return text, MarkingSet.of([])
        if "(" in inner:
            vecs = re.findall(r"\(([^)]*)\)", inner)
            try:
                ms = [tuple(int(x) for x in v.split(",")) for v in vecs]
            except ValueError as exc:
                raise InputError(f"bad marking in {text!r}") from exc
            return text, MarkingSet.of(net.check_marking(q) for q in ms)
        return text, MarkingSet.of(resolve_marking(doc, n.strip()) for n in inner.split(","))
    return text, Predicate.parse(net, text)


# -- report sections ------------------------------------------------------------------

def net_section(doc: NetDocument) -> dict:
    net = doc.net
    cls = classify(net)
    return {
        "name": net.name,
        "places": list(net.places),
        "transitions": list(net.transitions),
        "markings": {k: list(v) for k, v in doc.markings.items()},
        "init": list(doc.init),
        "ordinary": cls.ordinary,
        "state_machine": cls.state_machine,
    }


def semiflows_section(net: Net, ring: str) -> dict:
    gens = z_flow_basis(net) if ring == "Z" else nonneg_generating_set(net)
    return {
        "ring": ring,
        "operation": "z_flow_basis" if ring == "Z" else "nonneg_generating_set",
        "places": list(net.places),
        "rows": [list(e) for e in gens],
    }


def bounds_section(net: Net, name: str, q0: tuple, gens: GeneratingSet) -> dict:
    sb = structurally_bounded_places(net)
    places = {}
    for p in net.places:
        b = lambda_bound(gens, p, q0)
        places[p] = {"lambda": _fraction(b), "bound": marking_bound(b),
                     "structurally_bounded": p in sb}
    trans = {t: {"theta": _fraction(theta(gens, t, q0))} for t in net.transitions}
    return {
        "marking": name,
        "q0": list(q0),
        "generating_set": [list(e) for e in gens],
        "places": places,
        "transitions": trans,
        "pruned": sorted(prune_dead_by_threshold(gens, q0)),
    }


def homespace_section(doc: NetDocument, names: list[str], init: list, query: str | None,
                      cap: int) -> dict:
    rg = build_rg(doc.net, init, cap)
    out: dict[str, Any] = {
        "init": names,
        "states": len(rg.nodes),
        "complete": rg.complete,
        "home_states": [list(h) for h in home_states(rg)] if rg.complete else None,
    }
    if query is not None:
        label, H = parse_query(doc, query, init[0])
        v = is_home_space(rg, H)
        out["query"] = {"query": label, "verdict": v.status,
                        "witness_sink": [list(q) for q in v.witness]}
    return out


def coverability_section(net: Net, name: str, q0: tuple, budget: int, dot: str | None) -> dict:
    try:
        tree = build_lct(net, q0, budget)
    except TreeBudgetError as exc:
        return {"marking": name, "complete": False, "error": str(exc)}
    if dot:
        Path(dot).write_text(tree.to_dot())
    unbounded = sorted({net.places[i] for n in tree.nodes
                        for i, x in enumerate(n.marking) if x == OMEGA})
    return {
        "marking": name,
        "complete": True,
        "nodes": len(tree.nodes),
        "labels": sorted(lct_labels(tree)),
        "unbounded_places": unbounded,
        "leaves": [{"marking": _marking_json(n.marking), "status": n.status}
                   for n in tree.nodes if n.status != "interior"],
    }


def liveness_section(doc: NetDocument, names: list[str], init: list, cap: int,
                     assume: str | None) -> dict:
    h = resolve_marking(doc, assume) if assume else None
    r = liveness_report(doc.net, init, cap, assume_home_state=h)
    return {
        "init": names,
        "live": r.live,
        "transitions": {t: {"status": v.status, "evidence": v.evidence}
                        for t, v in r.transitions.items()},
        "rg_complete": r.rg_complete,
        "states": r.states,
        "home_state": list(r.home_state) if r.home_state is not None else None,
        "assumed": r.assumed,
        "contradiction": r.contradiction,
        "notes": list(r.notes),
    }


# -- rendering ---------------------------------------------------------------------

def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(header)]
    fmt = lambda r: "  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip()
    return [fmt(header)] + [fmt(r) for r in rows]


def _show(x) -> str:
    if x is None:
        return "undefined"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, list):
        return "(" + ",".join(map(str, x)) + ")"
    return str(x)


def render_text(report: dict) -> str:
    lines = []
    net = report["net"]
    lines.append(f"net {net['name']}: {len(net['places'])} places, "
                 f"{len(net['transitions'])} transitions, "
                 f"ordinary={_show(net['ordinary'])}, state machine={_show(net['state_machine'])}")
    s = report.get("semiflows")
    if s:
        lines += ["", f"semiflows over {s['ring']} ({len(s['rows'])}):"]
        lines += _table(s["places"], [[str(x) for x in r] for r in s["rows"]])
    b = report.get("bounds")
    if b:
        lines += ["", f"bounds at {b['marking']} = {_show(b['q0'])}:"]
        lines += _table(["place", "lambda", "bound", "struct. bounded"],
                        [[p, _show(v["lambda"]), _show(v["bound"]), _show(v["structurally_bounded"])]
                         for p, v in b["places"].items()])
        lines += _table(["transition", "theta"],
                        [[t, _show(v["theta"])] for t, v in b["transitions"].items()])
        lines.append("dead by threshold: " + (", ".join(b["pruned"]) or "none"))
    h = report.get("homespaces")
    if h:
        lines += ["", f"reachability from {', '.join(h['init'])}: {h['states']} states, "
                      f"complete={_show(h['complete'])}"]
        if h["home_states"] is not None:
            lines.append("home states: " + (" ".join(_show(q) for q in h["home_states"]) or "none"))
        if "query" in h:
            qv = h["query"]
            lines.append(f"home space {qv['query']}: {qv['verdict']}")
            if qv["witness_sink"]:
                lines.append("  sink missed: " + " ".join(_show(q) for q in qv["witness_sink"]))
    c = report.get("coverability")
    if c:
        lines += [""]
        if not c["complete"]:
            lines.append(f"coverability tree from {c['marking']}: {c['error']}")
        else:
            lines.append(f"coverability tree from {c['marking']}: {c['nodes']} nodes")
            lines.append("labels: " + (", ".join(c["labels"]) or "none"))
            lines.append("unbounded places: " + (", ".join(c["unbounded_places"]) or "none"))
    lv = report.get("liveness")
    if lv:
        lines += ["", f"liveness from {', '.join(lv['init'])}:"]
        lines += _table(["transition", "verdict", "evidence"],
                        [[t, v["status"], v["evidence"]] for t, v in lv["transitions"].items()])
        verdict = {True: "live", False: "not live", None: "undecided"}[lv["live"]]
        lines.append(f"net: {verdict}")
        if lv["home_state"] is not None:
            tag = " (assumed)" if lv["assumed"] else ""
            lines.append(f"home state: {_show(lv['home_state'])}{tag}")
        if lv["contradiction"]:
            lines.append(f"CONTRADICTION: {lv['contradiction']}")
        lines += [f"note: {n}" for n in lv["notes"]]
    m = report["meta"]
    lines += ["", f"petristruct {m['version']}, max states {m['max_states']}"]
    return "\n".join(lines) + "\n"


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="petristruct",
                                 description="Structural and behavioural analysis of Petri nets.")
    ap.add_argument("--version", action="version", version=f"petristruct {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("file")
    ap.add_argument("--marking", help="marking name for single-marking analyses")
    ap.add_argument("--init", help="comma-separated marking names forming Init")
    ap.add_argument("--ring", choices=("Z", "N"), default="N")
    ap.add_argument("--max-states", type=int, default=DEFAULT_CAP)
    ap.add_argument("--max-nodes", type=int, default=DEFAULT_BUDGET,
                    help="node budget of coverability trees")
    ap.add_argument("--format", choices=("json", "text"), default="text")
    ap.add_argument("--assume-home-state", metavar="NAME")
    ap.add_argument("--query", help="home-space query, inline or a file")
    ap.add_argument("--dot", metavar="FILE", help="write the coverability tree in DOT")
    return ap


def run(args) -> tuple[dict, int]:
    doc = load_document(args.file)
    net = doc.net
    if args.max_states <= 0:
        raise InputError("--max-states must be positive")
    report: dict[str, Any] = {
        "net": net_section(doc),
        "semiflows": None, "bounds": None, "homespaces": None,
        "coverability": None, "liveness": None,
        "meta": {"version": __version__, "command": args.command,
                 "max_states": args.max_states, "max_nodes": args.max_nodes},
    }
    cmd = args.command
    code = EXIT_OK
    if cmd in ("semiflows", "report"):
        report["semiflows"] = semiflows_section(net, args.ring)
    if cmd in ("bounds", "homespace", "coverability", "liveness", "report"):
        names, init = resolve_init(doc, args)
    if cmd in ("bounds", "report"):
        report["bounds"] = bounds_section(net, names[0], init[0], nonneg_generating_set(net))
    if cmd in ("homespace", "report"):
        hs = homespace_section(doc, names, init, args.query, args.max_states)
        report["homespaces"] = hs
        if not hs["complete"]:
            code = EXIT_INCONCLUSIVE
    if cmd in ("coverability", "report"):
        cov = coverability_section(net, names[0], init[0], args.max_nodes, args.dot)
        report["coverability"] = cov
        if not cov["complete"]:
            code = EXIT_INCONCLUSIVE
    if cmd in ("liveness", "report"):
        lv = liveness_section(doc, names, init, args.max_states, args.assume_home_state)
        report["liveness"] = lv
        if lv["contradiction"]:
            return report, EXIT_CONTRADICTION
        if lv["live"] is None:
            code = EXIT_INCONCLUSIVE
    report["meta"]["exit_code"] = code
    return report, code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = run(args)
    except (InputError, NetError) as exc:
        print(f"petristruct: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report["meta"]["exit_code"] = code
    if args.format == "json":
        sys.stdout.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
