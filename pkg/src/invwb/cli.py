"""Command-line front end: ``invwb check | infer | corpus list | run``.

Exit codes: 0 success, 1 an obligation failed (check) or gold recall
fell short (infer), 2 a parse, configuration or usage error.  All
randomness comes from ``--seed`` (default 0), so JSON output is
byte-identical across runs with the same arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import corpus
from .engine import MODES, Checker, explain_failure, run_unchecked
from .errors import InvwbError, ParseError
from .inference import infer
from .inputs import InputCase, generate_inputs, input_from_json, parse_cli_arg
from .parser import parse_routines
from .program import Routine
from .values import show as show_value

OK, FAILED, ERROR = 0, 1, 2
DEFAULT_SEED = 0
DEFAULT_SUITE = 100
DEFAULT_BUDGET = 3
UNSUPPORTED_NOTE = "real-valued postcondition: inference unsupported"


class UsageError(InvwbError):
    pass


# ---------------------------------------------------------------------------
# Target resolution

class Target:
    """An entry id (optionally ``id:routine``) or a path to a .inv file."""

    def __init__(self, spec: str, policy_file: Optional[str] = None):
        self.spec = spec
        self.entry: Optional[corpus.Entry] = None
        self.note: Optional[str] = None
        name = None
        path = Path(spec)
        if path.suffix in (".inv", ".alg") or path.is_file():
            try:
                text = path.read_text()
            except OSError as exc:
                raise UsageError(f"cannot read {spec}: {exc.strerror}") from None
            self.routines = {r.name: r for r in parse_routines(text)}
            self.id = path.stem
            self.policies = _file_policies(self.routines, policy_file)
            self.infer_name = next(reversed(self.routines))
        else:
            entry_id, _, name = spec.partition(":")
            self.entry = corpus.get(entry_id)
            self.id = self.entry.id
            self.routines = dict(self.entry.routines)
            self.policies = dict(self.entry.inputs)
            if policy_file:
                self.policies.update(_read_policy(policy_file))
            self.infer_name = self.entry.infer
            self.note = self.entry.note
        self.selected = name or None
        if self.selected and self.selected not in self.routines:
            raise UsageError(f"{self.id} has no routine {self.selected!r} "
                             f"(has {', '.join(self.routines)})")

    def checked(self) -> List[Routine]:
        if self.selected:
            return [self.routines[self.selected]]
        return list(self.routines.values())

    def inference_target(self) -> Routine:
        return self.routines[self.selected or self.infer_name]

    def policy(self, r: Routine) -> dict:
        if r.name not in self.policies:
            raise UsageError(f"no input policy for routine {r.name}; pass --policy FILE")
        return self.policies[r.name]


def _read_policy(path: str) -> Dict[str, dict]:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read policy {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"policy {path} is not valid JSON: {exc}") from None


def _file_policies(routines: Dict[str, Routine], policy_file: Optional[str]) -> Dict[str, dict]:
    """Explicit policies first, then those of a corpus routine of the
    same name (so a sabotaged copy of an entry checks on its suite)."""
    out: Dict[str, dict] = {}
    if policy_file:
        out.update(_read_policy(policy_file))
    wanted = [n for n in routines if n not in out]
    if wanted:
        for e in corpus.load_corpus():
            for n in wanted:
                if n in e.inputs and n not in out:
                    out[n] = e.inputs[n]
    return out


# ---------------------------------------------------------------------------
# check

def check_routine(r: Routine, suite: Sequence[InputCase], mode: str = "gold") -> dict:
    counts: Dict[str, Dict[str, int]] = {}
    failures = []
    for n, case in enumerate(suite):
        _, report = Checker(r, mode).run(case.args, case.heap)
        for ob, by_status in report.counts().items():
            slot = counts.setdefault(ob, {})
            for status, k in by_status.items():
                slot[status] = slot.get(status, 0) + k
        if not report.ok:
            failures.append({
                "input": n,
                "case": case.to_json(),
                "verdicts": [v.to_json() for v in report.failing()],
                "snapshots": report.snapshots,
                "explanation": explain_failure(report),
            })
    return {
        "routine": r.name,
        "inputs": len(suite),
        "ok": not failures,
        "counts": {k: dict(sorted(v.items())) for k, v in sorted(counts.items())},
        "failures": failures,
    }


def cmd_check(target: Target, seed: int = DEFAULT_SEED, size: int = DEFAULT_SUITE,
              mode: str = "gold", replay: Optional[str] = None) -> dict:
    results = []
    for r in target.checked():
        if replay is not None:
            suite = [input_from_json(r, _load_case(replay))]
        else:
            suite = generate_inputs(r, target.policy(r), seed, size)
        results.append(check_routine(r, suite, mode))
    return {
        "command": "check",
        "target": target.id,
        "seed": seed,
        "suite_size": size,
        "mode": mode,
        "ok": all(x["ok"] for x in results),
        "routines": results,
    }


def _load_case(text: str) -> dict:
    """A witness as printed under ``case`` in a check report, given
    inline or as a file name."""
    p = Path(text)
    try:
        raw = p.read_text() if p.is_file() else text
        data = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read witness {text!r}: {exc}") from None
    if not isinstance(data, dict) or "args" not in data:
        raise UsageError('a witness is a JSON object with an "args" list')
    return data


def check_text(rep: dict) -> str:
    lines = []
    for r in rep["routines"]:
        summary = ", ".join(f"{ob} {sum(v.values())}" for ob, v in r["counts"].items())
        state = "all obligations pass" if r["ok"] else f"{len(r['failures'])} failing input(s)"
        lines.append(f"{r['routine']}: {r['inputs']} inputs, {state} ({summary})")
        for f in r["failures"]:
            args = json.dumps(f["case"]["args"], sort_keys=True)
            lines.append(f"  input #{f['input']} {args}")
            lines.extend("    " + x for x in f["explanation"].splitlines())
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# infer

def cmd_infer(target: Target, seed: int = DEFAULT_SEED, size: int = DEFAULT_SUITE,
              budget: int = DEFAULT_BUDGET) -> Tuple[dict, int]:
    r = target.inference_target()
    if target.note and "inference unsupported" in target.note:
        return ({"command": "infer", "entry": target.id, "routine": r.name,
                 "supported": False, "note": target.note}, FAILED)
    rep = infer(r, target.policy(r), seed=seed, size=size, budget=budget, entry=target.id)
    out = {"command": "infer", "supported": True}
    out.update(rep.to_json())
    recall = rep.recall
    return out, OK if recall is None or recall == 1 else FAILED


def infer_text(rep: dict) -> str:
    if not rep.get("supported", True):
        return f"{rep['entry']}: {rep['note']}"
    c = rep["candidates"]
    g = rep["gold"]
    lines = [f"{rep['entry']} ({rep['routine']}, loop {rep['loop']}): "
             f"{c['generated']} candidates, {c['instances']} instances, "
             f"{c['survivors']} survivors, {c['killed']} killed, {c['vacuous']} set aside"]
    for s in rep["survivors"]:
        lines.append(f"  [{s['classification']}] {s['clause']}    ({s['id']})")
    lines.append(f"gold recall {g['matched']}/{g['total']}")
    for x in g["clauses"]:
        lines.append(f"  {'+' if x['matched_by'] else '-'} {x['clause']}"
                     + (f"  <- {x['matched_by']}" if x["matched_by"] else ""))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# corpus list, run

def cmd_corpus_list() -> List[dict]:
    return [{"id": e.id, "title": e.title, "routines": list(e.routines),
             "designated": e.designated, **({"note": e.note} if e.note else {})}
            for e in corpus.load_corpus()]


def cmd_run(target: Target, args: Sequence[str]) -> dict:
    routines = target.checked()
    if len(routines) > 1 and not target.selected:
        r = target.inference_target()
    else:
        r = routines[0]
    if len(args) != len(r.params):
        raise UsageError(f"{r.name} takes {len(r.params)} argument(s): "
                         + ", ".join(f"{d.name}: {d.type}" for d in r.params))
    values = [parse_cli_arg(a, d.type) for a, d in zip(args, r.params)]
    result = run_unchecked(r, values)
    decls = r.results if r.results else r.params
    if len(decls) == 1:
        named = [(decls[0].name, result)]
    else:
        named = list(zip([d.name for d in decls], result))
    return {"command": "run", "routine": r.name, "args": list(args),
            "result": {n: show_value(v) for n, v in named},
            "function": len(r.results) == 1}


def run_text(rep: dict) -> str:
    res = rep["result"]
    if rep["function"]:
        return next(iter(res.values()))
    return " ".join(f"{k}={v}" for k, v in res.items())


# ---------------------------------------------------------------------------
# main

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text",
                        help="output format (default text)")
    suite = argparse.ArgumentParser(add_help=False)
    suite.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default 0)")
    suite.add_argument("--suite-size", type=int, default=DEFAULT_SUITE,
                       help="inputs per routine (default 100)")
    suite.add_argument("--policy", help="JSON file mapping routine names to input policies")

    p = argparse.ArgumentParser(prog="invwb", description="Check and infer loop invariants.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common, suite], help="check every proof obligation")
    c.add_argument("target", help="corpus entry id, id:routine, or a .inv file")
    c.add_argument("--mode", choices=MODES, default="gold",
                   help="which invariant clauses to check (default gold)")
    c.add_argument("--replay", metavar="WITNESS",
                   help="run one input, given as the JSON 'case' of a failure report")

    i = sub.add_parser("infer", parents=[common, suite], help="infer invariants of an entry")
    i.add_argument("target", help="corpus entry id, id:routine, or a .inv file")
    i.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="mutation depth (default 3)")

    cp = sub.add_parser("corpus", help="corpus commands")
    csub = cp.add_subparsers(dest="corpus_command", required=True)
    csub.add_parser("list", parents=[common], help="list corpus entries")

    r = sub.add_parser("run", parents=[common], help="run a routine without checking")
    r.add_argument("target", help="corpus entry id, id:routine, or a .inv file")
    r.add_argument("args", nargs="*", help="arguments; arrays as JSON lists")
    return p


def _emit(data, fmt: str, text: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(data, indent=2) + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    try:
        if ns.command == "corpus":
            rows = cmd_corpus_list()
            _emit(rows, ns.format, "\n".join(f"{r['id']:<22}{r['title']}" for r in rows))
            return OK
        if ns.command == "run":
            rep = cmd_run(Target(ns.target), ns.args)
            _emit(rep, ns.format, run_text(rep))
            return OK
        if ns.suite_size < 1:
            raise UsageError("--suite-size must be positive")
        target = Target(ns.target, ns.policy)
        if ns.command == "check":
            rep = cmd_check(target, ns.seed, ns.suite_size, ns.mode, ns.replay)
            _emit(rep, ns.format, check_text(rep))
            return OK if rep["ok"] else FAILED
        if ns.budget < 0:
            raise UsageError("--budget must be non-negative")
        rep, code = cmd_infer(target, ns.seed, ns.suite_size, ns.budget)
        _emit(rep, ns.format, infer_text(rep))
        return code
    except ParseError as exc:
        print(f"invwb: parse error: {exc}", file=sys.stderr)
        return ERROR
    except InvwbError as exc:
        print(f"invwb: {exc}", file=sys.stderr)
        return ERROR
    except BrokenPipeError:  # e.g. piped into `head`
        sys.stderr.close()
        return OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
