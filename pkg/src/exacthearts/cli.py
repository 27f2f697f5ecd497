"""Command-line front end.

Every subcommand takes a workspace file and the same words can appear as a
line in the workspace's ``[queries]`` section, optionally followed by
``expect <headline>``.  ``run`` executes that section.

Exit status: 0 when every query is determinate and every expectation holds,
2 when some answer is Unknown, 1 on any error or failed expectation.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from .complexes import UNKNOWN, classify_acyclicity, is_quasi_iso
from .exact import check_maximally_nonnegative, check_resolving, is_deflation, is_epi_in_E, is_inflation, is_mono_in_E, whole_module_category
from .functors import FpFunctor, is_effaceable, membership_completion
from .hearts import (
    DEFAULT_WINDOW,
    DerivedUniverse,
    characterize_maximal_nonnegativity,
    compute_heart,
    completion_crosscheck,
    heart_membership,
    maximal_t_pairs,
    scan_heart,
)
from .linalg import Field, InputError
from .modules import RepresentationInfiniteError
from .resolutions import LiftError, ext_resolution, transfer_resolution
from .workspace import Workspace, parse, shipped_workspace

OK, UNK, FAIL, ERROR = "ok", "unknown", "fail", "error"

# Shape of one entry of the "results" list in JSON output.
REPORT_SCHEMA = {
    "query": str,
    "status": str,            # ok | unknown | fail | error
    "headline": str,
    "expect": (str, type(None)),
    "report": dict,
}


def validate_report(entry: dict) -> list[str]:
    """Schema problems of one JSON result entry (empty when valid)."""
    problems = [f"missing key {k}" for k in REPORT_SCHEMA if k not in entry]
    problems += [f"unexpected key {k}" for k in entry if k not in REPORT_SCHEMA]
    for k, t in REPORT_SCHEMA.items():
        if k in entry and not isinstance(entry[k], t):
            problems.append(f"{k} has type {type(entry[k]).__name__}")
    if entry.get("status") not in (OK, UNK, FAIL, ERROR):
        problems.append(f"bad status {entry.get('status')!r}")
    return problems


@dataclass
class Result:
    query: str
    status: str
    headline: str
    report: dict = dc_field(default_factory=dict)
    table: list = dc_field(default_factory=list)     # extra text-only lines
    expect: str | None = None

    def as_dict(self) -> dict:
        return {"query": self.query, "status": self.status, "headline": self.headline,
                "expect": self.expect, "report": _jsonable(self.report)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if x is None or isinstance(x, (bool, int, str)):
        return x
    return str(x)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _window(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    try:
        w = (int(lo), int(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like -2:2, got {text!r}") from None
    if not sep or w[0] > w[1]:
        raise argparse.ArgumentTypeError(f"window must look like -2:2, got {text!r}")
    return w


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


# ---------------------------------------------------------------------------
# Query handlers: (workspace, args) -> (status, headline, report, table)


def _q_check(ws: Workspace, a) -> tuple:
    names = a.names
    if not names:
        report = {
            "field": str(ws.field),
            "vertices": list(ws.algebra.quiver.vertices),
            "modules": {k: list(m.dims) for k, m in ws.modules.items()},
            "maps": sorted(ws.maps),
            "complexes": {k: [x.lo, x.hi] for k, x in ws.complexes.items()},
            "subcategories": {},
        }
        try:
            whole = whole_module_category(ws.algebra)
        except RepresentationInfiniteError:
            whole = None
        for k, e in ws.subcategories.items():
            entry = {"structure": e.structure, "generators": [list(g.dims) for g in e.generators],
                     "bound": e.multiplicity_bound}
            if whole is not None:
                entry["resolving_in_mod"] = _yn(check_resolving(e, whole).resolving)
            report["subcategories"][k] = entry
        head = (f"{len(ws.modules)} modules, {len(ws.maps)} maps, "
                f"{len(ws.subcategories)} subcategories, {len(ws.complexes)} complexes")
        return OK, head, report, []
    if len(names) > 2:
        raise InputError("check takes at most a subcategory and a map")
    e = ws.subcategory(names[0] if len(names) == 2 else None)
    f = ws.lookup("maps", names[-1])
    flags = {
        "mono": is_mono_in_E(f, e),
        "epi": is_epi_in_E(f, e),
        "inflation": bool(is_inflation(f, e)),
        "deflation": bool(is_deflation(f, e)),
    }
    head = "; ".join(f"{k}: {_yn(v)}" for k, v in flags.items())
    return OK, head, {"subcategory": e.name, "map": names[-1], **flags}, []


_COLUMNS = [("split_acyclic", "split"), ("e_acyclic", "E"), ("left_hom", "lHom"),
            ("left_ext", "lExt"), ("right_hom", "rHom"), ("right_ext", "rExt")]


def _q_classify(ws: Workspace, a) -> tuple:
    if len(a.names) not in (1, 2):
        raise InputError("classify takes [subcategory] complex")
    e = ws.subcategory(a.names[0] if len(a.names) == 2 else None)
    x = ws.lookup("complexes", a.names[-1])
    degrees = [a.degree] if a.degree is not None else list(range(x.lo, x.hi + 1))
    entries = {n: classify_acyclicity(x, e, n) for n in degrees}
    report = {str(n): ent.as_dict() for n, ent in entries.items()}
    table = ["degree " + " ".join(f"{h:>7}" for _, h in _COLUMNS)]
    for n, ent in entries.items():
        table.append(f"{n:>6} " + " ".join(f"{getattr(ent, k).status:>7}" for k, _ in _COLUMNS))
    bad = [n for n, ent in entries.items() if not ent.e_acyclic.yes]
    unknown = any(getattr(ent, k).status == UNKNOWN for ent in entries.values() for k, _ in _COLUMNS)
    head = "E-acyclic in every degree" if not bad else "not E-acyclic at " + ", ".join(map(str, bad))
    return (UNK if unknown else OK), head, report, table


def _resolution_dims(x) -> dict:
    return {str(n): list(x.term(n).dims) for n in range(x.lo, x.hi + 1)}


def _q_resolve(ws: Workspace, a) -> tuple:
    if len(a.names) != 2:
        raise InputError("resolve takes subcategory complex")
    e = ws.subcategory(a.names[0])
    x = ws.lookup("complexes", a.names[1])
    if a.source is None:
        r = ext_resolution(x, e)
        report = {"terms": _resolution_dims(x), "left_ext": {str(n): v.status for n, v in r.acyclicity.items()}}
        return OK, f"Ext-resolution over {e.name} of length {-x.lo if not x.is_zero() else 0}", report, []
    f_cat = ws.subcategory(a.source)
    xr = ext_resolution(x, f_cat)
    try:
        tr = transfer_resolution(xr, e, max_steps=a.depth)
    except LiftError as exc:
        raise InputError(str(exc)) from None
    report = {"terms": _resolution_dims(tr.w), "truncated": tr.truncated}
    if tr.truncated:
        return UNK, f"no resolution over {e.name} within {a.depth} steps", report, []
    report["quasi_isomorphism_in_" + f_cat.name] = is_quasi_iso(tr.f, f_cat)
    report["left_ext"] = {str(n): v.status for n, v in tr.resolution(e).acyclicity.items()}
    return OK, f"Ext-resolution over {e.name} of length {-tr.w.lo if not tr.w.is_zero() else 0}", report, []


def _q_functor(ws: Workspace, a) -> tuple:
    if len(a.names) != 2:
        raise InputError("functor takes subcategory map")
    e = ws.subcategory(a.names[0])
    F = FpFunctor(ws.lookup("maps", a.names[1]), e)
    eff = is_effaceable(F, e)
    mem = membership_completion(F, a.completion, e, depth=a.depth)
    report = {"dims": list(F.dims()), "effaceable": eff.status, "completion": a.completion,
              "member": mem.status, "detail": mem.detail, "resolution_length": mem.length}
    status = UNK if UNKNOWN in (eff.status, mem.status) else OK
    head = f"dims {tuple(F.dims())}; effaceable: {eff.status}; {a.completion}: {mem.status}"
    return status, head, report, []


def _universe(ws: Workspace, a) -> DerivedUniverse:
    return DerivedUniverse(ws.algebra, a.window or DEFAULT_WINDOW)


def _q_heart(ws: Workspace, a) -> tuple:
    n = a.names
    if a.action == "compute":
        if len(n) != 2:
            raise InputError("heart compute takes subcategory heart")
        desc = compute_heart(ws.subcategory(n[0]), n[1], window=a.window or DEFAULT_WINDOW)
        return (UNK if desc.truncated else OK), ", ".join(desc.names), desc.as_dict(), []
    if a.action == "compare":
        if len(n) != 1:
            raise InputError("heart compare takes subcategory")
        e, u = ws.subcategory(n[0]), _universe(ws, a)
        hs = {w: compute_heart(e, w, universe=u) for w in ("LHb", "RHb", "LHb(RHb)", "RHb(LHb)")}
        names = {w: d.names for w, d in hs.items()}
        rel = lambda p, q: "=" if names[p] == names[q] else "!="
        head = (f"LHb(RHb) {rel('LHb(RHb)', 'RHb')} RHb {rel('RHb', 'LHb')} LHb "
                f"{rel('LHb', 'RHb(LHb)')} RHb(LHb)")
        status = UNK if any(d.truncated for d in hs.values()) else OK
        return status, head, {w: ", ".join(v) for w, v in names.items()}, []
    if a.action == "member":
        if len(n) != 3:
            raise InputError("heart member takes subcategory complex heart")
        r = heart_membership(ws.lookup("complexes", n[1]), n[2], ws.subcategory(n[0]))
        return (UNK if r.status == UNKNOWN else OK), r.status, r.as_dict(), []
    if len(n) != 2:
        raise InputError("heart scan takes subcategory heart")
    s = scan_heart(ws.subcategory(n[0]), n[1], a.window or (-2, 2), a.bound or 1)
    status = UNK if (s.unknown or s.truncated) else OK
    return status, f"only stalks: {_yn(s.only_stalks)}", s.as_dict(), []


def _q_tpair(ws: Workspace, a) -> tuple:
    if len(a.names) != 1:
        raise InputError("tpair verify takes subcategory")
    m = maximal_t_pairs(ws.subcategory(a.names[0]), universe=_universe(ws, a))
    head = f"t-pairs: {_yn(m.left.t_pair)}, {_yn(m.right.t_pair)}; hearts match: {_yn(m.hearts_match)}"
    status = UNK if (m.left.truncated or m.right.truncated) else OK
    return status, head, m.as_dict(), []


def _q_maxneg(ws: Workspace, a) -> tuple:
    if len(a.names) > 1:
        raise InputError("maxneg takes [subcategory]")
    e = ws.subcategory(a.names[0] if a.names else None)
    r = check_maximally_nonnegative(e, a.bound)
    report = {"status": r.status, "bound": r.bound, "checked": r.checked, "truncated": r.truncated,
              "search_truncated": r.search_truncated, "certificate": r.certificate,
              "conditions": list(r.conditions)}
    if r.verified:
        head = f"VerifiedUpToBound({r.bound})"
    else:
        head = f"Counterexample({', '.join(r.conditions)})"
        report.update(source=list(r.source), target=list(r.target), coefficients=list(r.coefficients))
    status = UNK if r.truncated else OK
    if a.characterize:
        c = characterize_maximal_nonnegativity(e, a.bound or 1, a.window or (-2, 2))
        report["characterization"] = c.as_dict()
        if not c.consistent:
            status = FAIL
    return status, head, report, []


def _q_crosscheck(ws: Workspace, a) -> tuple:
    if len(a.names) != 1:
        raise InputError("crosscheck takes subcategory")
    r = completion_crosscheck(ws.subcategory(a.names[0]), universe=_universe(ws, a))
    status = {"equal": OK, "mismatch": FAIL}.get(r.status, UNK)
    return status, r.status, r.as_dict(), []


HANDLERS = {
    "check": _q_check, "classify": _q_classify, "resolve": _q_resolve, "functor": _q_functor,
    "heart": _q_heart, "tpair": _q_tpair, "maxneg": _q_maxneg, "crosscheck": _q_crosscheck,
}


# ---------------------------------------------------------------------------
# Argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--bound", type=int, default=None, help="multiplicity / search bound")
    p.add_argument("--window", type=_window, default=None, help="shift window lo:hi")
    p.add_argument("--depth", type=int, default=8, help="resolution depth")
    return p


def _io() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--field", type=Field.parse, default=None, help="q or fp:<p>; overrides the workspace")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for queries")
    return p


def build_parser(with_workspace: bool = True) -> argparse.ArgumentParser:
    cls = argparse.ArgumentParser if with_workspace else _Parser
    parents = [_common()] + ([_io()] if with_workspace else [])
    top = cls(prog="exacthearts", description="Exact subcategories, Ext-resolutions and hearts.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=cls)

    def add(name, help_text, sub_=sub, **kw):
        p = sub_.add_parser(name, help=help_text, parents=parents, **kw)
        if with_workspace:
            p.add_argument("workspace")
        p.add_argument("names", nargs="*")
        return p

    add("check", "validate the workspace, or test a map: check [E] map")
    p = add("classify", "per-degree acyclicity table: classify [E] complex")
    p.add_argument("--degree", type=int, default=None)
    p = add("resolve", "certify an Ext-resolution: resolve E complex [--from F]")
    p.add_argument("--from", dest="source", default=None, help="transfer from this resolving ambient")
    p = add("functor", "functor of a presentation: functor E map")
    p.add_argument("--completion", default="Rb", help="R, Rb, R<n> or Qlcat")
    heart = sub.add_parser("heart", help="compute, compare, scan or test hearts")
    hsub = heart.add_subparsers(dest="action", required=True, parser_class=cls)
    for act, h in (("compute", "heart compute E LHb|RHb|LH<n>|LHb(RHb)|..."),
                   ("compare", "heart compare E"),
                   ("member", "heart member E complex LHb"),
                   ("scan", "heart scan E LHb")):
        add(act, h, sub_=hsub)
    tp = sub.add_parser("tpair", help="maximal t-pairs")
    tsub = tp.add_subparsers(dest="action", required=True, parser_class=cls)
    add("verify", "tpair verify E", sub_=tsub)
    p = add("maxneg", "maximal non-negativity search: maxneg [E]")
    p.add_argument("--characterize", action="store_true", help="also compare the equivalent conditions")
    add("crosscheck", "heart against the resolving completion: crosscheck E")
    if with_workspace:
        r = sub.add_parser("run", help="run the [queries] section", parents=parents)
        r.add_argument("workspace")
        g = sub.add_parser("paper-examples", help="golden suite of worked examples", parents=parents)
        g.add_argument("--only", default=None, help="run one example by name")
    return top


_QUERY_PARSER = None


def _query_parser() -> argparse.ArgumentParser:
    global _QUERY_PARSER
    if _QUERY_PARSER is None:
        _QUERY_PARSER = build_parser(with_workspace=False)
    return _QUERY_PARSER


def _glue_negative_values(toks: list[str]) -> list[str]:
    """``--window -2:2`` -> ``--window=-2:2`` so argparse does not read -2:2 as a flag."""
    out = []
    for t in toks:
        if out and out[-1] in ("--window", "--degree", "--bound", "--depth") and t.startswith("-"):
            out[-1] = f"{out[-1]}={t}"
        else:
            out.append(t)
    return out


def split_query(line: str) -> tuple[list[str], str | None]:
    toks = _glue_negative_values(shlex.split(line))
    if "expect" in toks:
        i = toks.index("expect")
        return toks[:i], " ".join(toks[i + 1:])
    return toks, None


def run_query(ws: Workspace, line: str, defaults: argparse.Namespace | None = None) -> Result:
    """Run one query line; errors become results with status ``error``."""
    expect = None
    try:
        toks, expect = split_query(line)
        a = _query_parser().parse_args(toks)
        if defaults is not None:
            for k in ("bound", "window"):
                if getattr(a, k) is None:
                    setattr(a, k, getattr(defaults, k, None))
            if a.depth == 8 and getattr(defaults, "depth", 8) != 8:
                a.depth = defaults.depth
        status, head, report, table = HANDLERS[a.command](ws, a)
    except (InputError, ArithmeticError, RuntimeError, KeyError) as exc:
        return Result(line, ERROR, f"error: {exc}", {"error": str(exc)}, expect=expect)
    if expect is not None and " ".join(head.split()) != " ".join(expect.split()):
        status = FAIL
    return Result(" ".join(toks) if toks else line, status, head, report, table, expect)


def run_queries(ws: Workspace, lines: list[str], defaults=None, jobs: int = 1) -> list[Result]:
    if jobs <= 1:
        return [run_query(ws, q, defaults) for q in lines]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda q: run_query(ws, q, defaults), lines))


def exit_code(results: list[Result]) -> int:
    statuses = {r.status for r in results}
    if statuses & {FAIL, ERROR}:
        return 1
    return 2 if UNK in statuses else 0


# ---------------------------------------------------------------------------
# Golden examples


GOLDEN = [
    ("a2-left-heart", "a2_example", "heart compute E_sub LHb expect P2, I2, shift(P1,1)"),
    ("a2-right-heart", "a2_example", "heart compute E_sub RHb expect P1, P2, I2"),
    ("a2-iterated-hearts", "a2_example", "heart compare E_sub expect LHb(RHb) = RHb != LHb = RHb(LHb)"),
    ("a2-e-acyclic-middle", "a2_example", "classify A X --degree 0 expect E-acyclic in every degree"),
    ("a2-maximal-t-pairs", "a2_example", "tpair verify E_sub expect t-pairs: yes, yes; hearts match: yes"),
    ("a2-completion", "a2_example", "crosscheck E_sub expect equal"),
    ("a2-completion-projectives", "a2_example", "crosscheck Proj expect equal"),
    ("a2-not-maximal", "a2_example", "maxneg E_sub expect Counterexample(mono_not_inflation, epi_not_deflation)"),
    ("dual-maxneg", "dual_numbers", "maxneg E_split expect VerifiedUpToBound(2)"),
    ("dual-t-not-mono-epi", "dual_numbers",
     "check E_split tm expect mono: no; epi: no; inflation: no; deflation: no"),
    ("dual-left-hom-not-split", "dual_numbers", "classify E_split X --degree 1 expect not E-acyclic at 1"),
]


def golden_results(only: str | None = None) -> list[tuple[str, Result]]:
    cache: dict[str, Workspace] = {}
    out = []
    for name, wsname, q in GOLDEN:
        if only is not None and name != only:
            continue
        if wsname not in cache:
            cache[wsname] = parse(shipped_workspace(wsname))
        out.append((name, run_query(cache[wsname], q)))
    if only is not None and not out:
        raise InputError(f"no golden example named {only!r}")
    return out


# ---------------------------------------------------------------------------
# Output


def _render_value(v, indent: int) -> list[str]:
    pad = " " * indent
    if isinstance(v, dict):
        lines = []
        for k in sorted(v, key=str):
            x = v[k]
            if isinstance(x, dict) and x:
                lines.append(f"{pad}{k}:")
                lines.extend(_render_value(x, indent + 2))
            else:
                lines.append(f"{pad}{k}: {json.dumps(_jsonable(x), sort_keys=True)}")
        return lines
    return [pad + json.dumps(_jsonable(v), sort_keys=True)]


def render_text(results: list[Result], labels: list[str] | None = None) -> str:
    out = []
    for i, r in enumerate(results):
        label = f"{labels[i]}: " if labels else ""
        out.append(f"[{r.status}] {label}{r.query}")
        out.append(f"  => {r.headline}")
        if r.status == FAIL and r.expect is not None:
            out.append(f"  expected: {r.expect}")
        out.extend("  " + t for t in r.table)
        if r.status != ERROR:
            out.extend(_render_value(r.report, 2))
    return "\n".join(out) + "\n"


def render_json(results: list[Result], code: int, labels: list[str] | None = None) -> str:
    entries = [r.as_dict() for r in results]
    doc = {"exit_code": code, "results": entries}
    if labels:
        doc["labels"] = labels
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    labels = None
    try:
        if args.command == "paper-examples":
            pairs = golden_results(args.only)
            labels = [n for n, _ in pairs]
            results = [r for _, r in pairs]
        else:
            ws = parse(args.workspace, args.field)
            if args.command == "run":
                results = run_queries(ws, ws.queries, args, args.jobs)
            else:
                results = [run_query(ws, _strip_cli_only(argv, args.workspace), args)]
    except InputError as exc:
        print(f"exacthearts: {exc}", file=sys.stderr)
        return 1
    code = exit_code(results)
    if args.format == "json":
        sys.stdout.write(render_json(results, code, labels))
    else:
        sys.stdout.write(render_text(results, labels))
    return code


def _strip_cli_only(argv: list[str], workspace: str) -> str:
    """The query words of a command line: drop the workspace and io-only flags."""
    out, skip, dropped = [], False, False
    for t in argv:
        if skip:
            skip = False
            continue
        if t in ("--field", "--format", "--jobs"):
            skip = True
            continue
        if t.startswith(("--field=", "--format=", "--jobs=")):
            continue
        if t == workspace and not dropped:
            dropped = True
            continue
        out.append(t)
    return shlex.join(out)


if __name__ == "__main__":
    sys.exit(main())
