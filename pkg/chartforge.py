"""Command-line front door: ``chartforge <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Optional

from certificates import run_certificates
from chart_format import read_chart, serialize_chart
from chart_map import Chart, ChartError, ChartParseError, canonical_digest, complexity, validate, working_chart
from config import Settings, configure_logging, get_settings
from disks import DiskError, associated_disk, enumerate_disk_regions, find_lenses, find_m4_disks
from enumeration import EnumBudget, enumerate_charts
from harness import component_shape_census, verify_type_nonexistence
from io_calculus import enumerate_io_domains, io_balance
from moves import KINDS, applicable_moves, apply_move, find_move
from render import RenderStyle, render_svg
from report_store import ReportStore
from subgraph import SignaturePattern, TrackRole, chart_type, component_census, labels_present, tracks_of_label

logger = logging.getLogger(__name__)

OK, NEGATIVE, USAGE = 0, 1, 2

Command = Callable[[argparse.Namespace, Settings], int]


def _emit(lines, out: Optional[Path] = None) -> None:
    text = "".join(f"{line}\n" for line in lines)
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _labels(c: Chart, label: Optional[int]) -> list[int]:
    return [label] if label is not None else labels_present(c)


# -- commands -----------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace, settings: Settings) -> int:
    violations = validate(read_chart(args.chart))
    _emit(str(v) for v in violations)
    return NEGATIVE if violations else OK


def cmd_classify(args: argparse.Namespace, settings: Settings) -> int:
    c = read_chart(args.chart)
    work = working_chart(c)
    sig = chart_type(c)
    rows = [f"type\t{sig if sig else '-'}\t{'gapped' if sig and sig.gapped else '-'}\t{complexity(c)}"]
    for m in labels_present(work):
        rows.extend(f"component\t{comp.row()}" for comp in component_census(work, m))
    _emit(rows)
    return OK


def cmd_features(args: argparse.Namespace, settings: Settings) -> int:
    c = working_chart(read_chart(args.chart))
    rows = []
    for m in _labels(c, args.label):
        for loop in (t for t in tracks_of_label(c, m) if t.role == TrackRole.LOOP):
            try:
                inside = associated_disk(c, loop).interior_whites(c)
            except DiskError as exc:
                logger.warning("no associated disk for %s: %s", loop, exc)
                continue
            rows.append(f"loop\t{m}\t1\t-\t-\t{inside}\t{loop.key}")
        rows.extend(d.row(c) for d in enumerate_disk_regions(c, m, settings))
    rows.extend(
        lens.row(c) for lens in find_lenses(c) if args.label is None or args.label in lens.labels
    )
    rows.extend(d.row(c) for d in find_m4_disks(c, settings) if args.label is None or d.label == args.label)
    _emit(rows)
    return OK


def cmd_iocheck(args: argparse.Namespace, settings: Settings) -> int:
    c = read_chart(args.chart)
    rows = []
    unbalanced = 0
    for domain in enumerate_io_domains(c, args.label, settings):
        inward, outward = io_balance(c, domain, args.label)
        unbalanced += inward != outward
        rows.append(f"{domain}\t{inward}\t{outward}")
    _emit(rows)
    return NEGATIVE if unbalanced else OK


def cmd_moves(args: argparse.Namespace, settings: Settings) -> int:
    c = read_chart(args.chart)
    rows = []
    for m in applicable_moves(c, args.kinds, settings):
        rows.append(f"{m.id}\t{m.kind}\t{m.delta[0]},{m.delta[1]}\t{m.note}")
    _emit(rows)
    return OK


def cmd_apply(args: argparse.Namespace, settings: Settings) -> int:
    c = read_chart(args.chart)
    result = apply_move(c, find_move(c, args.move, settings), settings)
    _emit(serialize_chart(result).splitlines(), args.out)
    return OK


def _census(budget_text: Optional[str], settings: Settings) -> Optional[set[str]]:
    if budget_text is None:
        return None
    budget = EnumBudget.parse(budget_text)
    charts = list(enumerate_charts(budget, settings))
    shapes: set[str] = set()
    for m in range(1, budget.degree):
        shapes |= component_shape_census(budget, m, settings, charts=charts)
    return shapes


def cmd_certify(args: argparse.Namespace, settings: Settings) -> int:
    fired = run_certificates(read_chart(args.chart), _census(args.census_budget, settings), settings)
    _emit(cert.row() for cert in fired)
    return NEGATIVE if fired else OK


def cmd_enumerate(args: argparse.Namespace, settings: Settings) -> int:
    budget = EnumBudget.parse(args.budget)
    total = 0
    rows = [f"# budget\t{budget}"]
    for c in enumerate_charts(budget, settings):
        total += 1
        if args.documents:
            rows.extend(serialize_chart(c).splitlines())
            rows.append("")
        else:
            rows.append(f"{c.name}\t{canonical_digest(c)[:12]}\t{complexity(c)}\t{chart_type(c) or '-'}")
    rows.append(f"# total\t{total}")
    _emit(rows, args.out)
    return OK


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    pattern = SignaturePattern.parse(args.type)
    budget = EnumBudget.parse(args.budget)
    report = verify_type_nonexistence(
        pattern, budget, args.whites, settings, shapes=_census(args.census_budget, settings)
    )
    if not report.identities_hold():
        logger.error("report counts do not add up: %s", report.counts)
    _emit(report.to_tsv().splitlines(), args.out)
    if not args.no_save:
        report_id = ReportStore(settings=settings).save_report(report)
        sys.stderr.write(f"saved report {report_id}\n")
    sys.stderr.write(f"{report.verdict}\n")
    return OK if report.counts.survivors == 0 else NEGATIVE


def cmd_render(args: argparse.Namespace, settings: Settings) -> int:
    style = RenderStyle(
        labels_as_colors=not args.no_colors,
        show_orientations=not args.no_orientations,
        show_middle_arcs=args.middle_arcs,
        width=args.width,
        height=args.height,
    )
    svg = render_svg(read_chart(args.chart), style)
    if args.out is None:
        sys.stdout.write(svg)
    else:
        args.out.write_text(svg, encoding="utf-8")
    return OK


def cmd_reports(args: argparse.Namespace, settings: Settings) -> int:
    store = ReportStore(settings=settings)
    if args.show:
        report = store.get_report(args.show)
        if report is None:
            sys.stderr.write(f"no report {args.show}\n")
            return NEGATIVE
        _emit(report.to_tsv().splitlines())
        return OK
    _emit(
        f"{rid}\t{sig}\t{budget}\t{'-' if whites is None else whites}\t{survivors}"
        for rid, sig, budget, whites, survivors in store.list_reports()
    )
    return OK


# -- argument parsing --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chartforge", description="Chart calculus toolkit for surface-braid charts.")
    parser.add_argument("--log-level", help="logging level (default from CHARTFORGE_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    def chart_command(name: str, main: Command, summary: str) -> argparse.ArgumentParser:
        s = sub.add_parser(name, help=summary)
        s.add_argument("chart", type=Path, help="chart document")
        s.set_defaults(main=main)
        return s

    chart_command("validate", cmd_validate, "check the chart axioms")
    chart_command("classify", cmd_classify, "type signature and component census")

    s = chart_command("features", cmd_features, "loops, angled disks, lenses and M4-disks")
    s.add_argument("--label", type=int)

    s = chart_command("iocheck", cmd_iocheck, "inward/outward balance of every IO domain")
    s.add_argument("--label", type=int, required=True)

    s = chart_command("moves", cmd_moves, "list applicable move instances")
    s.add_argument("--kinds", nargs="+", choices=KINDS)

    s = chart_command("apply", cmd_apply, "apply one move instance and print the result")
    s.add_argument("--move", required=True, help="instance id as printed by 'moves'")
    s.add_argument("--out", type=Path)

    s = chart_command("certify", cmd_certify, "run the minimality certificates")
    s.add_argument("--census-budget", help="enumerate a shape census within this budget first")

    s = sub.add_parser("enumerate", help="isomorph-free charts within a budget")
    s.add_argument("--budget", required=True, help="'default' or n=..,w=..,c=..,e=..,h=..")
    s.add_argument("--documents", action="store_true", help="print full chart documents")
    s.add_argument("--out", type=Path)
    s.set_defaults(main=cmd_enumerate)

    s = sub.add_parser("verify", help="certify every enumerated chart of a type")
    s.add_argument("--type", required=True, help="white counts per label, e.g. 4,3")
    s.add_argument("--whites", type=int)
    s.add_argument("--budget", default="default")
    s.add_argument("--census-budget")
    s.add_argument("--out", type=Path)
    s.add_argument("--no-save", action="store_true", help="do not store the report")
    s.set_defaults(main=cmd_verify)

    s = chart_command("render", cmd_render, "draw the chart as SVG")
    s.add_argument("--out", type=Path)
    s.add_argument("--no-colors", action="store_true")
    s.add_argument("--no-orientations", action="store_true")
    s.add_argument("--middle-arcs", action="store_true")
    s.add_argument("--width", type=float, default=640.0)
    s.add_argument("--height", type=float, default=480.0)

    s = sub.add_parser("reports", help="list stored verification reports")
    s.add_argument("--show", metavar="ID")
    s.set_defaults(main=cmd_reports)
    return parser


def run_cli(argv: Optional[list[str]] = None, settings: Optional[Settings] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    settings = settings or get_settings()
    configure_logging(args.log_level or settings.log_level)
    try:
        return args.main(args, settings)
    except ChartParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return USAGE
    except (ChartError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE


def main() -> None:
    raise SystemExit(run_cli())


if __name__ == "__main__":
    main()
