"""
Commands for relative K_0 classes and unit-group quotients.
"""

import argparse

from kdet.errors import DomainError
from kdet.ktheory import chi_rel
from kdet.parsing import load_trivialization, parse_pair, resolve
from kdet.picardfiber import boundary, check_exact_sequence, quotient_units
from kdet.rings import parse_ring, unit_group
from kdet.schemas import ChiRelReport, ExactSequenceReport, QuotientReportModel, ValueReport


def chi_rel_command(args: argparse.Namespace) -> ChiRelReport:
    """
    Relative Euler characteristic of a complex over R, trivialized over S.
    """
    doc, cx = resolve(args.ref, "complex")
    pair = parse_pair(args.pair)
    if pair.source != doc.ring:
        raise DomainError(f"complex lives over {doc.ring.name}, pair starts at {pair.source.name}")
    t = load_trivialization(args.triv, pair.target) if args.triv else None
    result = chi_rel(cx, pair, t)
    fmt = pair.target.format
    return ChiRelReport(
        pair=pair.name,
        h=result.h,
        delta=fmt(result.delta),
        split_route=fmt(result.split_route),
        truncation_route=fmt(result.truncation_route),
        rel_class=result.rel_class.render(),
    )


def rel_class_command(args: argparse.Namespace) -> ValueReport:
    pair = parse_pair(args.pair)
    alpha = pair.target.parse(args.unit)
    return ValueReport(command="rel-class", ring=pair.name, value=boundary(alpha, pair).render())


def quotient_command(args: argparse.Namespace) -> QuotientReportModel:
    ring = parse_ring(args.ring)
    relations = [ring.parse(text) for text in (args.rel or [])]
    report = quotient_units(unit_group(ring), relations)
    fmt = ring.format
    return QuotientReportModel(
        ring=ring.name,
        group_order=report.group_order,
        group_invariants=list(report.group_invariants),
        relations=[fmt(r) for r in report.relations],
        subgroup_order=report.subgroup_order,
        quotient_order=report.quotient_order,
        quotient_invariants=list(report.quotient_invariants),
        collapsed_pairs=[f"{fmt(x)} ~ {fmt(y)}" for x, y in report.collapsed_pairs],
        injective=report.injective,
    )


def check_exact_command(args: argparse.Namespace) -> ExactSequenceReport:
    pair = parse_pair(args.pair)
    check = check_exact_sequence(pair, args.bound)
    return ExactSequenceReport(
        pair=pair.name,
        fiber_pi1=[pair.source.format(u) for u in check.fiber_pi1],
        boundary_kills_image=check.boundary_kills_image,
        boundary_kernel_is_image=check.boundary_kernel_is_image,
        classes_have_degree_zero=check.classes_have_degree_zero,
        checked=check.checked,
        passed=check.passed,
    )


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("chi-rel", parents=[common], help="relative Euler characteristic")
    parser.add_argument("ref", metavar="FILE#COMPLEX")
    parser.add_argument("--pair", required=True, help="ring pair R:S")
    parser.add_argument("--triv", help="file holding the trivialization 't MATRIX'")
    parser.set_defaults(handler=chi_rel_command)

    parser = subparsers.add_parser("rel-class", parents=[common], help="class of a unit of S in K_0(R,S)")
    parser.add_argument("--pair", required=True, help="ring pair R:S")
    parser.add_argument("--unit", required=True, help="unit of S")
    parser.set_defaults(handler=rel_class_command)

    parser = subparsers.add_parser("quotient", parents=[common], help="unit group modulo relations")
    parser.add_argument("--ring", required=True)
    parser.add_argument("--rel", action="append", help="relation unit; repeatable")
    parser.set_defaults(handler=quotient_command)

    parser = subparsers.add_parser("check-exact", parents=[common], help="check the six-term exact sequence")
    parser.add_argument("--pair", required=True, help="ring pair R:S")
    parser.add_argument("--bound", type=int, default=30, help="height bound for sampled units")
    parser.set_defaults(handler=check_exact_command)
