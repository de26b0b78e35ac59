"""
Commands on single complexes and chain maps.
"""

import argparse
import random

from kdet.complexes import cohomology_all, is_homotopy_equivalence, is_qis
from kdet.config import get_settings
from kdet.detfunctor import det_qis, euler_iso, torsion_acyclic
from kdet.ktheory import chi_k0
from kdet.parsing import resolve
from kdet.schemas import (
    CohomologyGroupItem,
    CohomologyReport,
    EulerIsoReport,
    QisReport,
    ValueReport,
)


def cohomology_command(args: argparse.Namespace) -> CohomologyReport:
    """
    Cohomology of a complex in every degree, with the generators used for trivializations.
    """
    doc, cx = resolve(args.ref, "complex")
    groups = [
        CohomologyGroupItem(
            degree=g.degree,
            group=g.describe(),
            free_rank=g.free_rank,
            torsion=[doc.ring.format(t) for t in g.torsion],
            basis=g.generators.format(),
        )
        for g in cohomology_all(cx)
    ]
    return CohomologyReport(ring=doc.ring.name, groups=groups)


def qis_command(args: argparse.Namespace) -> QisReport:
    doc, f = resolve(args.ref, "map")
    qis = is_qis(f)
    return QisReport(
        ring=doc.ring.name,
        is_qis=qis,
        homotopy_inverse=is_homotopy_equivalence(f) is not None,
        det=det_qis(f).format() if qis else None,
    )


def det_command(args: argparse.Namespace) -> ValueReport:
    doc, f = resolve(args.ref, "map")
    return ValueReport(command="det", ring=doc.ring.name, value=det_qis(f).format())


def torsion_command(args: argparse.Namespace) -> ValueReport:
    doc, cx = resolve(args.ref, "complex")
    seed = args.seed if args.seed is not None else get_settings().seed
    value = torsion_acyclic(cx, random.Random(seed))
    return ValueReport(command="torsion", ring=doc.ring.name, value=doc.ring.format(value))


def euler_iso_command(args: argparse.Namespace) -> EulerIsoReport:
    doc, cx = resolve(args.ref, "complex")
    split, truncated = euler_iso(cx)
    fmt = doc.ring.format
    return EulerIsoReport(ring=doc.ring.name, split_route=fmt(split), truncation_route=fmt(truncated),
                          agree=split == truncated)


def chi_command(args: argparse.Namespace) -> ValueReport:
    doc, cx = resolve(args.ref, "complex")
    return ValueReport(command="chi", ring=doc.ring.name, value=str(chi_k0(cx)))


def register(subparsers, common: argparse.ArgumentParser) -> None:
    for verb, handler, kind, text in (
        ("cohomology", cohomology_command, "complex", "cohomology groups and bases"),
        ("qis", qis_command, "map", "quasi-isomorphism check"),
        ("det", det_command, "map", "determinant of a quasi-isomorphism"),
        ("torsion", torsion_command, "complex", "torsion of an acyclic complex"),
        ("euler-iso", euler_iso_command, "complex", "Euler isomorphism over a field, both routes"),
        ("chi", chi_command, "complex", "Euler characteristic in K_0"),
    ):
        parser = subparsers.add_parser(verb, parents=[common], help=text)
        parser.add_argument("ref", metavar=f"FILE#{kind.upper()}")
        parser.set_defaults(handler=handler)
