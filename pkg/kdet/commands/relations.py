"""
Commands that harvest relations: scenarios, enumeration and the collapse certificate.
"""

import argparse
import random
from typing import List, Union

from kdet.config import get_settings
from kdet.errors import DomainError
from kdet.ktheory import collapse_certificate, enumerate_relations, find_witnesses, harvest, sample_relations
from kdet.parsing import parse_degrees, parse_primes, resolve
from kdet.rings import parse_ring
from kdet.schemas import (
    CertificateList,
    CertificateModel,
    EnumerationReport,
    HarvestReport,
    RelationModel,
    SampleReport,
)


def harvest_command(args: argparse.Namespace) -> HarvestReport:
    """
    Ratio of a triangle isomorphism scenario; square homotopies are solved for.
    """
    doc, slots = resolve(args.ref, "scenario")
    scenario = find_witnesses(
        doc.sequences[slots["delta1"]],
        doc.sequences[slots["delta2"]],
        doc.maps[slots["a"]],
        doc.maps[slots["b"]],
        doc.maps[slots["c"]],
    )
    relation = harvest(scenario)
    witnesses = []
    for name, h in (("first", scenario.h1), ("second", scenario.h2), ("third", scenario.h3)):
        if h is None:
            witnesses.append(f"{name}: strict")
        else:
            comps = ";".join(f"{i}:{m.format()}" for i, m in sorted(h.comps.items()) if m.rows and m.cols)
            witnesses.append(f"{name}: {comps or 'zero'}")
    return HarvestReport(ring=doc.ring.name, ratio=relation.format(), witnesses=witnesses)


def collapse_command(args: argparse.Namespace) -> CertificateList:
    certificates: List[CertificateModel] = []
    for p in parse_primes(args.p):
        cert = collapse_certificate(p)
        ring = cert.ring
        certificates.append(CertificateModel(
            prime=p,
            ring=ring.name,
            unit_group_order=cert.unit_group_order,
            generator=ring.format(cert.generator),
            generator_order=cert.generator_order,
            generator_is_nontrivial=cert.generator_is_nontrivial,
            homotopy=cert.homotopy.format(),
            ratio=cert.ratio_text(),
            ratio_value=cert.relation.format(),
            quotient_order=cert.quotient.quotient_order,
            quotient_invariants=list(cert.quotient.quotient_invariants),
            non_injective=cert.non_injective,
            k1_not_isomorphic=cert.k1_not_isomorphic,
            acyclic_cone_iff_iso=cert.acyclic_cone_iff_iso,
            verified=cert.verify(),
        ))
    return CertificateList(certificates=certificates)


def enumerate_command(args: argparse.Namespace) -> Union[EnumerationReport, SampleReport]:
    """
    Exhaustive search over a finite ring, or --samples random scenarios over any ring.
    """
    ring = parse_ring(args.ring)
    if args.max_rank < 1:
        raise DomainError(f"--max-rank must be positive, got {args.max_rank}")
    if args.samples is not None:
        if args.samples < 1:
            raise DomainError(f"--samples must be positive, got {args.samples}")
        seed = args.seed if args.seed is not None else get_settings().seed
        relations = sample_relations(ring, args.samples, random.Random(seed), args.max_rank)
        return SampleReport(
            ring=ring.name,
            samples=args.samples,
            seed=seed,
            nontrivial=[RelationModel(ratio=r.format(), provenance=r.provenance)
                        for r in relations if r.ratio != ring.one],
        )
    lo, hi = parse_degrees(args.degrees)
    relations = enumerate_relations(ring, args.max_rank, (lo, hi), workers=args.workers)
    return EnumerationReport(
        ring=ring.name,
        max_rank=args.max_rank,
        degrees=f"{lo}:{hi}",
        relations=[RelationModel(ratio=r.format(), provenance=r.provenance) for r in relations],
    )


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("harvest", parents=[common], help="ratio of a triangle isomorphism")
    parser.add_argument("ref", metavar="FILE#SCENARIO")
    parser.set_defaults(handler=harvest_command)

    parser = subparsers.add_parser("collapse", parents=[common], help="dual-number collapse certificate")
    parser.add_argument("--p", required=True, help="prime or comma-separated primes")
    parser.set_defaults(handler=collapse_command)

    parser = subparsers.add_parser("enumerate", parents=[common], help="search small scenarios for relations")
    parser.add_argument("--ring", required=True)
    parser.add_argument("--max-rank", type=int, default=2)
    parser.add_argument("--degrees", default="0:0", help="degree window lo:hi")
    parser.add_argument("--workers", type=int, default=None, help="process pool size")
    parser.add_argument("--samples", type=int, default=None, help="harvest N random scenarios instead")
    parser.set_defaults(handler=enumerate_command)
