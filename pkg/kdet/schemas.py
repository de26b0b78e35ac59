"""
Pydantic schemas for command reports.

Every command returns one of these models. ``--json`` prints
``model_dump_json``; otherwise ``to_text`` renders stable ``key = value`` lines
in field order.
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict


def _render_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return "[" + ", ".join(_render_scalar(v) for v in value) + "]"
    return str(value)


class Report(BaseModel):
    """Base class with the generic text rendering."""

    model_config = ConfigDict(frozen=True)

    def to_text(self) -> str:
        return "\n".join(self._lines(""))

    def _lines(self, prefix: str) -> List[str]:
        lines = []
        for name in type(self).model_fields:
            value = getattr(self, name)
            key = f"{prefix}{name}"
            if isinstance(value, Report):
                lines.extend(value._lines(f"{key}."))
            elif isinstance(value, list) and value and isinstance(value[0], Report):
                for idx, item in enumerate(value):
                    lines.extend(item._lines(f"{key}[{idx}]."))
            elif value is not None:
                lines.append(f"{key} = {_render_scalar(value)}")
        return lines


# ==================== VALUE SCHEMAS ====================

class ValueReport(Report):
    """A single computed value; the text form is the bare value."""
    command: str
    ring: str
    value: str

    def to_text(self) -> str:
        return self.value


class EulerIsoReport(Report):
    ring: str
    split_route: str
    truncation_route: str
    agree: bool


# ==================== COHOMOLOGY SCHEMAS ====================

class CohomologyGroupItem(Report):
    degree: int
    group: str
    free_rank: int
    torsion: List[str]
    basis: str


class CohomologyReport(Report):
    ring: str
    groups: List[CohomologyGroupItem]

    def to_text(self) -> str:
        lines = []
        for g in self.groups:
            lines.append(f"H^{g.degree} = {g.group}")
            lines.append(f"basis^{g.degree} = {g.basis}")
        return "\n".join(lines)


class QisReport(Report):
    ring: str
    is_qis: bool
    homotopy_inverse: bool
    det: Optional[str] = None


# ==================== RELATIVE K0 SCHEMAS ====================

class ChiRelReport(Report):
    pair: str
    h: int
    delta: str
    split_route: str
    truncation_route: str
    rel_class: str

    def to_text(self) -> str:
        return self.rel_class


class QuotientReportModel(Report):
    ring: str
    group_order: int
    group_invariants: List[int]
    relations: List[str]
    subgroup_order: int
    quotient_order: int
    quotient_invariants: List[int]
    collapsed_pairs: List[str]
    injective: bool


class ExactSequenceReport(Report):
    pair: str
    fiber_pi1: List[str]
    boundary_kills_image: bool
    boundary_kernel_is_image: bool
    classes_have_degree_zero: bool
    checked: int
    passed: bool


# ==================== RELATION SCHEMAS ====================

class RelationModel(Report):
    ratio: str
    provenance: str


class HarvestReport(Report):
    ring: str
    ratio: str
    witnesses: List[str]


class EnumerationReport(Report):
    ring: str
    max_rank: int
    degrees: str
    relations: List[RelationModel]

    def to_text(self) -> str:
        lines = [f"ring = {self.ring}", f"max_rank = {self.max_rank}",
                 f"degrees = {self.degrees}", f"relations = {len(self.relations)}"]
        lines.extend(f"{r.ratio} <- {r.provenance}" for r in self.relations)
        return "\n".join(lines)


class SampleReport(Report):
    ring: str
    samples: int
    seed: int
    nontrivial: List[RelationModel]

    def to_text(self) -> str:
        lines = [f"ring = {self.ring}", f"samples = {self.samples}", f"seed = {self.seed}",
                 f"nontrivial = {len(self.nontrivial)}"]
        lines.extend(f"{r.ratio} <- {r.provenance}" for r in self.nontrivial)
        return "\n".join(lines)


class CertificateModel(Report):
    prime: int
    ring: str
    unit_group_order: int
    generator: str
    generator_order: int
    generator_is_nontrivial: bool
    homotopy: str
    ratio: str
    ratio_value: str
    quotient_order: int
    quotient_invariants: List[int]
    non_injective: bool
    k1_not_isomorphic: bool
    acyclic_cone_iff_iso: bool
    verified: bool


class CertificateList(Report):
    certificates: List[CertificateModel]

    def to_text(self) -> str:
        return "\n\n".join(c.to_text() for c in self.certificates)
