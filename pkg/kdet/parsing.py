"""
Reader and writer for the kdet input file format.

A file starts with a ``ring`` line and then holds named blocks::

    ring F3[e]

    complex C
      degree 0 rank 1
      degree 1 rank 1
      d 0 [[1+1*e]]

    map f from A to B
      at 0 [[e]]

    ses D
      i incl
      p proj
      split at 0 [[1],[0]]

    scenario S
      delta1 D
      delta2 D
      a f
      b g
      c k

Objects are referenced from the command line as ``FILE#NAME``. Lines starting
with ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from kdet.complexes import ChainMap, Complex, ShortExactSequence
from kdet.errors import InvalidChainMapError, InvalidComplexError, InvalidSesError, ParseError
from kdet.linalg import Matrix
from kdet.picardfiber import RelPair
from kdet.rings import Ring, parse_ring

_EMPTY_RE = re.compile(r"^\[\]\s*(\d+)\s*x\s*(\d+)$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")
_MATRIX_START_RE = re.compile(r"\[\s*\[|\[\]")


# ==================== MATRICES ====================

def parse_matrix(ring: Ring, text: str, path: Optional[str] = None, line: Optional[int] = None) -> Matrix:
    """Parse ``[[a,b],[c,d]]`` or ``[]RxC`` into a matrix over ``ring``."""
    text = text.strip()
    empty = _EMPTY_RE.match(text)
    if empty:
        rows, cols = int(empty.group(1)), int(empty.group(2))
        if rows and cols:
            raise ParseError(f"empty matrix literal with shape {rows}x{cols}", path, line)
        return Matrix.zeros(ring, rows, cols)
    if not (text.startswith("[[") and text.endswith("]]")):
        raise ParseError(f"malformed matrix {text!r}", path, line)
    body = text[2:-2]
    rows = []
    for row_text in re.split(r"\]\s*,\s*\[", body):
        cells = [cell for cell in row_text.split(",")]
        try:
            rows.append([ring.parse(cell) for cell in cells])
        except ParseError as exc:
            raise ParseError(exc.message, path, line) from exc
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ParseError(f"ragged matrix {text!r}", path, line)
    return Matrix.from_rows(ring, rows, width)


# ==================== DOCUMENTS ====================

@dataclass
class _Block:
    kind: str
    name: str
    line: int
    header: List[str]
    body: List[Tuple[int, List[str]]] = field(default_factory=list)


@dataclass
class Document:
    ring: Ring
    path: str = "<input>"
    complexes: Dict[str, Complex] = field(default_factory=dict)
    maps: Dict[str, ChainMap] = field(default_factory=dict)
    sequences: Dict[str, ShortExactSequence] = field(default_factory=dict)
    scenarios: Dict[str, Dict[str, str]] = field(default_factory=dict)

    def get(self, kind: str, name: Optional[str]):
        table = {
            "complex": self.complexes,
            "map": self.maps,
            "ses": self.sequences,
            "scenario": self.scenarios,
        }[kind]
        if name is None:
            if len(table) == 1:
                return next(iter(table.values()))
            raise ParseError(f"{self.path} holds {len(table)} {kind} objects; name one with FILE#NAME")
        if name not in table:
            raise ParseError(f"{self.path} has no {kind} named {name!r}")
        return table[name]


def _tokens(line: str) -> List[str]:
    """Split on whitespace, keeping a trailing matrix literal as one token."""
    match = _MATRIX_START_RE.search(line)
    if match is None:
        return line.split()
    return line[:match.start()].split() + [line[match.start():].replace(" ", "")]


def parse_document(text: str, path: str = "<input>") -> Document:
    ring: Optional[Ring] = None
    blocks: List[_Block] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = _tokens(line)
        head = tokens[0]
        if head == "ring":
            if ring is not None or len(tokens) != 2:
                raise ParseError("expected a single 'ring NAME' line", path, lineno)
            try:
                ring = parse_ring(tokens[1])
            except ParseError as exc:
                raise ParseError(exc.message, path, lineno) from exc
        elif head in ("complex", "map", "ses", "scenario"):
            if len(tokens) < 2 or not _NAME_RE.match(tokens[1]):
                raise ParseError(f"{head} needs a name", path, lineno)
            blocks.append(_Block(head, tokens[1], lineno, tokens))
        else:
            if not blocks:
                raise ParseError(f"unexpected line {line!r} outside any block", path, lineno)
            blocks[-1].body.append((lineno, tokens))
    if ring is None:
        raise ParseError("missing 'ring' line", path, 1)
    doc = Document(ring, path)
    seen = set()
    for blk in blocks:
        if (blk.kind, blk.name) in seen:
            raise ParseError(f"duplicate {blk.kind} {blk.name!r}", path, blk.line)
        seen.add((blk.kind, blk.name))
    for kind, builder in (("complex", _build_complex), ("map", _build_map),
                          ("ses", _build_ses), ("scenario", _build_scenario)):
        for blk in blocks:
            if blk.kind == kind:
                builder(doc, blk)
    return doc


def _int(token: str, path: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", path, line) from None


def _build_complex(doc: Document, blk: _Block) -> None:
    ranks: Dict[int, int] = {}
    diffs: Dict[int, Matrix] = {}
    d_lines: Dict[int, int] = {}
    for line, tokens in blk.body:
        if tokens[0] == "degree" and len(tokens) == 4 and tokens[2] == "rank":
            ranks[_int(tokens[1], doc.path, line)] = _int(tokens[3], doc.path, line)
        elif tokens[0] == "d" and len(tokens) == 3:
            n = _int(tokens[1], doc.path, line)
            diffs[n] = parse_matrix(doc.ring, tokens[2], doc.path, line)
            d_lines[n] = line
        else:
            raise ParseError(f"unexpected line in complex {blk.name}: {' '.join(tokens)}", doc.path, line)
    try:
        doc.complexes[blk.name] = Complex.build(doc.ring, ranks, diffs)
    except InvalidComplexError as exc:
        raise exc.at(doc.path, d_lines.get(exc.degree, blk.line))


def _lookup(table: Dict, name: str, kind: str, doc: Document, line: int):
    if name not in table:
        raise ParseError(f"unknown {kind} {name!r}", doc.path, line)
    return table[name]


def _build_map(doc: Document, blk: _Block) -> None:
    h = blk.header
    if len(h) != 6 or h[2] != "from" or h[4] != "to":
        raise ParseError("expected 'map NAME from A to B'", doc.path, blk.line)
    source = _lookup(doc.complexes, h[3], "complex", doc, blk.line)
    target = _lookup(doc.complexes, h[5], "complex", doc, blk.line)
    comps = {}
    for line, tokens in blk.body:
        if tokens[0] != "at" or len(tokens) != 3:
            raise ParseError(f"unexpected line in map {blk.name}: {' '.join(tokens)}", doc.path, line)
        comps[_int(tokens[1], doc.path, line)] = parse_matrix(doc.ring, tokens[2], doc.path, line)
    try:
        doc.maps[blk.name] = ChainMap.build(source, target, comps)
    except InvalidChainMapError as exc:
        raise exc.at(doc.path, blk.line)


def _build_ses(doc: Document, blk: _Block) -> None:
    refs: Dict[str, ChainMap] = {}
    splitting: Dict[int, Matrix] = {}
    for line, tokens in blk.body:
        if tokens[0] in ("i", "p") and len(tokens) == 2:
            refs[tokens[0]] = _lookup(doc.maps, tokens[1], "map", doc, line)
        elif tokens[0] == "split" and len(tokens) == 4 and tokens[1] == "at":
            splitting[_int(tokens[2], doc.path, line)] = parse_matrix(doc.ring, tokens[3], doc.path, line)
        else:
            raise ParseError(f"unexpected line in ses {blk.name}: {' '.join(tokens)}", doc.path, line)
    if set(refs) != {"i", "p"}:
        raise ParseError(f"ses {blk.name} needs both 'i' and 'p'", doc.path, blk.line)
    try:
        doc.sequences[blk.name] = ShortExactSequence.build(refs["i"], refs["p"], splitting or None)
    except InvalidSesError as exc:
        raise exc.at(doc.path, blk.line)


def _build_scenario(doc: Document, blk: _Block) -> None:
    slots: Dict[str, str] = {}
    for line, tokens in blk.body:
        if len(tokens) != 2 or tokens[0] not in ("delta1", "delta2", "a", "b", "c"):
            raise ParseError(f"unexpected line in scenario {blk.name}: {' '.join(tokens)}", doc.path, line)
        table = doc.sequences if tokens[0].startswith("delta") else doc.maps
        _lookup(table, tokens[1], "ses" if tokens[0].startswith("delta") else "map", doc, line)
        slots[tokens[0]] = tokens[1]
    missing = {"delta1", "delta2", "a", "b", "c"} - set(slots)
    if missing:
        raise ParseError(f"scenario {blk.name} is missing {', '.join(sorted(missing))}", doc.path, blk.line)
    doc.scenarios[blk.name] = slots


# ==================== FILES AND REFERENCES ====================

def load_document(path: str) -> Document:
    file = Path(path)
    if not file.is_file():
        raise ParseError(f"no such file: {path}")
    return parse_document(file.read_text(encoding="utf-8"), path)


def split_ref(ref: str) -> Tuple[str, Optional[str]]:
    """``FILE#NAME`` -> (FILE, NAME); the name is optional."""
    path, sep, name = ref.partition("#")
    if not path:
        raise ParseError(f"malformed reference {ref!r}")
    return path, (name if sep and name else None)


def resolve(ref: str, kind: str):
    path, name = split_ref(ref)
    doc = load_document(path)
    return doc, doc.get(kind, name)


def load_trivialization(path: str, ring: Ring) -> Matrix:
    """Read the ``t MATRIX`` line of a trivialization file."""
    file = Path(path)
    if not file.is_file():
        raise ParseError(f"no such file: {path}")
    found = None
    for lineno, raw in enumerate(file.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = _tokens(line)
        if tokens[0] == "ring":
            continue
        if tokens[0] != "t" or len(tokens) != 2 or found is not None:
            raise ParseError(f"expected a single 't MATRIX' line, got {line!r}", path, lineno)
        found = parse_matrix(ring, tokens[1], path, lineno)
    if found is None:
        raise ParseError("missing 't MATRIX' line", path)
    return found


# ==================== WRITERS ====================

def format_complex(name: str, c: Complex) -> str:
    lines = [f"complex {name}"]
    for i in c.degrees:
        lines.append(f"  degree {i} rank {c.rank(i)}")
    for i in range(c.lo, c.hi):
        lines.append(f"  d {i} {c.d(i).format()}")
    return "\n".join(lines)


def format_map(name: str, source: str, target: str, f: ChainMap) -> str:
    lines = [f"map {name} from {source} to {target}"]
    for i in f.degrees:
        lines.append(f"  at {i} {f.component(i).format()}")
    return "\n".join(lines)


# ==================== COMMAND-LINE VALUES ====================

def parse_pair(text: str) -> RelPair:
    """``R:S`` -> RelPair."""
    source, sep, target = text.partition(":")
    if not sep or not source or not target:
        raise ParseError(f"expected a ring pair R:S, got {text!r}")
    return RelPair(parse_ring(source), parse_ring(target))


def parse_degrees(text: str) -> Tuple[int, int]:
    """``lo:hi`` -> (lo, hi) with lo <= hi."""
    match = re.match(r"^\s*(-?\d+)\s*:\s*(-?\d+)\s*$", text)
    if match is None:
        raise ParseError(f"expected a degree window lo:hi, got {text!r}")
    lo, hi = int(match.group(1)), int(match.group(2))
    if lo > hi:
        raise ParseError(f"empty degree window {text!r}")
    return lo, hi


def parse_primes(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ParseError(f"expected a comma-separated list of primes, got {text!r}") from None
