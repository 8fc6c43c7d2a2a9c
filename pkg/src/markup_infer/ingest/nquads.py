"""Streaming N-Quads reader and writer.

Each line holds one statement ``subject predicate object graph .`` where the
graph label is the URL of the page the statement was extracted from.  Web
markup corpora are noisy, so by default malformed lines are skipped and
counted instead of stopping the whole read.
"""

from __future__ import annotations

import gzip
import io
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Optional, Union
from urllib.parse import urlsplit

logger = logging.getLogger(__name__)

GZIP_MAGIC = b"\x1f\x8b"

_IRI = r'<([^\x00-\x20<>"{}|^`\\]*)>'
_BNODE = r"(_:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)"
_LITERAL = (
    r'"((?:[^"\\\n\r]|\\[tbnrf"\'\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)"'
    r"(?:@([a-zA-Z]+(?:-[a-zA-Z0-9]+)*)|\^\^" + _IRI + r")?"
)
_LINE = re.compile(
    r"^[ \t]*(?:" + _IRI + "|" + _BNODE + r")"
    r"[ \t]+" + _IRI +
    r"[ \t]*(?:" + _IRI + "|" + _BNODE + "|" + _LITERAL + r")"
    r"[ \t]*" + _IRI +
    r"[ \t]*\.[ \t]*(?:#.*)?$"
)
_ESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class ErrorPolicy(str, Enum):
    SKIP = "skip"
    ABORT = "abort"


class NQuadsSyntaxError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Term:
    """An RDF term in object position.

    ``kind`` is one of ``"iri"``, ``"bnode"`` or ``"literal"``.  Blank nodes
    keep their ``_:`` prefix in ``value``; literal values are unescaped.
    """

    kind: str
    value: str
    lang: Optional[str] = None
    datatype: Optional[str] = None

    @classmethod
    def iri(cls, value: str) -> "Term":
        return cls("iri", value)

    @classmethod
    def bnode(cls, label: str) -> "Term":
        return cls("bnode", label if label.startswith("_:") else "_:" + label)

    @classmethod
    def literal(cls, value: str, lang: Optional[str] = None, datatype: Optional[str] = None) -> "Term":
        return cls("literal", value, lang, datatype)

    def to_nquads(self) -> str:
        if self.kind == "iri":
            return f"<{self.value}>"
        if self.kind == "bnode":
            return self.value
        text = '"' + escape_literal(self.value) + '"'
        if self.lang:
            return f"{text}@{self.lang}"
        if self.datatype:
            return f"{text}^^<{self.datatype}>"
        return text


@dataclass(frozen=True)
class Quad:
    subject: str
    predicate: str
    object: Term
    source_url: str

    def to_nquads(self) -> str:
        subj = self.subject if self.subject.startswith("_:") else f"<{self.subject}>"
        return f"{subj} <{self.predicate}> {self.object.to_nquads()} <{self.source_url}> ."


@dataclass
class ParseReport:
    lines: int = 0
    quads: int = 0
    skipped: int = 0
    errors: list = field(default_factory=list)
    max_errors_kept: int = 50

    def record_error(self, line_no: int, message: str) -> None:
        self.skipped += 1
        if len(self.errors) < self.max_errors_kept:
            self.errors.append((line_no, message))

    def to_dict(self) -> dict:
        return {"lines": self.lines, "quads": self.quads, "skipped": self.skipped,
                "errors": [{"line": n, "message": m} for n, m in self.errors]}


def escape_literal(value: str) -> str:
    return (value.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\r", "\\r"))


def unescape_literal(value: str) -> str:
    if "\\" not in value:
        return value

    def repl(m: re.Match) -> str:
        code = m.group(1) or m.group(2)
        if code:
            return chr(int(code, 16))
        return _ECHAR[m.group(3)]

    return _ESCAPE.sub(repl, value)


_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.-]*:")


def is_absolute_url(url: str) -> bool:
    try:
        parts = urlsplit(url)
        return bool(parts.scheme) and bool(parts.hostname)
    except ValueError:
        return False


def parse_line(line: str) -> Optional[Quad]:
    """Parse one line; returns ``None`` for blank or comment-only lines.

    Raises ``ValueError`` with a short reason for malformed lines.
    """
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _LINE.match(line.rstrip("\r\n"))
    if m is None:
        raise ValueError("not a valid N-Quads statement")
    s_iri, s_bnode, pred, o_iri, o_bnode, o_lit, o_lang, o_dt, graph = m.groups()
    subject = s_iri if s_iri is not None else s_bnode
    if not subject:
        raise ValueError("empty subject")
    if not pred:
        raise ValueError("empty predicate")
    for iri in (s_iri, pred, o_iri, o_dt):
        if iri is not None and not _SCHEME.match(iri):
            raise ValueError(f"relative IRI: {iri!r}")
    if o_iri is not None:
        obj = Term.iri(o_iri)
    elif o_bnode is not None:
        obj = Term.bnode(o_bnode)
    else:
        obj = Term.literal(unescape_literal(o_lit), o_lang, o_dt)
    if not is_absolute_url(graph):
        raise ValueError(f"graph label is not an absolute URL: {graph!r}")
    return Quad(subject, pred, obj, graph)


def open_corpus(path: Union[str, Path]) -> BinaryIO:
    """Open a corpus file, transparently decompressing gzip (by magic bytes)."""
    raw = open(path, "rb")
    if raw.peek(2)[:2] == GZIP_MAGIC:
        raw.close()
        return gzip.open(path, "rb")
    return raw


def parse_nquads(
    stream: Union[BinaryIO, Iterable[bytes], str, Path],
    policy: Union[ErrorPolicy, str] = ErrorPolicy.SKIP,
    report: Optional[ParseReport] = None,
) -> Iterator[Quad]:
    """Yield quads from ``stream`` in input order.

    ``stream`` may be a path, an open binary file, or any iterable of byte
    lines.  Statistics accumulate in ``report`` (pass one in to read them
    after the generator is exhausted).
    """
    policy = ErrorPolicy(policy)
    if report is None:
        report = ParseReport()
    if isinstance(stream, (str, Path)):
        with open_corpus(stream) as fh:
            yield from parse_nquads(fh, policy, report)
        return
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    for line_no, raw in enumerate(stream, start=1):
        report.lines += 1
        try:
            text = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
            quad = parse_line(text)
        except (UnicodeDecodeError, ValueError) as exc:
            if policy is ErrorPolicy.ABORT:
                raise NQuadsSyntaxError(line_no, str(exc)) from exc
            report.record_error(line_no, str(exc))
            continue
        if quad is not None:
            report.quads += 1
            yield quad
    if report.skipped:
        logger.info("skipped %d malformed lines of %d", report.skipped, report.lines)


def read_nquads(source, policy=ErrorPolicy.SKIP) -> tuple[list[Quad], ParseReport]:
    report = ParseReport()
    quads = list(parse_nquads(source, policy, report))
    return quads, report


def write_nquads(quads: Iterable[Quad], path: Union[str, Path]) -> int:
    n = 0
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wt", encoding="utf-8", newline="\n") as fh:
        for q in quads:
            fh.write(q.to_nquads())
            fh.write("\n")
            n += 1
    return n
