"""Source-collection ingestion: ``<DOC>`` blocks to fielded documents with DCTs."""

from __future__ import annotations

import datetime as dt
import html
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .analysis import split_sentences

log = logging.getLogger(__name__)

ID_ELEMENTS = ("DOCNO", "DOCID")

_DOC_BLOCK = re.compile(r"<DOC(?:\s[^>]*)?>.*?</DOC>", re.DOTALL | re.IGNORECASE)
_TAG = re.compile(r"<(/?)([A-Za-z_][\w.\-]*)([^>]*?)(/?)>")
_ATTR_ID = re.compile(r"""\bid\s*=\s*["']([^"']+)["']""", re.IGNORECASE)

_MONTHS = {
    name: i
    for i, name in enumerate(
        ["january", "february", "march", "april", "may", "june", "july",
         "august", "september", "october", "november", "december"],
        start=1,
    )
}
_ID_DATE = re.compile(r"(?<!\d)(\d{4})(\d{2})(\d{2})(?!\d)")
_ISO_DATE = re.compile(r"\b(\d{4})-(\d{2})-(\d{2})\b")
_PROSE_DATE = re.compile(
    r"\b(" + "|".join(m.capitalize() for m in _MONTHS) + r")\s+(\d{1,2}),\s*(\d{4})\b",
    re.IGNORECASE,
)


class DuplicateDocumentError(ValueError):
    pass


class MalformedDocument(ValueError):
    pass


@dataclass
class Field:
    name: str
    text: str
    sentences: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class Document:
    doc_id: str
    fields: list[Field]
    dct: dt.date | None = None

    def field_names(self) -> list[str]:
        return [f.name for f in self.fields]

    def iter_sentences(self) -> Iterator[tuple[int, int, int, str]]:
        """Yield ``(sentence_index, field_index, start, text)`` in document order."""
        k = 0
        for fi, f in enumerate(self.fields):
            for start, end in f.sentences:
                yield k, fi, start, f.text[start:end]
                k += 1

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "fields": [[f.name, f.text] for f in self.fields],
            "sentences": [[list(s) for s in f.sentences] for f in self.fields],
            "dct": self.dct.isoformat() if self.dct else None,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Document":
        fields = [
            Field(name, text, [tuple(s) for s in sents])
            for (name, text), sents in zip(obj["fields"], obj["sentences"])
        ]
        dct = dt.date.fromisoformat(obj["dct"]) if obj.get("dct") else None
        return cls(obj["doc_id"], fields, dct)


def make_document(doc_id: str, fields: Iterable[tuple[str, str]], dct: dt.date | None = None) -> Document:
    """Build a document from ``(field_name, text)`` pairs, segmenting sentences."""
    doc = Document(doc_id, [Field(name, text, split_sentences(text)) for name, text in fields])
    doc.dct = dct if dct is not None else extract_dct(doc)
    return doc


@dataclass
class Corpus:
    documents: dict[str, Document] = field(default_factory=dict)
    rejected: list[str] = field(default_factory=list)

    @property
    def doc_count(self) -> int:
        return len(self.documents)

    def add(self, doc: Document) -> None:
        if doc.doc_id in self.documents:
            raise DuplicateDocumentError(f"duplicate doc_id {doc.doc_id!r}")
        self.documents[doc.doc_id] = doc

    def __getitem__(self, doc_id: str) -> Document:
        return self.documents[doc_id]

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.documents

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents.values())

    def __len__(self) -> int:
        return len(self.documents)


def parse_doc_block(block: str) -> Document:
    """Parse one ``<DOC>...</DOC>`` block.

    Every run of text becomes a field named after its innermost enclosing
    element; elements with no content at all yield an empty field.
    """
    stack: list[list] = []  # [name, has_content]
    fields: list[tuple[str, str]] = []
    doc_id = None
    pos = 0
    for m in _TAG.finditer(block):
        _emit_text(block[pos:m.start()], stack, fields)
        pos = m.end()
        closing, name, attrs, selfclose = m.group(1), m.group(2), m.group(3), m.group(4)
        if selfclose:
            if stack:
                stack[-1][1] = True
            continue
        if not closing:
            if name.upper() == "DOC":
                if stack:
                    raise MalformedDocument("nested <DOC>")
                idm = _ATTR_ID.search(attrs)
                if idm:
                    doc_id = idm.group(1).strip()
            if stack:
                stack[-1][1] = True
            stack.append([name, False])
            continue
        if not stack or stack[-1][0].upper() != name.upper():
            open_name = stack[-1][0] if stack else None
            raise MalformedDocument(f"closing </{name}> does not match open <{open_name}>")
        el_name, had_content = stack.pop()
        if not had_content and el_name.upper() != "DOC":
            fields.append((el_name, ""))
    if stack:
        raise MalformedDocument(f"unclosed <{stack[-1][0]}>")
    _emit_text(block[pos:], stack, fields)

    kept = []
    for name, text in fields:
        if name.upper() in ID_ELEMENTS:
            if doc_id is None:
                doc_id = text.strip()
            continue
        kept.append((name, text))
    if not doc_id:
        raise MalformedDocument("document has no id element")
    return make_document(doc_id, kept)


def _emit_text(raw: str, stack, fields) -> None:
    if not raw.strip():
        return
    if not stack:
        raise MalformedDocument("text outside any element")
    stack[-1][1] = True
    if stack[-1][0].upper() == "DOC":
        # Untagged text directly under <DOC> is treated as body text.
        fields.append(("TEXT", html.unescape(raw.strip())))
    else:
        fields.append((stack[-1][0], html.unescape(raw.strip())))


def iter_doc_blocks(text: str) -> Iterator[str]:
    yield from (m.group() for m in _DOC_BLOCK.finditer(text))


def ingest_corpus(sources: Iterable[str | Path], corpus: Corpus | None = None) -> Corpus:
    """Ingest files (or raw markup strings) of concatenated ``<DOC>`` blocks.

    Malformed blocks are rejected with a diagnostic and skipped; a duplicate
    ``doc_id`` raises :class:`DuplicateDocumentError`.
    """
    corpus = corpus if corpus is not None else Corpus()
    for src in sources:
        if isinstance(src, Path):
            label, text = str(src), src.read_text(encoding="utf-8", errors="replace")
        else:
            label, text = "<string>", src
        for n, block in enumerate(iter_doc_blocks(text)):
            try:
                doc = parse_doc_block(block)
            except MalformedDocument as exc:
                msg = f"{label}: document #{n}: {exc}"
                log.warning("rejected %s", msg)
                corpus.rejected.append(msg)
                continue
            corpus.add(doc)
    return corpus


def corpus_files(path: Path) -> list[Path]:
    """Files under ``path`` (recursively, sorted) or ``[path]`` for a single file."""
    if path.is_file():
        return [path]
    if not path.is_dir():
        raise FileNotFoundError(path)
    return sorted(p for p in path.rglob("*") if p.is_file() and not p.name.startswith("."))


def extract_dct(doc: Document) -> dt.date | None:
    """Document creation time: 8-digit date in the id, else a date element, else None."""
    for m in _ID_DATE.finditer(doc.doc_id):
        d = _safe_date(*m.groups())
        if d:
            return d
    for f in doc.fields:
        if "DATE" in f.name.upper() or "TIME" in f.name.upper():
            d = parse_date_text(f.text)
            if d:
                return d
    return None


def parse_date_text(text: str) -> dt.date | None:
    """First ``YYYY-MM-DD`` or ``Month D, YYYY`` date in ``text``."""
    found = []
    m = _ISO_DATE.search(text)
    if m:
        d = _safe_date(*m.groups())
        if d:
            found.append((m.start(), d))
    m = _PROSE_DATE.search(text)
    if m:
        d = _safe_date(m.group(3), _MONTHS[m.group(1).lower()], m.group(2))
        if d:
            found.append((m.start(), d))
    return min(found)[1] if found else None


def _safe_date(y, m, d) -> dt.date | None:
    try:
        return dt.date(int(y), int(m), int(d))
    except ValueError:
        return None


def write_dct_database(corpus: Corpus, path: Path) -> None:
    """TSV ``doc_id<TAB>YYYY-MM-DD``; documents without a DCT are omitted."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            if doc.dct:
                fh.write(f"{doc.doc_id}\t{doc.dct.isoformat()}\n")


def read_dct_database(path: Path) -> dict[str, dt.date]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                doc_id, date = line.rstrip("\n").split("\t")
                out[doc_id] = dt.date.fromisoformat(date)
    return out
