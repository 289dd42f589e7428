"""Boolean query trees over (optionally fielded) terms and phrases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from .analysis import index_tokens


@dataclass(frozen=True)
class Term:
    """A word or phrase; multi-token text matches as an exact phrase."""

    text: str
    field: str | None = None

    def tokens(self, remove_stopwords: bool = False) -> tuple[str, ...]:
        return tuple(index_tokens(self.text, remove_stopwords))


@dataclass(frozen=True)
class And:
    children: tuple["Query", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Query", ...]


Query = Union[Term, And, Or]


def phrase(text: str, field: str | None = None) -> Term:
    return Term(text, field)


def and_(*children: Query) -> And:
    return And(tuple(children))


def or_(*children: Query) -> Or:
    return Or(tuple(children))


def leaves(q: Query) -> Iterator[Term]:
    if isinstance(q, Term):
        yield q
    else:
        for c in q.children:
            yield from leaves(c)


def validate(q: Query) -> None:
    """Raise ``ValueError`` unless every node satisfies the tree invariants."""
    if isinstance(q, Term):
        if not q.tokens():
            raise ValueError(f"term {q.text!r} has no tokens")
        return
    if not isinstance(q, (And, Or)) or not q.children:
        raise ValueError(f"{type(q).__name__} node needs at least one child")
    for c in q.children:
        validate(c)


def to_json(q: Query):
    if isinstance(q, Term):
        return {"term": q.text, "field": q.field} if q.field else {"term": q.text}
    return {type(q).__name__.lower(): [to_json(c) for c in q.children]}


def from_json(obj) -> Query:
    if "term" in obj:
        return Term(obj["term"], obj.get("field"))
    if "and" in obj:
        return And(tuple(from_json(c) for c in obj["and"]))
    if "or" in obj:
        return Or(tuple(from_json(c) for c in obj["or"]))
    raise ValueError(f"not a query node: {obj!r}")


def render(q: Query) -> str:
    """Lucene-like rendering, for logs and manifests."""
    if isinstance(q, Term):
        text = f'"{q.text}"' if len(q.tokens()) > 1 else q.text
        return f"{q.field}:{text}" if q.field else text
    sep = " AND " if isinstance(q, And) else " OR "
    return "(" + sep.join(render(c) for c in q.children) + ")"
