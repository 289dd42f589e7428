"""Access to the word lists and tables shipped in ``kbp/data``."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


def _data_path(name: str):
    return resources.files("kbp").joinpath("data").joinpath(name)


@lru_cache(maxsize=None)
def word_list(name: str) -> tuple[str, ...]:
    """One entry per non-blank line of ``data/<name>.txt``."""
    text = _data_path(f"{name}.txt").read_text(encoding="utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=None)
def json_table(name: str) -> dict:
    return json.loads(_data_path(f"{name}.json").read_text(encoding="utf-8"))


def stopwords() -> frozenset[str]:
    return frozenset(word_list("stopwords"))
