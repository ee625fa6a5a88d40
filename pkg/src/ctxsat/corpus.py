"""Locate the shipped example programs."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

CORPUS_NAMES = (
    "intro",
    "conditional",
    "queryplan",
    "lambda",
    "nested-conditional-1",
    "nested-conditional-2",
    "nested-conditional-3",
)


def corpus_path(name: str) -> Path:
    base = resources.files("ctxsat") / "corpora" / f"{name}.ctx"
    return Path(str(base))


def corpus_source(name: str) -> str:
    return corpus_path(name).read_text()
