"""Bundled fixture lexicons and composition trees."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .assembly import TreeDocument, load_tree
from .lexicon import Lexicon, load_lexicon

LEXICONS = ("montague", "towns", "determiners", "fictive_motion", "deverbals", "plurals")


def data_dir() -> Path:
    return Path(str(resources.files("mglex") / "data"))


def lexicon_path(name: str) -> Path:
    return data_dir() / f"{name}.json"


def fixture_lexicon(name: str) -> Lexicon:
    return load_lexicon(lexicon_path(name))


def tree_paths(name: str) -> list:
    return sorted((data_dir() / "trees" / name).glob("*.json"))


def fixture_trees(name: str) -> dict:
    """Map tree file stem to its TreeDocument."""
    return {p.stem: load_tree(p) for p in tree_paths(name)}
